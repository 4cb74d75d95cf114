//! Bundled datasets. The same numbers ship as files under `data/`.

use crate::error::Result;
use crate::hhl::PortfolioSpec;
use crate::risk::DiscreteDistribution;

/// 8-bin P/L histogram in percent.
pub const RISK_8_WEIGHTS: [f64; 8] = [0.431, 0.863, 7.443, 38.188, 40.885, 9.493, 1.834, 0.863];

/// 16-bin P/L histogram in percent. Sums to 99.999.
pub const RISK_16_WEIGHTS: [f64; 16] =
    [0.431, 0.216, 0.539, 1.294, 3.02, 5.933, 14.024, 21.467, 22.438, 14.995, 8.846, 3.344, 1.402, 0.863, 0.324, 0.863];

/// Half-widths of the two histograms, in basis points.
pub const RISK_8_HALF_RANGE: f64 = 86.667;
pub const RISK_16_HALF_RANGE: f64 = 74.286;

pub fn risk_8() -> Result<DiscreteDistribution> {
    DiscreteDistribution::from_weights(&RISK_8_WEIGHTS, "cnb-8")?.with_range(-RISK_8_HALF_RANGE, RISK_8_HALF_RANGE)
}

pub fn risk_16() -> Result<DiscreteDistribution> {
    DiscreteDistribution::from_weights(&RISK_16_WEIGHTS, "cnb-16")?.with_range(-RISK_16_HALF_RANGE, RISK_16_HALF_RANGE)
}

/// Fixed income vs equities, percent units, required return 7 %.
pub fn bonds_equities() -> PortfolioSpec {
    PortfolioSpec {
        covariance: vec![vec![0.15, -0.43], vec![-0.43, 2.46]],
        returns: vec![5.86, 16.78],
        prices: vec![1.0, 1.0],
        gain: 7.0,
        budget: 1.0,
    }
}

/// Eigenvalues of the bonds/equities system, ascending.
pub const BONDS_EQUITIES_EIGENVALUES: [f64; 4] = [-16.90792562, -0.36203117, 1.03367322, 18.84628357];

pub const SEMI_LABELS: [&str; 5] = ["AMD", "Intel", "Qualcomm", "Analog Devices", "Texas Instruments"];

pub const SEMI_RETURNS: [f64; 5] = [0.951464, 0.05303, 0.397515, 0.204385, 0.21317];

pub fn semi_covariance() -> Vec<Vec<f64>> {
    vec![
        vec![0.202087, 0.002804, 0.032734, -0.014687, -0.019333],
        vec![0.002804, 0.024813, -0.00308, 0.00442, 0.003153],
        vec![0.032734, -0.00308, 0.099099, 0.03567, 0.05288],
        vec![-0.014687, 0.00442, 0.03567, 0.034792, 0.037495],
        vec![-0.019333, 0.003153, 0.05288, 0.037495, 0.049725],
    ]
}

/// Penalty weights (returns, risk, asset count) and target count.
pub const SEMI_LAMBDAS: (f64, f64, f64) = (1.0, 4.0, 1.0);
pub const SEMI_PICK: usize = 3;

/// Total objective for every bitstring of the five-share task, row index
/// read with AMD as the most significant bit.
pub const SEMI_OBJECTIVES: [f64; 32] = [
    9.0000, 3.9857, 3.9348, 1.2205, 3.9989, 1.4077, 1.2190, 0.9278, 4.0462, 1.0572, 1.0164, 0.3273, 1.0205, 0.4545,
    0.2760, 2.0099, 3.8569, 0.6880, 0.6742, -0.1948, 1.1176, 0.3717, 0.2203, 1.7744, 0.9255, -0.2182, -0.2218, 0.9344,
    0.1617, 1.4410, 1.2997, 4.8789,
];

pub fn semi_task() -> Result<crate::qubo::QuboTask> {
    crate::qubo::build_portfolio_qubo(&SEMI_RETURNS, &semi_covariance(), SEMI_PICK, SEMI_LAMBDAS)?
        .with_labels(SEMI_LABELS.iter().map(|s| s.to_string()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::brute_force;

    #[test]
    fn histograms_load() {
        assert_eq!(risk_8().unwrap().num_qubits(), 3);
        assert_eq!(risk_16().unwrap().num_qubits(), 4);
    }

    #[test]
    fn semi_table_reproduced() {
        let table = brute_force(&semi_task().unwrap(), None).unwrap();
        for (row, want) in table.rows.iter().zip(SEMI_OBJECTIVES) {
            assert!((row.objective - want).abs() < 5e-4, "row {}: {} vs {want}", row.index, row.objective);
        }
        assert_eq!(table.optimum_row().bits, "11010");
    }
}
