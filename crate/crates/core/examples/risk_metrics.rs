//! Expected value, volatility, VaR and CVaR of the bundled P/L histograms,
//! read from an ancilla qubit and compared with the closed-form sums.

use qfin::fixtures;
use qfin::readout::Mode;
use qfin::risk::{classical_risk_oracle, DiscreteDistribution, QuantumRisk};

fn show(dist: &DiscreteDistribution, mode: Mode) -> qfin::error::Result<()> {
    let alphas = [0.95, 0.99];
    let mut q = QuantumRisk::new(dist, mode)?;
    let quantum = q.report(&alphas)?;
    let classical = classical_risk_oracle(dist, &alphas)?;
    println!("{} bins, {} ({} circuits)", dist.len(), mode.tag(), q.circuits_run());
    println!("  E[X]    {:>8.3} bins   classical {:.3}", quantum.expected_value_bins, classical.expected_value_bins);
    println!("  sigma   {:>8.3} bins   classical {:.3}", quantum.std_dev_bins, classical.std_dev_bins);
    for (ql, cl) in quantum.levels.iter().zip(&classical.levels) {
        println!("  VaR{:<4} {:>8}        classical {}", ql.alpha * 100.0, ql.var_bins, cl.var_bins);
        println!("  CVaR{:<3} {:>8.3}        classical {:.3}", ql.alpha * 100.0, ql.cvar_bins, cl.cvar_bins);
    }
    for b in quantum.bounds(dist.bin_edges())? {
        match b.upper {
            Some(hi) => println!("  {:<14} [{:>8.2}, {:>8.2}] bp", b.metric, b.lower.unwrap_or(f64::NAN), hi),
            None => println!("  {:<14} {:>8.2} bp", b.metric, b.lower.unwrap_or(f64::NAN)),
        }
    }
    Ok(())
}

fn main() -> qfin::error::Result<()> {
    for dist in [fixtures::risk_8()?, fixtures::risk_16()?] {
        show(&dist, Mode::Exact)?;
        show(&dist, Mode::Sampled { shots: 8192, seed: 0 })?;
    }
    Ok(())
}
