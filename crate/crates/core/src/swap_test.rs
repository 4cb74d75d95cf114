//! Swap test: estimates `|⟨ψ|φ⟩|` from the zero-probability of a control
//! qubit wrapped around controlled swaps of the two registers.

use crate::circuit::CircuitSpec;
use crate::error::{QfinError, Result};
use crate::state::StateVector;

/// The `2n+1`-qubit swap-test circuit. Qubit 0 is the control, qubits
/// `1..=n` hold ψ and `n+1..=2n` hold φ.
pub fn swap_test_circuit(n: usize) -> Result<CircuitSpec> {
    let mut c = CircuitSpec::new(2 * n + 1);
    c.h(0)?;
    for i in 0..n {
        c.push("swap", &[], &[0], &[1 + i, 1 + n + i])?;
    }
    c.h(0)?;
    Ok(c)
}

fn prepared(psi: &StateVector, phi: &StateVector) -> Result<StateVector> {
    if psi.num_qubits() != phi.num_qubits() {
        return Err(QfinError::LengthMismatch { expected: psi.num_qubits(), got: phi.num_qubits() });
    }
    let n = psi.num_qubits();
    let input = StateVector::zero_state(1)?.tensor(psi)?.tensor(phi)?;
    swap_test_circuit(n)?.run(&input)
}

/// Turns a control-qubit zero probability into the overlap estimate,
/// clamping sampling noise below `P₀ = 1/2` to zero.
pub fn overlap_from_p0(p0: f64) -> f64 {
    (2.0 * p0 - 1.0).max(0.0).sqrt()
}

/// Exact control-qubit `P(0)`.
pub fn swap_test_p0(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    prepared(psi, phi)?.marginal_probability(0, 0)
}

/// Sampled swap test: `√max(0, 2P̂₀ − 1)` from `shots` measurements.
pub fn swap_test(psi: &StateVector, phi: &StateVector, shots: u64, seed: u64) -> Result<f64> {
    let state = prepared(psi, phi)?;
    let counts = state.sample(shots, seed)?;
    Ok(overlap_from_p0(counts.marginal_frequency(0, 0)))
}

/// Swap test evaluated from the exact control-qubit probability.
pub fn swap_test_exact(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    Ok(overlap_from_p0(swap_test_p0(psi, phi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn bell(index: usize) -> StateVector {
        let v = match index {
            0 => [1.0, 0.0, 0.0, 1.0],
            1 => [0.0, 1.0, 1.0, 0.0],
            _ => unreachable!(),
        };
        StateVector::from_real(&v).unwrap()
    }

    #[test]
    fn identical_states() {
        assert!((swap_test_p0(&bell(0), &bell(0)).unwrap() - 1.0).abs() < 1e-12);
        assert!((swap_test(&bell(0), &bell(0), 4096, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_states() {
        assert!((swap_test_p0(&bell(0), &bell(1)).unwrap() - 0.5).abs() < 1e-12);
        let est = swap_test(&bell(0), &bell(1), 8192, 2).unwrap();
        // 2P̂₀−1 has standard error 2·√(0.25/8192); its root stays small.
        assert!(est < 0.2, "{est}");
    }

    #[test]
    fn rotated_qubit() {
        let psi = StateVector::zero_state(1).unwrap();
        let phi = StateVector::from_real(&[(PI / 8.0).cos(), (PI / 8.0).sin()]).unwrap();
        assert!((swap_test_exact(&psi, &phi).unwrap() - (PI / 8.0).cos()).abs() < 1e-12);
        let est = swap_test(&psi, &phi, 8192, 3).unwrap();
        assert!((est - 0.9239).abs() < 0.03, "{est}");
    }

    #[test]
    fn clamps_negative_estimates() {
        assert_eq!(overlap_from_p0(0.49), 0.0);
        assert!(swap_test(&bell(0), &StateVector::zero_state(1).unwrap(), 10, 0).is_err());
    }
}
