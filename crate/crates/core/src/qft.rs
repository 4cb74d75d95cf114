//! Quantum Fourier transform and its inverse.
//!
//! `run(qft(n), |x⟩) = 2^{-n/2} Σ_k e^{2πixk/2^n} |k⟩` with the crate's
//! qubit-0-most-significant ordering. The circuit ends with the
//! qubit-reversal swaps so the formula holds as written.

use std::f64::consts::PI;

use crate::circuit::CircuitSpec;
use crate::error::Result;

pub fn qft(n: usize) -> Result<CircuitSpec> {
    let mut c = CircuitSpec::new(n);
    for i in 0..n {
        c.h(i)?;
        for j in i + 1..n {
            let k = (j - i + 1) as f64;
            c.push("rk", &[k], &[j], &[i])?;
        }
    }
    for i in 0..n / 2 {
        c.swap(i, n - 1 - i)?;
    }
    Ok(c)
}

/// Mirror image of [`qft`] with every phase angle negated.
pub fn inverse_qft(n: usize) -> Result<CircuitSpec> {
    let mut c = CircuitSpec::new(n);
    for i in 0..n / 2 {
        c.swap(i, n - 1 - i)?;
    }
    for i in (0..n).rev() {
        for j in (i + 1..n).rev() {
            let angle = -2.0 * PI / 2f64.powi((j - i + 1) as i32);
            c.push("u1", &[angle], &[j], &[i])?;
        }
        c.h(i)?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use crate::state::StateVector;
    use num_complex::Complex64;

    /// Direct evaluation of the defining sum.
    fn dft_of_basis(n: usize, x: usize) -> Vec<Complex64> {
        let dim = 1 << n;
        (0..dim)
            .map(|k| Complex64::from_polar(1.0 / (dim as f64).sqrt(), 2.0 * PI * (x * k) as f64 / dim as f64))
            .collect()
    }

    #[test]
    fn one_qubit_qft_is_hadamard() {
        let m = qft(1).unwrap().to_matrix().unwrap();
        assert!(m.max_abs_diff(&gates::h()) < 1e-15);
        let m = inverse_qft(1).unwrap().to_matrix().unwrap();
        assert!(m.max_abs_diff(&gates::h()) < 1e-15);
    }

    #[test]
    fn qft_matches_definition() {
        for n in 1..=5 {
            let c = qft(n).unwrap();
            for x in 0..1 << n {
                let out = c.run(&StateVector::basis_state(n, x).unwrap()).unwrap();
                for (a, e) in out.amplitudes().iter().zip(dft_of_basis(n, x)) {
                    assert!((a - e).norm() < 1e-10, "n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn qft3_examples() {
        let out = qft(3).unwrap().run_from_zero().unwrap();
        for a in out.amplitudes() {
            assert!((a - Complex64::new(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-12);
        }
        let phased = qft(3).unwrap().run(&StateVector::basis_state(3, 5).unwrap()).unwrap();
        for (k, a) in phased.amplitudes().iter().enumerate() {
            let e = Complex64::from_polar(1.0 / 8f64.sqrt(), 2.0 * PI * 5.0 * k as f64 / 8.0);
            assert!((a - e).norm() < 1e-12);
        }
        let back = inverse_qft(3).unwrap().run(&phased).unwrap();
        assert!((back.amplitudes()[0b101].norm() - 1.0).abs() < 1e-12);

        let six = StateVector::basis_state(3, 6).unwrap();
        let round = inverse_qft(3).unwrap().run(&qft(3).unwrap().run(&six).unwrap()).unwrap();
        assert!((round.amplitudes()[6].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn qft_is_unitary_and_inverted() {
        for n in 1..=5 {
            let f = qft(n).unwrap().to_matrix().unwrap();
            assert!(f.is_unitary());
            let mut both = qft(n).unwrap();
            both.append(&inverse_qft(n).unwrap()).unwrap();
            for x in 0..1 << n {
                let out = both.run(&StateVector::basis_state(n, x).unwrap()).unwrap();
                assert!((out.amplitudes()[x].norm() - 1.0).abs() < 1e-10);
            }
        }
    }
}
