//! Uniformly controlled `Ry` rotations and amplitude encoding of a
//! probability vector.
//!
//! A uniformly controlled rotation applies `Ry(α_i)` to a target qubit when
//! the control register holds `|i⟩` (the first control is the most
//! significant bit of `i`). It is realized as `2^k` single-qubit `Ry(θ_i)`
//! gates interleaved with CNOTs, where `θ = M·α` and the CNOT after step `i`
//! is driven by the control whose Gray-code bit flips between `i` and `i+1`.

use crate::circuit::CircuitSpec;
use crate::error::{QfinError, Result};
use crate::gray::transform_angles;

fn register_width(controls: &[usize], target: usize) -> usize {
    controls.iter().copied().chain([target]).max().unwrap_or(0) + 1
}

/// Ry/CNOT ladder for already transformed angles `thetas` (`len = 2^controls`).
///
/// The returned circuit is as wide as the largest qubit index used.
pub fn uniform_controlled_ry(thetas: &[f64], controls: &[usize], target: usize) -> Result<CircuitSpec> {
    let k = controls.len();
    if thetas.len() != 1 << k {
        return Err(QfinError::LengthMismatch { expected: 1 << k, got: thetas.len() });
    }
    let mut c = CircuitSpec::new(register_width(controls, target));
    if k == 0 {
        c.ry(thetas[0], target)?;
        return Ok(c);
    }
    let steps = thetas.len();
    for (i, &theta) in thetas.iter().enumerate() {
        c.ry(theta, target)?;
        let flipped_bit = if i + 1 < steps { (i + 1).trailing_zeros() as usize } else { k - 1 };
        c.cx(controls[k - 1 - flipped_bit], target)?;
    }
    Ok(c)
}

/// Uniformly controlled rotation from the untransformed angles `alphas`.
pub fn multiplexed_ry(alphas: &[f64], controls: &[usize], target: usize) -> Result<CircuitSpec> {
    uniform_controlled_ry(&transform_angles(alphas)?, controls, target)
}

/// Rotation angle writing `f` into the |1⟩ probability: `2·asin(√f)`.
pub fn ry_angle_for_probability(f: f64) -> f64 {
    2.0 * f.clamp(0.0, 1.0).sqrt().asin()
}

fn validate_distribution(p: &[f64]) -> Result<usize> {
    let len = p.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(QfinError::NotPowerOfTwo(len));
    }
    if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(QfinError::InvalidDistribution(format!("negative or non-finite entry {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(QfinError::InvalidDistribution(format!("probabilities sum to {total}")));
    }
    Ok(len.trailing_zeros() as usize)
}

/// Splitting angles of the binary tree over `p`: entry `k` holds the `2^k`
/// angles for the rotation on qubit `k`, indexed by the value of qubits
/// `0..k`. Empty branches get angle 0.
pub fn splitting_angles(p: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = validate_distribution(p)?;
    let len = p.len();
    Ok((0..n)
        .map(|k| {
            let block = len >> k;
            (0..1usize << k)
                .map(|j| {
                    let chunk = &p[j * block..(j + 1) * block];
                    let whole: f64 = chunk.iter().sum();
                    let upper: f64 = chunk[block / 2..].iter().sum();
                    if whole <= 0.0 {
                        0.0
                    } else {
                        ry_angle_for_probability(upper / whole)
                    }
                })
                .collect()
        })
        .collect())
}

/// Circuit preparing `Σ √p_i |i⟩` from `|0…0⟩` (real, non-negative amplitudes).
pub fn prepare_distribution(p: &[f64]) -> Result<CircuitSpec> {
    let levels = splitting_angles(p)?;
    let n = levels.len();
    let mut c = CircuitSpec::new(n);
    for (k, alphas) in levels.iter().enumerate() {
        let controls: Vec<usize> = (0..k).collect();
        c.append(&multiplexed_ry(alphas, &controls, k)?)?;
    }
    Ok(c)
}
