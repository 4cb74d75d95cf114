//! Dense statevector over `n` qubits.
//!
//! # Bit ordering
//!
//! Basis index `i` is read with **qubit 0 as the most significant bit**:
//! for three qubits, `|q0 q1 q2⟩ = |1 0 1⟩` is basis index 5. Bitstrings
//! printed or parsed by this crate always list qubit 0 first, so the string
//! `"101"` is index 5.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QfinError, Result};
use crate::gates::GateMatrix;

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// Identifier of the generator behind every seeded draw in the crate.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.3, seed_from_u64)";

const NORM_TOL: f64 = 1e-9;
const NORM_FAIL: f64 = 1e-6;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Seeded generator used for all sampling.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

/// Outcome histogram of repeated measurements of the whole register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementCounts {
    pub num_qubits: usize,
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
}

impl MeasurementCounts {
    pub fn frequency(&self, bitstring: &str) -> f64 {
        self.counts.get(bitstring).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    /// Relative frequency of `value` on `qubit`.
    pub fn marginal_frequency(&self, qubit: usize, value: u8) -> f64 {
        let want = if value == 0 { b'0' } else { b'1' };
        let hits: u64 = self.counts.iter().filter(|(k, _)| k.as_bytes()[qubit] == want).map(|(_, v)| *v).sum();
        hits as f64 / self.shots as f64
    }
}

/// Formats a basis index as a bitstring with qubit 0 first.
pub fn index_to_bitstring(index: usize, num_qubits: usize) -> String {
    (0..num_qubits).map(|q| if index >> (num_qubits - 1 - q) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Parses a bitstring with qubit 0 first.
pub fn bitstring_to_index(bits: &str) -> Result<usize> {
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok(acc << 1 | 1),
        other => Err(QfinError::Parse(format!("invalid bit `{other}` in `{bits}`"))),
    })
}

fn check_capacity(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(QfinError::Capacity { requested: n, max: MAX_QUBITS });
    }
    Ok(())
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero_state(n: usize) -> Result<Self> {
        check_capacity(n)?;
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits: n, amplitudes })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        check_capacity(n)?;
        if index >= 1 << n {
            return Err(QfinError::InvalidArgument(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits: n, amplitudes })
    }

    /// Wraps an amplitude vector. The norm must be 1 within 1e-9.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QfinError::NotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        check_capacity(n)?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QfinError::NormDrift { norm });
        }
        Ok(Self { num_qubits: n, amplitudes })
    }

    /// Normalizes an arbitrary non-zero vector into a state.
    pub fn from_unnormalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QfinError::InvalidArgument("cannot normalize a zero vector".into()));
        }
        Self::from_amplitudes(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Real amplitude vector convenience constructor (normalizes).
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::from_unnormalized(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(QfinError::LengthMismatch { expected: self.num_qubits, got: other.num_qubits });
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Tensor product `self ⊗ other`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        check_capacity(self.num_qubits + other.num_qubits)?;
        let mut amplitudes = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(StateVector { num_qubits: self.num_qubits + other.num_qubits, amplitudes })
    }

    #[inline]
    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(QfinError::QubitOutOfRange { index: qubit, num_qubits: self.num_qubits });
        }
        Ok(())
    }

    fn check_operands(&self, gate: &GateMatrix, controls: &[usize], targets: &[usize]) -> Result<()> {
        if targets.is_empty() || gate.dim() != 1 << targets.len() {
            return Err(QfinError::DimensionMismatch { gate_dim: gate.dim(), num_targets: targets.len() });
        }
        let mut seen = 0usize;
        for &q in controls.iter().chain(targets) {
            self.check_qubit(q)?;
            if seen & (1 << q) != 0 {
                return Err(QfinError::DuplicateQubit(q));
            }
            seen |= 1 << q;
        }
        if !gate.is_unitary() {
            return Err(QfinError::NotUnitary(gate.label().to_string()));
        }
        Ok(())
    }

    /// Applies `gate` to `targets`, identity elsewhere.
    pub fn apply_unitary(&mut self, gate: &GateMatrix, targets: &[usize]) -> Result<()> {
        self.apply_controlled(gate, &[], targets)
    }

    /// Applies `gate` to `targets` on the subspace where every control qubit is 1.
    pub fn apply_controlled(&mut self, gate: &GateMatrix, controls: &[usize], targets: &[usize]) -> Result<()> {
        self.check_operands(gate, controls, targets)?;
        let control_mask: usize = controls.iter().map(|&q| self.mask(q)).sum();
        let target_masks: Vec<usize> = targets.iter().map(|&q| self.mask(q)).collect();
        match target_masks.len() {
            1 => self.kernel_1q(gate, control_mask, target_masks[0]),
            _ => self.kernel_general(gate, control_mask, &target_masks),
        }
        self.check_norm()
    }

    fn kernel_1q(&mut self, gate: &GateMatrix, control_mask: usize, tmask: usize) {
        let (g00, g01, g10, g11) = (gate.get(0, 0), gate.get(0, 1), gate.get(1, 0), gate.get(1, 1));
        let len = self.amplitudes.len();
        for i0 in 0..len {
            if i0 & tmask != 0 || i0 & control_mask != control_mask {
                continue;
            }
            let i1 = i0 | tmask;
            let (a0, a1) = (self.amplitudes[i0], self.amplitudes[i1]);
            self.amplitudes[i0] = g00 * a0 + g01 * a1;
            self.amplitudes[i1] = g10 * a0 + g11 * a1;
        }
    }

    fn kernel_general(&mut self, gate: &GateMatrix, control_mask: usize, tmasks: &[usize]) {
        let k = tmasks.len();
        let dim = 1 << k;
        let all_targets: usize = tmasks.iter().sum();
        // Offsets of each local basis state; the first target is the local MSB.
        let offsets: Vec<usize> =
            (0..dim).map(|local| (0..k).filter(|&j| local >> (k - 1 - j) & 1 == 1).map(|j| tmasks[j]).sum()).collect();
        let mut gathered = vec![ZERO; dim];
        let len = self.amplitudes.len();
        for base in 0..len {
            if base & all_targets != 0 || base & control_mask != control_mask {
                continue;
            }
            for (g, off) in gathered.iter_mut().zip(&offsets) {
                *g = self.amplitudes[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = ZERO;
                for (col, g) in gathered.iter().enumerate() {
                    acc += gate.get(r, col) * g;
                }
                self.amplitudes[base | off] = acc;
            }
        }
    }

    fn check_norm(&mut self) -> Result<()> {
        let norm = self.norm();
        let drift = (norm - 1.0).abs();
        if drift > NORM_FAIL || !norm.is_finite() {
            return Err(QfinError::NormDrift { norm });
        }
        if drift > NORM_TOL {
            for a in &mut self.amplitudes {
                *a /= norm;
            }
        }
        Ok(())
    }

    /// `|amplitude_i|²` for every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Probability that `qubit` reads `value`, taken relative to the total
    /// norm so a branch holding all the weight reads exactly 1.
    pub fn marginal_probability(&self, qubit: usize, value: u8) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let want = if value == 0 { 0 } else { mask };
        let (mut hit, mut miss) = (0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i & mask == want {
                hit += a.norm_sqr();
            } else {
                miss += a.norm_sqr();
            }
        }
        Ok(hit / (hit + miss))
    }

    /// Projects `qubit` onto `value` and renormalizes. Returns the new state
    /// and the probability of the selected branch.
    pub fn post_select(&self, qubit: usize, value: u8) -> Result<(StateVector, f64)> {
        let probability = self.marginal_probability(qubit, value)?;
        if probability <= 1e-12 {
            return Err(QfinError::PostSelection { probability });
        }
        let mask = self.mask(qubit);
        let want = if value == 0 { 0 } else { mask };
        let scale = 1.0 / probability.sqrt();
        let amplitudes =
            self.amplitudes.iter().enumerate().map(|(i, a)| if i & mask == want { a * scale } else { ZERO }).collect();
        Ok((StateVector { num_qubits: self.num_qubits, amplitudes }, probability))
    }

    /// Draws `shots` full-register measurements from a generator seeded with `seed`.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<MeasurementCounts> {
        let mut rng = seeded_rng(seed);
        let mut counts = self.sample_with(shots, &mut rng)?;
        counts.seed = seed;
        Ok(counts)
    }

    /// Like [`StateVector::sample`] but drawing from a caller-owned generator.
    pub fn sample_with<R: Rng>(&self, shots: u64, rng: &mut R) -> Result<MeasurementCounts> {
        if shots == 0 {
            return Err(QfinError::ZeroShots);
        }
        let cumulative: Vec<f64> = self
            .amplitudes
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a.norm_sqr();
                Some(*acc)
            })
            .collect();
        let total = *cumulative.last().unwrap();
        let mut hist = vec![0u64; cumulative.len()];
        for _ in 0..shots {
            let u: f64 = rng.gen::<f64>() * total;
            // First index whose cumulative mass exceeds u; zero-probability
            // outcomes share their predecessor's cumulative value and are skipped.
            let idx = cumulative.partition_point(|&c| c <= u).min(cumulative.len() - 1);
            hist[idx] += 1;
        }
        let counts = hist
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (index_to_bitstring(i, self.num_qubits), c))
            .collect();
        Ok(MeasurementCounts { num_qubits: self.num_qubits, counts, shots, seed: 0 })
    }
}
