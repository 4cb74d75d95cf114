//! HHL linear-system solver on the statevector simulator, plus the
//! Markowitz portfolio system and helpers that consume the solution state.
//!
//! Register layout for [`hhl_solve`] with `t` clock qubits and an `s`-qubit
//! system register: qubit 0 is the rotation ancilla, qubits `1..=t` the
//! clock (qubit 1 most significant) and qubits `t+1..=t+s` hold `|b⟩`.
//!
//! Clock values are read in two's complement, so eigenvalues of either sign
//! are inverted as long as `|λ|·τ/2π < 1/2`.

use std::f64::consts::PI;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::CircuitSpec;
use crate::encoding::multiplexed_ry;
use crate::error::{QfinError, Result};
use crate::gates::GateMatrix;
use crate::qft::inverse_qft;
use crate::readout::{Mode, Readout};
use crate::state::{StateVector, MAX_QUBITS};
use crate::swap_test::{swap_test, swap_test_exact};

const HERMITIAN_TOL: f64 = 1e-10;
const MIN_SUCCESS: f64 = 1e-6;
/// Fraction of the smallest nonzero clock eigenvalue used as the inversion constant.
pub const INVERSION_SAFETY: f64 = 0.9;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    matrix: DMatrix<Complex64>,
    rhs: DVector<Complex64>,
    hermitian: bool,
    unknowns: Range<usize>,
}

impl LinearSystem {
    pub fn new(matrix: DMatrix<Complex64>, rhs: DVector<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QfinError::InvalidArgument("matrix must be square".into()));
        }
        if matrix.nrows() != rhs.len() {
            return Err(QfinError::LengthMismatch { expected: matrix.nrows(), got: rhs.len() });
        }
        if matrix.nrows() == 0 {
            return Err(QfinError::InvalidArgument("empty system".into()));
        }
        let hermitian = (&matrix - matrix.adjoint()).iter().all(|z| z.norm() < HERMITIAN_TOL);
        let n = rhs.len();
        Ok(Self { matrix, rhs, hermitian, unknowns: 0..n })
    }

    /// Real system from row slices.
    pub fn real(rows: &[Vec<f64>], rhs: &[f64]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(QfinError::LengthMismatch { expected: n, got: bad.len() });
        }
        let matrix = DMatrix::from_fn(n, n, |i, j| c(rows[i][j]));
        Self::new(matrix, DVector::from_iterator(rhs.len(), rhs.iter().map(|&v| c(v))))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<Complex64> {
        &self.rhs
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// Positions of the caller's unknowns inside the stored (padded or
    /// embedded) solution vector.
    pub fn unknowns(&self) -> Range<usize> {
        self.unknowns.clone()
    }

    /// Extends to the next power of two with identity rows and zero rhs.
    pub fn pad_to_power_of_two(self) -> Self {
        let n = self.dim();
        let padded = n.next_power_of_two();
        if padded == n {
            return self;
        }
        let mut matrix = DMatrix::from_element(padded, padded, c(0.0));
        matrix.view_mut((0, 0), (n, n)).copy_from(&self.matrix);
        for i in n..padded {
            matrix[(i, i)] = c(1.0);
        }
        let mut rhs = DVector::from_element(padded, c(0.0));
        rhs.rows_mut(0, n).copy_from(&self.rhs);
        Self { matrix, rhs, hermitian: self.hermitian, unknowns: self.unknowns }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PortfolioSpec {
    pub covariance: Vec<Vec<f64>>,
    pub returns: Vec<f64>,
    pub prices: Vec<f64>,
    pub gain: f64,
    pub budget: f64,
}

/// Lagrange system for minimum-variance weights hitting `gain` under
/// `budget`:
///
/// ```text
/// | 0  0  Rᵀ | |λ|   |G|
/// | 0  0  Pᵀ | |μ| = |B|
/// | R  P  C  | |w|   |0|
/// ```
///
/// padded to a power of two. Unknowns are ordered `(λ, μ, w₁…w_n)`.
pub fn build_portfolio_system(spec: &PortfolioSpec) -> Result<LinearSystem> {
    let n = spec.returns.len();
    if n == 0 {
        return Err(QfinError::InvalidArgument("no assets".into()));
    }
    if spec.prices.len() != n {
        return Err(QfinError::LengthMismatch { expected: n, got: spec.prices.len() });
    }
    if spec.covariance.len() != n || spec.covariance.iter().any(|r| r.len() != n) {
        return Err(QfinError::LengthMismatch { expected: n, got: spec.covariance.len() });
    }
    for i in 0..n {
        for j in 0..n {
            if (spec.covariance[i][j] - spec.covariance[j][i]).abs() > 1e-12 {
                return Err(QfinError::InvalidArgument("covariance matrix is not symmetric".into()));
            }
        }
    }
    let dim = n + 2;
    let mut rows = vec![vec![0.0; dim]; dim];
    for k in 0..n {
        rows[0][k + 2] = spec.returns[k];
        rows[1][k + 2] = spec.prices[k];
        rows[k + 2][0] = spec.returns[k];
        rows[k + 2][1] = spec.prices[k];
        rows[k + 2][2..].copy_from_slice(&spec.covariance[k]);
    }
    let mut rhs = vec![0.0; dim];
    rhs[0] = spec.gain;
    rhs[1] = spec.budget;
    Ok(LinearSystem::real(&rows, &rhs)?.pad_to_power_of_two())
}

/// `[[0, A], [A†, 0]]` with rhs `(b, 0)`; Hermitian input is returned as is.
/// The unknowns move to the second block.
pub fn hermitian_embed(sys: &LinearSystem) -> LinearSystem {
    if sys.hermitian {
        return sys.clone();
    }
    let n = sys.dim();
    let mut matrix = DMatrix::from_element(2 * n, 2 * n, c(0.0));
    matrix.view_mut((0, n), (n, n)).copy_from(&sys.matrix);
    matrix.view_mut((n, 0), (n, n)).copy_from(&sys.matrix.adjoint());
    let mut rhs = DVector::from_element(2 * n, c(0.0));
    rhs.rows_mut(0, n).copy_from(&sys.rhs);
    LinearSystem { matrix, rhs, hermitian: true, unknowns: n + sys.unknowns.start..n + sys.unknowns.end }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalSolution {
    /// Solution restricted to the caller's unknowns.
    pub solution: Vec<Complex64>,
    pub normalized: Vec<Complex64>,
    /// Ascending eigenvalues of the stored matrix (Hermitian systems only).
    pub eigenvalues: Option<Vec<f64>>,
    /// Ratio of extreme singular values, `|λ|max/|λ|min` for Hermitian input.
    pub condition_number: f64,
}

fn normalize(v: &[Complex64]) -> Vec<Complex64> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|z| z / norm).collect()
}

fn sorted_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    sorted_eigen(m).0
}

/// Direct LU solve with spectral diagnostics.
pub fn classical_solve(sys: &LinearSystem) -> Result<ClassicalSolution> {
    let singular_values = sys.matrix.clone().svd(false, false).singular_values;
    let smax = singular_values.max();
    let smin = singular_values.min();
    if smin <= smax * 1e-12 {
        return Err(QfinError::Singular);
    }
    let x = sys.matrix.clone().lu().solve(&sys.rhs).ok_or(QfinError::Singular)?;
    let solution: Vec<Complex64> = x.as_slice()[sys.unknowns.clone()].to_vec();
    let normalized = normalize(&solution);
    let eigenvalues = sys.hermitian.then(|| hermitian_eigenvalues(&sys.matrix));
    Ok(ClassicalSolution { solution, normalized, eigenvalues, condition_number: smax / smin })
}

/// Upper bound on `|λ|` from Gershgorin discs: the largest absolute row sum.
pub fn gershgorin_bound(m: &DMatrix<Complex64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// How the evolution time `τ` of `U = e^{iAτ}` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeScale {
    Fixed(f64),
    /// Maps the Gershgorin bound on `|λ|` to the top positive clock value.
    Gershgorin,
    /// Maps the spectral radius (from the eigendecomposition that builds the
    /// evolution operators) to the top positive clock value.
    Spectral,
}

/// `τ` placing `bound` on clock value `2^{t−1} − 1`.
pub fn time_scale_for_bound(bound: f64, t: usize) -> f64 {
    let steps = (1u64 << t) as f64;
    2.0 * PI * (steps / 2.0 - 1.0) / (steps * bound.max(f64::MIN_POSITIVE))
}

impl TimeScale {
    pub fn resolve(&self, sys: &LinearSystem, t: usize) -> f64 {
        match *self {
            TimeScale::Fixed(tau) => tau,
            TimeScale::Gershgorin => time_scale_for_bound(gershgorin_bound(&sys.matrix), t),
            TimeScale::Spectral => {
                let radius = hermitian_eigenvalues(&sys.matrix).iter().fold(0.0f64, |m, l| m.max(l.abs()));
                time_scale_for_bound(radius, t)
            }
        }
    }
}

/// Eigenvalue represented by clock value `m` (two's complement over `t` bits).
pub fn clock_eigenvalue(m: usize, t: usize, time_scale: f64) -> f64 {
    let steps = 1i64 << t;
    let signed = if m as i64 >= steps / 2 { m as i64 - steps } else { m as i64 };
    2.0 * PI * signed as f64 / (steps as f64 * time_scale)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HhlResult {
    /// Normalized solution over the caller's unknowns. In sampled mode only
    /// magnitudes are observable and every entry is real non-negative.
    pub solution: Vec<Complex64>,
    /// Same solution scaled back to the original right-hand side, `x = A⁻¹b`.
    pub denormalized: Vec<Complex64>,
    /// Probability of the ancilla reading 1 before post-selection.
    pub success_probability: f64,
    pub clock_qubits: usize,
    pub time_scale: f64,
    pub inversion_constant: f64,
    pub rhs_norm: f64,
    pub backend: String,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub phases_known: bool,
    /// Normalized amplitudes over the whole system register (padding included).
    #[serde(skip)]
    pub register: Vec<Complex64>,
    #[serde(skip)]
    pub unknowns: Range<usize>,
}

impl HhlResult {
    /// System-register state for swap tests.
    pub fn state(&self) -> Result<StateVector> {
        StateVector::from_unnormalized(self.register.clone())
    }
}

/// Unitary whose first column is the normalized `b` (Gram–Schmidt completion).
pub fn state_preparation_unitary(b: &[Complex64]) -> Result<GateMatrix> {
    let n = b.len();
    let first = normalize(b);
    if first.iter().all(|z| z.norm() == 0.0) {
        return Err(QfinError::InvalidArgument("right-hand side is zero".into()));
    }
    let mut columns: Vec<Vec<Complex64>> = vec![first];
    for k in 0..n {
        if columns.len() == n {
            break;
        }
        let mut v: Vec<Complex64> = (0..n).map(|i| c(if i == k { 1.0 } else { 0.0 })).collect();
        for _ in 0..2 {
            for col in &columns {
                let dot: Complex64 = col.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(col).for_each(|(x, y)| *x -= dot * y);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            columns.push(v.iter().map(|z| z / norm).collect());
        }
    }
    let entries = (0..n * n).map(|idx| columns[idx % n][idx / n]).collect();
    GateMatrix::new("prep_b", n, entries)
}

/// `e^{iAτ}` from the eigendecomposition of a Hermitian `A`.
pub fn evolution_operator(a: &DMatrix<Complex64>, tau: f64) -> Result<GateMatrix> {
    let (values, vectors) = sorted_eigen(a);
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        values.len(),
        values.iter().map(|&l| Complex64::from_polar(1.0, l * tau)),
    ));
    let u = &vectors * phases * vectors.adjoint();
    let n = a.nrows();
    GateMatrix::new(format!("exp_iA({tau})"), n, (0..n * n).map(|k| u[(k / n, k % n)]).collect())
}

/// Phase estimation on `1 + t + s` qubits: Hadamards on the clock,
/// controlled `U^{2^k}` with clock qubit `t − k` as control, inverse QFT.
pub fn phase_estimation(a: &DMatrix<Complex64>, t: usize, tau: f64) -> Result<CircuitSpec> {
    let s = a.nrows().trailing_zeros() as usize;
    let system: Vec<usize> = (t + 1..=t + s).collect();
    let mut pe = CircuitSpec::new(1 + t + s);
    for q in 1..=t {
        pe.h(q)?;
    }
    for k in 0..t {
        let power = evolution_operator(a, tau * (1u64 << k) as f64)?.with_label(format!("U^{}", 1u64 << k));
        pe.push_unitary(power, &[t - k], &system)?;
    }
    let clock: Vec<usize> = (1..=t).collect();
    pe.append_mapped(&inverse_qft(t)?, &clock)?;
    Ok(pe)
}

/// Full HHL circuit for `sys` (without measurement).
pub fn hhl_circuit(sys: &LinearSystem, t: usize, tau: f64) -> Result<(CircuitSpec, f64)> {
    let s = sys.dim().trailing_zeros() as usize;
    let b: Vec<Complex64> = sys.rhs.iter().copied().collect();
    let pe = phase_estimation(&sys.matrix, t, tau)?;
    let constant = INVERSION_SAFETY * clock_eigenvalue(1, t, tau);
    let alphas: Vec<f64> = (0..1usize << t)
        .map(|m| {
            let lambda = clock_eigenvalue(m, t, tau);
            if m == 0 {
                0.0
            } else {
                2.0 * (constant / lambda).clamp(-1.0, 1.0).asin()
            }
        })
        .collect();
    let clock: Vec<usize> = (1..=t).collect();
    let system: Vec<usize> = (t + 1..=t + s).collect();
    let mut circuit = CircuitSpec::new(1 + t + s);
    circuit.push_unitary(state_preparation_unitary(&b)?, &[], &system)?;
    circuit.append(&pe)?;
    circuit.append(&multiplexed_ry(&alphas, &clock, 0)?)?;
    circuit.append(&pe.inverse())?;
    Ok((circuit, constant))
}

/// Solves `A x = b` with `t` clock qubits.
///
/// Exact mode reads the
/// post-selected amplitudes; sampled mode estimates their magnitudes from
/// the counts with ancilla 1 and clock 0.
pub fn hhl_solve(sys: &LinearSystem, t: usize, time_scale: TimeScale, mode: Mode) -> Result<HhlResult> {
    if !sys.hermitian {
        return Err(QfinError::NotHermitian);
    }
    if t < 2 {
        return Err(QfinError::InvalidArgument("at least two clock qubits are needed".into()));
    }
    let n = sys.dim();
    if n < 2 || !n.is_power_of_two() {
        return Err(QfinError::NotPowerOfTwo(n));
    }
    let s = n.trailing_zeros() as usize;
    if 1 + t + s > MAX_QUBITS {
        return Err(QfinError::Capacity { requested: 1 + t + s, max: MAX_QUBITS });
    }
    let tau = time_scale.resolve(sys, t);
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(QfinError::InvalidArgument(format!("time scale {tau}")));
    }
    let rhs_norm = sys.rhs.norm();
    let (circuit, constant) = hhl_circuit(sys, t, tau)?;
    let out = circuit.run_from_zero()?;
    let success_probability = out.marginal_probability(0, 1)?;
    if success_probability < MIN_SUCCESS {
        return Err(QfinError::PostSelection { probability: success_probability });
    }
    // Ancilla 1 and clock 0 are the top bit followed by t zeros.
    let offset = 1usize << (t + s);
    let (branch, phases_known): (Vec<Complex64>, bool) = match mode {
        Mode::Exact => (out.amplitudes()[offset..offset + n].to_vec(), true),
        Mode::Sampled { .. } => {
            let freq = Readout::new(mode).distribution(&out)?;
            (freq[offset..offset + n].iter().map(|p| c(p.sqrt())).collect(), false)
        }
    };
    let branch_norm = branch.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if branch_norm == 0.0 {
        return Err(QfinError::PostSelection { probability: 0.0 });
    }
    let register = normalize(&branch);
    let unknowns = sys.unknowns.clone();
    let solution = normalize(&register[unknowns.clone()]);
    // Post-selected amplitudes are C·A⁻¹b̂ (sampled: their magnitudes).
    let denormalized = branch[unknowns.clone()].iter().map(|z| z * rhs_norm / constant).collect();
    let seed = match mode {
        Mode::Exact => None,
        Mode::Sampled { seed, .. } => Some(seed),
    };
    Ok(HhlResult {
        solution,
        denormalized,
        success_probability,
        clock_qubits: t,
        time_scale: tau,
        inversion_constant: constant,
        rhs_norm,
        backend: mode.tag().into(),
        shots: mode.shots(),
        seed,
        phases_known,
        register,
        unknowns,
    })
}

/// The fixed 5-qubit circuit for `[[1.5, 0.5], [0.5, 1.5]] x = (cos θ, sin θ)`:
/// qubits 0 and 1 form the clock, 2 holds the system, 3 is the ancilla and 4
/// is idle. Evolution blocks use `A = 0.5·X + 1.5·I`, the inversion uses
/// `r = 2.65`.
pub fn hhl_2x2_circuit(theta: f64) -> Result<CircuitSpec> {
    let r = 2.65f64;
    let mut c = CircuitSpec::new(5);
    c.h(0)?.h(1)?;
    c.ry(2.0 * theta.cos().acos(), 2)?;
    c.push("u1", &[3.0 * PI / 2.0], &[], &[0])?;
    c.push("rx", &[-PI], &[0], &[2])?;
    c.push("u1", &[3.0 * PI / 4.0], &[], &[1])?;
    c.push("rx", &[-PI / 2.0], &[1], &[2])?;
    c.swap(0, 1)?;
    c.h(1)?;
    c.push("u1", &[-PI / 2.0], &[0], &[1])?;
    c.h(0)?;
    c.swap(0, 1)?;
    c.push("ry", &[2.0 * PI / 2f64.powf(r)], &[0], &[3])?;
    c.push("ry", &[PI / 2f64.powf(r)], &[1], &[3])?;
    c.swap(0, 1)?;
    c.h(0)?;
    c.push("u1", &[PI / 2.0], &[0], &[1])?;
    c.h(1)?;
    c.swap(0, 1)?;
    c.push("rx", &[PI / 2.0], &[1], &[2])?;
    c.push("u1", &[-3.0 * PI / 4.0], &[], &[1])?;
    c.push("rx", &[PI], &[0], &[2])?;
    c.push("u1", &[-3.0 * PI / 2.0], &[], &[0])?;
    c.h(0)?.h(1)?;
    Ok(c)
}

/// Runs [`hhl_2x2_circuit`] and returns the magnitudes of the normalized
/// solution from the outcomes `q3 = 1`, `q0 = q1 = q4 = 0`.
pub fn hhl_2x2_reference(theta: f64, mode: Mode) -> Result<HhlResult> {
    if !(theta > 0.0 && theta < PI / 2.0) {
        return Err(QfinError::InvalidArgument(format!("θ = {theta} outside (0, π/2)")));
    }
    let out = hhl_2x2_circuit(theta)?.run_from_zero()?;
    let freq = Readout::new(mode).distribution(&out)?;
    // Bit order q0 q1 q2 q3 q4: 00010 and 00110.
    let (p0, p1) = (freq[0b00010], freq[0b00110]);
    let total = p0 + p1;
    if total <= 0.0 {
        return Err(QfinError::PostSelection { probability: total });
    }
    let solution = vec![c((p0 / total).sqrt()), c((p1 / total).sqrt())];
    let seed = match mode {
        Mode::Exact => None,
        Mode::Sampled { seed, .. } => Some(seed),
    };
    Ok(HhlResult {
        denormalized: solution.clone(),
        register: solution.clone(),
        solution,
        success_probability: out.marginal_probability(3, 1)?,
        clock_qubits: 2,
        time_scale: PI / 2.0,
        inversion_constant: f64::NAN,
        rhs_norm: 1.0,
        backend: mode.tag().into(),
        shots: mode.shots(),
        seed,
        phases_known: false,
        unknowns: 0..2,
    })
}

/// `|x_index|` of the normalized solution: read directly in exact mode,
/// otherwise by a swap test against the basis state `|index⟩`.
pub fn extract_component(result: &HhlResult, index: usize, mode: Mode) -> Result<f64> {
    let pos = result.unknowns.start + index;
    if pos >= result.unknowns.end {
        return Err(QfinError::InvalidArgument(format!("component {index} out of range")));
    }
    let state = result.state()?;
    let basis = StateVector::basis_state(state.num_qubits(), pos)?;
    match mode {
        Mode::Exact => swap_test_exact(&state, &basis),
        Mode::Sampled { shots, seed } => swap_test(&state, &basis, shots, seed),
    }
}

/// `|⟨x_opt|x_current⟩|` by swap test (or exactly). `current` covers either
/// the caller's unknowns or the whole register and is normalized here.
pub fn portfolio_similarity(result: &HhlResult, current: &[Complex64], mode: Mode) -> Result<f64> {
    let dim = result.register.len();
    let full: Vec<Complex64> = if current.len() == dim {
        current.to_vec()
    } else if current.len() == result.unknowns.len() {
        let mut v = vec![c(0.0); dim];
        v[result.unknowns.clone()].copy_from_slice(current);
        v
    } else {
        return Err(QfinError::LengthMismatch { expected: result.unknowns.len(), got: current.len() });
    };
    let other = StateVector::from_unnormalized(full)?;
    let state = result.state()?;
    match mode {
        Mode::Exact => swap_test_exact(&state, &other),
        Mode::Sampled { shots, seed } => swap_test(&state, &other, shots, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_system() -> LinearSystem {
        let rows = vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 2.0, 0.0, 0.0],
            vec![0.0, 0.0, 3.0, 0.0],
            vec![0.0, 0.0, 0.0, 4.0],
        ];
        LinearSystem::real(&rows, &[1.0, 1.0, 1.0, 1.0]).unwrap()
    }

    fn assert_close(a: &[Complex64], b: &[Complex64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn padding_and_embedding_shapes() {
        let sys =
            LinearSystem::real(&[vec![2.0, 0.0, 0.0], vec![0.0, 3.0, 0.0], vec![0.0, 0.0, 4.0]], &[1.0, 1.0, 1.0])
                .unwrap()
                .pad_to_power_of_two();
        assert_eq!(sys.dim(), 4);
        assert_eq!(sys.matrix()[(3, 3)], c(1.0));
        assert_eq!(sys.unknowns(), 0..3);

        let a = LinearSystem::real(&[vec![0.0, 1.0], vec![0.0, 0.0]], &[1.0, 0.0]).unwrap();
        assert!(!a.is_hermitian());
        let e = hermitian_embed(&a);
        assert!(e.is_hermitian() && e.dim() == 4 && e.unknowns() == (2..4));
        assert_eq!(hermitian_embed(&diag_system()), diag_system());
    }

    #[test]
    fn embedding_spectrum_is_plus_minus_singular_values() {
        let a = LinearSystem::real(&[vec![1.0, 2.0], vec![0.5, -1.0]], &[1.0, 0.0]).unwrap();
        let sv = a.matrix().clone().svd(false, false).singular_values;
        let mut expected: Vec<f64> = sv.iter().flat_map(|s| [*s, -*s]).collect();
        expected.sort_by(f64::total_cmp);
        let got = hermitian_eigenvalues(hermitian_embed(&a).matrix());
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_examples() {
        let th = PI / 4.0;
        let sys = LinearSystem::real(&[vec![1.5, 0.5], vec![0.5, 1.5]], &[th.cos(), th.sin()]).unwrap();
        let sol = classical_solve(&sys).unwrap();
        assert_close(&sol.normalized, &[c(0.5f64.sqrt()), c(0.5f64.sqrt())], 1e-12);
        assert!((sol.condition_number - 2.0).abs() < 1e-12);
        let singular = LinearSystem::real(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 0.0]).unwrap();
        assert_eq!(classical_solve(&singular), Err(QfinError::Singular));
    }

    #[test]
    fn portfolio_degenerate_when_returns_equal_prices() {
        let spec = PortfolioSpec {
            covariance: vec![vec![0.1, 0.0], vec![0.0, 0.2]],
            returns: vec![1.0, 1.0],
            prices: vec![1.0, 1.0],
            gain: 0.0,
            budget: 1.0,
        };
        let sys = build_portfolio_system(&spec).unwrap();
        assert_eq!(classical_solve(&sys), Err(QfinError::Singular));
        let bad = PortfolioSpec { prices: vec![1.0], ..spec };
        assert!(build_portfolio_system(&bad).is_err());
    }

    #[test]
    fn preparation_unitary_maps_zero_to_b() {
        let b = [c(0.3), Complex64::new(0.0, -0.4), c(0.0), c(0.5)];
        let u = state_preparation_unitary(&b).unwrap();
        assert!(u.is_unitary());
        let norm = (0.09f64 + 0.16 + 0.25).sqrt();
        for (i, z) in b.iter().enumerate() {
            assert!((u.get(i, 0) - z / norm).norm() < 1e-12);
        }
    }

    #[test]
    fn phase_register_reads_representable_eigenvalues() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(3.0)]));
        let t = 3;
        let tau = 2.0 * PI / 8.0;
        for (index, expected) in [(0usize, 1usize), (1, 3)] {
            let input = StateVector::basis_state(1 + t + 1, index).unwrap();
            let out = phase_estimation(&a, t, tau).unwrap().run(&input).unwrap();
            let want = expected << 1 | index;
            assert!((out.amplitudes()[want].norm() - 1.0).abs() < 1e-10);
        }
        // A negative eigenvalue lands on its two's-complement code.
        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![c(-2.0), c(1.0)]));
        let out = phase_estimation(&neg, t, tau).unwrap().run(&StateVector::zero_state(5).unwrap()).unwrap();
        assert!((out.amplitudes()[6 << 1].norm() - 1.0).abs() < 1e-10);
        assert!((clock_eigenvalue(6, t, tau) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn diag_system_exact() {
        let r = hhl_solve(&diag_system(), 4, TimeScale::Fixed(2.0 * PI / 16.0), Mode::Exact).unwrap();
        let expected = normalize(&[c(1.0), c(0.5), c(1.0 / 3.0), c(0.25)]);
        assert_close(&r.solution, &expected, 1e-9);
        assert_close(&r.denormalized, &[c(1.0), c(0.5), c(1.0 / 3.0), c(0.25)], 1e-9);
        // Σ |β_i C/λ_i|² with β_i = 1/2.
        let cst = r.inversion_constant;
        let predicted: f64 = [1.0, 2.0, 3.0, 4.0].iter().map(|l: &f64| (0.5 * cst / l).powi(2)).sum();
        assert!((r.success_probability - predicted).abs() < 1e-9);
    }

    #[test]
    fn requires_hermitian_input() {
        let a = LinearSystem::real(&[vec![0.0, 1.0], vec![0.0, 0.0]], &[1.0, 0.0]).unwrap();
        assert_eq!(hhl_solve(&a, 3, TimeScale::Gershgorin, Mode::Exact), Err(QfinError::NotHermitian));
        assert!(hhl_solve(&diag_system(), 1, TimeScale::Gershgorin, Mode::Exact).is_err());
    }

    #[test]
    fn reference_circuit_symmetric_case() {
        let r = hhl_2x2_reference(PI / 4.0, Mode::Exact).unwrap();
        assert_close(&r.solution, &[c(0.5f64.sqrt()), c(0.5f64.sqrt())], 1e-9);
        assert!(hhl_2x2_reference(2.0, Mode::Exact).is_err());
    }

    #[test]
    fn component_and_similarity() {
        let r = hhl_solve(&diag_system(), 4, TimeScale::Fixed(2.0 * PI / 16.0), Mode::Exact).unwrap();
        assert!((extract_component(&r, 0, Mode::Exact).unwrap() - 0.8381).abs() < 1e-4);
        let same = portfolio_similarity(&r, &r.solution, Mode::Exact).unwrap();
        assert!((same - 1.0).abs() < 1e-9);
        let orth = [c(0.0), c(0.0), c(0.25), c(-1.0 / 3.0)];
        assert!(portfolio_similarity(&r, &orth, Mode::Exact).unwrap() < 1e-6);
        assert!(extract_component(&r, 4, Mode::Exact).is_err());
    }
}
