//! Gate matrices: the fixed single- and multi-qubit gates, parametric
//! rotations, the QFT phase gates `R_k`, and constructors for tensor
//! products and controlled versions.
//!
//! All angles are radians. Matrices act on the target qubits in the order
//! they are listed, the first target being the most significant bit of the
//! gate's local index (the same convention [`crate::state::StateVector`]
//! uses for the full register).

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::{QfinError, Result};

/// Entry-wise tolerance of the unitarity check.
pub const UNITARY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A square complex matrix of power-of-two dimension with a symbolic label.
#[derive(Clone, PartialEq)]
pub struct GateMatrix {
    dim: usize,
    entries: Vec<Complex64>,
    label: String,
}

impl fmt::Debug for GateMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "GateMatrix({}, dim={})", self.label, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl GateMatrix {
    /// Builds a matrix from row-major entries. The dimension must be a power of two.
    pub fn new(label: impl Into<String>, dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(QfinError::NotPowerOfTwo(dim));
        }
        if entries.len() != dim * dim {
            return Err(QfinError::LengthMismatch { expected: dim * dim, got: entries.len() });
        }
        Ok(Self { dim, entries, label: label.into() })
    }

    fn from_rows<const D: usize>(label: impl Into<String>, rows: [[Complex64; D]; D]) -> Self {
        Self { dim: D, entries: rows.iter().flat_map(|r| r.iter().copied()).collect(), label: label.into() }
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = ONE;
        }
        let label = if dim == 2 { "i".to_string() } else { format!("id{dim}") };
        Self { dim, entries, label }
    }

    /// Builds a diagonal matrix.
    pub fn diagonal(label: impl Into<String>, diag: &[Complex64]) -> Result<Self> {
        let dim = diag.len();
        let mut entries = vec![ZERO; dim * dim];
        for (i, d) in diag.iter().enumerate() {
            entries[i * dim + i] = *d;
        }
        Self::new(label, dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits the matrix acts on.
    pub fn num_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn matmul(&self, other: &GateMatrix) -> Result<GateMatrix> {
        if self.dim != other.dim {
            return Err(QfinError::LengthMismatch { expected: self.dim, got: other.dim });
        }
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    out[r * d + c] += a * other.entries[k * d + c];
                }
            }
        }
        Ok(GateMatrix { dim: d, entries: out, label: format!("{}*{}", self.label, other.label) })
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> GateMatrix {
        let d = self.dim;
        let mut out = vec![ZERO; d * d];
        for r in 0..d {
            for c in 0..d {
                out[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        GateMatrix { dim: d, entries: out, label: format!("{}^dg", self.label) }
    }

    /// Largest entry-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &GateMatrix) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// True iff `‖G·G† − I‖_max < 1e-10`.
    pub fn is_unitary(&self) -> bool {
        let d = self.dim;
        for r in 0..d {
            for c in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += self.entries[r * d + k] * self.entries[c * d + k].conj();
                }
                let expected = if r == c { ONE } else { ZERO };
                if (acc - expected).norm() >= UNITARY_TOL {
                    return false;
                }
            }
        }
        true
    }

    /// Equality up to a global phase factor, entry-wise within `tol`.
    pub fn equal_up_to_global_phase(&self, other: &GateMatrix, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        // Fix the phase from the entry of largest modulus.
        let (idx, _) =
            self.entries
                .iter()
                .enumerate()
                .fold((0, 0.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
        let a = self.entries[idx];
        let b = other.entries[idx];
        if b.norm() < tol {
            return false;
        }
        let phase = a / b;
        let phase = phase / phase.norm();
        self.entries.iter().zip(&other.entries).all(|(x, y)| (x - phase * y).norm() < tol)
    }
}

/// Same as [`GateMatrix::is_unitary`].
pub fn check_unitary(gate: &GateMatrix) -> bool {
    gate.is_unitary()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

pub fn x() -> GateMatrix {
    GateMatrix::from_rows("x", [[ZERO, ONE], [ONE, ZERO]])
}

pub fn y() -> GateMatrix {
    GateMatrix::from_rows("y", [[ZERO, -I], [I, ZERO]])
}

pub fn z() -> GateMatrix {
    GateMatrix::from_rows("z", [[ONE, ZERO], [ZERO, -ONE]])
}

pub fn h() -> GateMatrix {
    let s = c(FRAC_1_SQRT_2, 0.0);
    GateMatrix::from_rows("h", [[s, s], [s, -s]])
}

/// Square root of X: `|+⟩⟨+| + i|−⟩⟨−|`.
pub fn sx() -> GateMatrix {
    let p = c(0.5, 0.5);
    let m = c(0.5, -0.5);
    GateMatrix::from_rows("sx", [[p, m], [m, p]])
}

pub fn s() -> GateMatrix {
    GateMatrix::from_rows("s", [[ONE, ZERO], [ZERO, I]])
}

pub fn sdg() -> GateMatrix {
    GateMatrix::from_rows("sdg", [[ONE, ZERO], [ZERO, -I]])
}

pub fn t() -> GateMatrix {
    GateMatrix::from_rows("t", [[ONE, ZERO], [ZERO, phase(PI / 4.0)]])
}

pub fn tdg() -> GateMatrix {
    GateMatrix::from_rows("tdg", [[ONE, ZERO], [ZERO, phase(-PI / 4.0)]])
}

pub fn rx(alpha: f64) -> GateMatrix {
    let (s, co) = (alpha / 2.0).sin_cos();
    GateMatrix::from_rows(format!("rx({alpha})"), [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
}

pub fn ry(alpha: f64) -> GateMatrix {
    let (s, co) = (alpha / 2.0).sin_cos();
    GateMatrix::from_rows(format!("ry({alpha})"), [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
}

pub fn rz(alpha: f64) -> GateMatrix {
    GateMatrix::from_rows(format!("rz({alpha})"), [[phase(-alpha / 2.0), ZERO], [ZERO, phase(alpha / 2.0)]])
}

pub fn u1(lambda: f64) -> GateMatrix {
    GateMatrix::from_rows(format!("u1({lambda})"), [[ONE, ZERO], [ZERO, phase(lambda)]])
}

pub fn u2(phi: f64, lambda: f64) -> GateMatrix {
    let s = FRAC_1_SQRT_2;
    GateMatrix::from_rows(
        format!("u2({phi},{lambda})"),
        [[c(s, 0.0), -phase(lambda) * s], [phase(phi) * s, phase(phi + lambda) * s]],
    )
}

pub fn u3(theta: f64, phi: f64, lambda: f64) -> GateMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    GateMatrix::from_rows(
        format!("u3({theta},{phi},{lambda})"),
        [[c(co, 0.0), -phase(lambda) * s], [phase(phi) * s, phase(phi + lambda) * co]],
    )
}

pub fn swap() -> GateMatrix {
    GateMatrix::from_rows(
        "swap",
        [[ONE, ZERO, ZERO, ZERO], [ZERO, ZERO, ONE, ZERO], [ZERO, ONE, ZERO, ZERO], [ZERO, ZERO, ZERO, ONE]],
    )
}

pub fn cnot() -> GateMatrix {
    controlled(&x(), 1).with_label("cx")
}

pub fn cz() -> GateMatrix {
    controlled(&z(), 1).with_label("cz")
}

pub fn ccnot() -> GateMatrix {
    controlled(&x(), 2).with_label("ccx")
}

pub fn cswap() -> GateMatrix {
    controlled(&swap(), 1).with_label("cswap")
}

/// QFT phase gate `diag(1, e^{2πi/2^k})`.
pub fn rk_gate(k: u32) -> Result<GateMatrix> {
    if k < 1 {
        return Err(QfinError::InvalidArgument(format!("R_k requires k >= 1, got {k}")));
    }
    let angle = 2.0 * PI / 2f64.powi(k as i32);
    Ok(GateMatrix::from_rows(format!("r{k}"), [[ONE, ZERO], [ZERO, phase(angle)]]))
}

/// Kronecker product `a ⊗ b`; `a` acts on the more significant qubits.
pub fn tensor(a: &GateMatrix, b: &GateMatrix) -> GateMatrix {
    let (da, db) = (a.dim, b.dim);
    let d = da * db;
    let mut out = vec![ZERO; d * d];
    for ar in 0..da {
        for ac in 0..da {
            let av = a.get(ar, ac);
            if av == ZERO {
                continue;
            }
            for br in 0..db {
                for bc in 0..db {
                    out[(ar * db + br) * d + ac * db + bc] = av * b.get(br, bc);
                }
            }
        }
    }
    GateMatrix { dim: d, entries: out, label: format!("{}(x){}", a.label, b.label) }
}

/// Block matrix `[[I, 0], [0, gate]]`, iterated `num_controls` times.
///
/// The control qubits come first (most significant) in the resulting
/// matrix's local index.
pub fn controlled(gate: &GateMatrix, num_controls: usize) -> GateMatrix {
    let mut cur = gate.clone();
    for _ in 0..num_controls {
        let d = cur.dim;
        let nd = 2 * d;
        let mut out = vec![ZERO; nd * nd];
        for i in 0..d {
            out[i * nd + i] = ONE;
        }
        for r in 0..d {
            for col in 0..d {
                out[(d + r) * nd + d + col] = cur.get(r, col);
            }
        }
        cur = GateMatrix { dim: nd, entries: out, label: format!("c{}", cur.label) };
    }
    cur
}

/// Looks up a gate by name. Names are case-insensitive; parameters are radians
/// (for `rk` the single parameter is the integer `k`).
pub fn standard_gate(name: &str, params: &[f64]) -> Result<GateMatrix> {
    let lname = name.to_ascii_lowercase();
    let arity = match lname.as_str() {
        "i" | "id" | "x" | "y" | "z" | "h" | "sx" | "s" | "sdg" | "t" | "tdg" | "cx" | "cnot" | "cz" | "swap"
        | "ccx" | "ccnot" | "toffoli" | "cswap" | "fredkin" => 0,
        "rx" | "ry" | "rz" | "u1" | "rk" => 1,
        "u2" => 2,
        "u3" => 3,
        _ => return Err(QfinError::UnknownGate(name.to_string())),
    };
    if params.len() != arity {
        return Err(QfinError::ParameterCount { name: name.to_string(), expected: arity, got: params.len() });
    }
    Ok(match lname.as_str() {
        "i" | "id" => GateMatrix::identity(2),
        "x" => x(),
        "y" => y(),
        "z" => z(),
        "h" => h(),
        "sx" => sx(),
        "s" => s(),
        "sdg" => sdg(),
        "t" => t(),
        "tdg" => tdg(),
        "cx" | "cnot" => cnot(),
        "cz" => cz(),
        "swap" => swap(),
        "ccx" | "ccnot" | "toffoli" => ccnot(),
        "cswap" | "fredkin" => cswap(),
        "rx" => rx(params[0]),
        "ry" => ry(params[0]),
        "rz" => rz(params[0]),
        "u1" => u1(params[0]),
        "rk" => {
            let k = params[0];
            if k.fract() != 0.0 || k < 1.0 {
                return Err(QfinError::InvalidArgument(format!("R_k requires integer k >= 1, got {k}")));
            }
            rk_gate(k as u32)?
        }
        "u2" => u2(params[0], params[1]),
        "u3" => u3(params[0], params[1], params[2]),
        _ => unreachable!(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(rows: [[(f64, f64); 2]; 2]) -> GateMatrix {
        GateMatrix::from_rows("m", rows.map(|r| r.map(|(a, b)| c(a, b))))
    }

    #[test]
    fn hadamard_entries() {
        let s = FRAC_1_SQRT_2;
        let expected = m2([[(s, 0.0), (s, 0.0)], [(s, 0.0), (-s, 0.0)]]);
        assert!(h().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn sqrt_x_squares_to_x() {
        assert!(sx().matmul(&sx()).unwrap().max_abs_diff(&x()) < 1e-12);
    }

    #[test]
    fn ry_on_zero_gives_half_angle_amplitudes() {
        let a = 0.83;
        let g = ry(a);
        assert!((g.get(0, 0).re - (a / 2.0).cos()).abs() < 1e-15);
        assert!((g.get(1, 0).re - (a / 2.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn rk_matches_named_gates_and_u1() {
        assert!(rk_gate(1).unwrap().max_abs_diff(&z()) < 1e-15);
        assert!(rk_gate(2).unwrap().max_abs_diff(&s()) < 1e-15);
        assert!(rk_gate(3).unwrap().max_abs_diff(&t()) < 1e-15);
        for k in 1..8 {
            let u = u1(2.0 * PI / 2f64.powi(k as i32));
            assert!(rk_gate(k).unwrap().max_abs_diff(&u) < 1e-15);
        }
        assert!(rk_gate(0).is_err());
    }

    #[test]
    fn tensor_is_ordered() {
        let hh = tensor(&h(), &h());
        for r in 0..4 {
            for col in 0..4 {
                let sign = if ((r & col) as u32).count_ones().is_multiple_of(2) { 0.5 } else { -0.5 };
                assert!((hh.get(r, col) - c(sign, 0.0)).norm() < 1e-15);
            }
        }
        let xi = tensor(&x(), &GateMatrix::identity(2));
        let ix = tensor(&GateMatrix::identity(2), &x());
        assert!(xi.max_abs_diff(&ix) > 0.5);
        // I⊗X maps |00⟩ to |01⟩.
        assert_eq!(ix.get(1, 0), ONE);
    }

    #[test]
    fn controlled_blocks() {
        let cx = controlled(&x(), 1);
        let expected = [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0]];
        for r in 0..4 {
            for col in 0..4 {
                assert_eq!(cx.get(r, col), c(expected[r][col], 0.0));
            }
        }
        let ccx = controlled(&x(), 2);
        for r in 0..4 {
            for col in 0..4 {
                assert_eq!(ccx.get(4 + r, 4 + col), cx.get(r, col));
            }
        }
        let czm = controlled(&z(), 1);
        assert_eq!(czm.get(3, 3), -ONE);
        let csw = controlled(&swap(), 1);
        assert_eq!(csw.get(5, 6), ONE);
        assert_eq!(csw.get(6, 5), ONE);
    }

    #[test]
    fn unitarity_check() {
        assert!(check_unitary(&h()));
        assert!(!check_unitary(&m2([[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (2.0, 0.0)]])));
        // U3(0.3, 1.1, -0.7) times its adjoint, multiplied out by hand below.
        let u = u3(0.3, 1.1, -0.7);
        let prod = u.matmul(&u.adjoint()).unwrap();
        assert!(prod.max_abs_diff(&GateMatrix::identity(2)) < 1e-12);
        assert!(check_unitary(&u));
    }

    #[test]
    fn self_inverse_gates() {
        for g in [GateMatrix::identity(2), x(), y(), z(), h(), cnot(), cz(), swap(), ccnot(), cswap()] {
            let sq = g.matmul(&g).unwrap();
            assert!(sq.max_abs_diff(&GateMatrix::identity(g.dim())) < 1e-12, "{}", g.label());
        }
    }

    #[test]
    fn rotation_composition_and_adjoint() {
        let (a, b) = (0.37, -1.91);
        for rot in [rx as fn(f64) -> GateMatrix, ry, rz] {
            let lhs = rot(a).matmul(&rot(b)).unwrap();
            assert!(lhs.max_abs_diff(&rot(a + b)) < 1e-12);
            assert!(rot(a).adjoint().max_abs_diff(&rot(-a)) < 1e-12);
        }
    }

    #[test]
    fn u_gate_specialisations() {
        let (phi, lam) = (0.4, 2.2);
        assert!(u1(lam).max_abs_diff(&u3(0.0, 0.0, lam)) < 1e-15);
        assert!(u2(phi, lam).max_abs_diff(&u3(PI / 2.0, phi, lam)) < 1e-15);
    }

    #[test]
    fn rz_equals_u1_up_to_phase_only() {
        let a = 0.77;
        assert!(rz(a).max_abs_diff(&u1(a)) > 1e-3);
        assert!(rz(a).equal_up_to_global_phase(&u1(a), 1e-10));
        assert!(!rz(a).equal_up_to_global_phase(&u1(-a), 1e-10));
    }

    #[test]
    fn bell_matrix() {
        let bell = cnot().matmul(&tensor(&h(), &GateMatrix::identity(2))).unwrap();
        let s = FRAC_1_SQRT_2;
        let expected = [[s, 0.0, s, 0.0], [0.0, s, 0.0, s], [0.0, s, 0.0, -s], [s, 0.0, -s, 0.0]];
        for r in 0..4 {
            for col in 0..4 {
                assert!((bell.get(r, col) - c(expected[r][col], 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn lookup_errors() {
        assert!(matches!(standard_gate("foo", &[]), Err(QfinError::UnknownGate(_))));
        assert!(matches!(standard_gate("rx", &[]), Err(QfinError::ParameterCount { .. })));
        assert!(standard_gate("H", &[]).unwrap().max_abs_diff(&h()) == 0.0);
        assert!(standard_gate("rk", &[3.0]).unwrap().max_abs_diff(&t()) < 1e-15);
    }
}
