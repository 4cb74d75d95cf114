//! Quadratic binary objectives `f(x) = xᵀAx + bᵀx + c`, their Ising image
//! and exhaustive evaluation.
//!
//! Bitstrings follow the crate convention: variable 0 is the most
//! significant bit of the row index and the first character of a bitstring.

use serde::Serialize;

use crate::error::{QfinError, Result};
use crate::state::{index_to_bitstring, MAX_QUBITS};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuboTask {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: f64,
    pub labels: Vec<String>,
}

impl QuboTask {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: f64) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(QfinError::InvalidArgument("a task needs at least one variable".into()));
        }
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(QfinError::LengthMismatch { expected: n, got: a.len() });
        }
        let labels = (0..n).map(|i| format!("x{i}")).collect();
        Ok(Self { a, b, c, labels })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.b.len() {
            return Err(QfinError::LengthMismatch { expected: self.b.len(), got: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.b.len()
    }

    pub fn value(&self, x: &[u8]) -> f64 {
        let mut total = self.c;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            total += self.b[i];
            for (j, &xj) in x.iter().enumerate() {
                if xj != 0 {
                    total += self.a[i][j];
                }
            }
        }
        total
    }

    /// Objective of the assignment encoded by `index` (variable 0 = MSB).
    pub fn value_at(&self, index: usize) -> f64 {
        self.value(&index_bits(index, self.num_vars()))
    }
}

/// Bits of `index` over `n` variables, variable 0 first.
pub fn index_bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| (index >> (n - 1 - i) & 1) as u8).collect()
}

/// `A = λ2·C + λ3·𝟙𝟙ᵀ`, `b = −(λ1·r + 2mλ3·𝟙)`, `c = λ3·m²`: reward return,
/// penalize risk and deviations from holding exactly `m` assets.
pub fn build_portfolio_qubo(
    returns: &[f64],
    covariance: &[Vec<f64>],
    m: usize,
    lambdas: (f64, f64, f64),
) -> Result<QuboTask> {
    let n = returns.len();
    if covariance.len() != n || covariance.iter().any(|r| r.len() != n) {
        return Err(QfinError::LengthMismatch { expected: n, got: covariance.len() });
    }
    if m > n {
        return Err(QfinError::InvalidArgument(format!("cannot pick {m} of {n} assets")));
    }
    for i in 0..n {
        for j in 0..i {
            if (covariance[i][j] - covariance[j][i]).abs() > 1e-12 {
                return Err(QfinError::InvalidArgument("covariance matrix is not symmetric".into()));
            }
        }
    }
    let (l1, l2, l3) = lambdas;
    let m = m as f64;
    let a = covariance.iter().map(|row| row.iter().map(|cij| l2 * cij + l3).collect()).collect();
    let b = returns.iter().map(|ri| -(l1 * ri + 2.0 * m * l3)).collect();
    QuboTask::new(a, b, l3 * m * m)
}

/// `H = Σ_{i<j} Q_ij Z_i Z_j + Σ h_i Z_i + offset` over spins `z = ±1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsingModel {
    /// Upper triangular; entries on or below the diagonal are zero.
    pub couplings: Vec<Vec<f64>>,
    pub fields: Vec<f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn num_spins(&self) -> usize {
        self.fields.len()
    }

    pub fn energy(&self, z: &[i8]) -> f64 {
        let mut e = self.offset;
        for i in 0..z.len() {
            e += self.fields[i] * z[i] as f64;
            for j in i + 1..z.len() {
                e += self.couplings[i][j] * (z[i] * z[j]) as f64;
            }
        }
        e
    }

    /// Energy of a measured bitstring: bit `1` is spin `−1`.
    pub fn energy_of_bits(&self, bits: &[u8]) -> f64 {
        let z: Vec<i8> = bits.iter().map(|&b| if b == 0 { 1 } else { -1 }).collect();
        self.energy(&z)
    }

    /// Non-zero couplings as `(i, j, Q_ij)` with `i < j`.
    pub fn coupling_terms(&self) -> Vec<(usize, usize, f64)> {
        let n = self.num_spins();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.couplings[i][j] != 0.0)
            .map(|(i, j)| (i, j, self.couplings[i][j]))
            .collect()
    }
}

/// Substitutes `x_i = (1 − z_i)/2` after folding `a_ij + a_ji` into the
/// upper triangle and `a_ii` into the linear term.
pub fn qubo_to_ising(task: &QuboTask) -> IsingModel {
    let n = task.num_vars();
    let linear: Vec<f64> = (0..n).map(|i| task.b[i] + task.a[i][i]).collect();
    let mut quad = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            quad[i][j] = task.a[i][j] + task.a[j][i];
        }
    }
    let mut couplings = vec![vec![0.0; n]; n];
    let mut fields = vec![0.0; n];
    let mut offset = task.c;
    for i in 0..n {
        fields[i] -= linear[i] / 2.0;
        offset += linear[i] / 2.0;
        for j in i + 1..n {
            let q = quad[i][j] / 4.0;
            couplings[i][j] = q;
            fields[i] -= q;
            fields[j] -= q;
            offset += q;
        }
    }
    IsingModel { couplings, fields, offset }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForceRow {
    pub index: usize,
    pub bits: String,
    pub objective: f64,
    pub feasible: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForceTable {
    pub rows: Vec<BruteForceRow>,
    /// Row index of the minimum over feasible rows (all rows without a predicate).
    pub optimum: usize,
}

impl BruteForceTable {
    pub fn optimum_row(&self) -> &BruteForceRow {
        &self.rows[self.optimum]
    }
}

/// Predicate marking an assignment feasible.
pub type Feasibility<'a> = &'a dyn Fn(&[u8]) -> bool;

/// Objective of every assignment, with an optional feasibility column.
pub fn brute_force(task: &QuboTask, feasibility: Option<Feasibility>) -> Result<BruteForceTable> {
    let n = task.num_vars();
    if n > MAX_QUBITS {
        return Err(QfinError::Capacity { requested: n, max: MAX_QUBITS });
    }
    let rows: Vec<BruteForceRow> = (0..1usize << n)
        .map(|index| {
            let bits = index_bits(index, n);
            BruteForceRow {
                index,
                bits: index_to_bitstring(index, n),
                objective: task.value(&bits),
                feasible: feasibility.map(|f| f(&bits)),
            }
        })
        .collect();
    let optimum = rows
        .iter()
        .filter(|r| r.feasible != Some(false))
        .min_by(|a, b| a.objective.total_cmp(&b.objective))
        .map(|r| r.index)
        .ok_or_else(|| QfinError::InvalidArgument("no feasible assignment".into()))?;
    Ok(BruteForceTable { rows, optimum })
}

/// Feasibility predicate "exactly `m` ones".
pub fn exactly_m_ones(m: usize) -> impl Fn(&[u8]) -> bool {
    move |bits: &[u8]| bits.iter().filter(|&&b| b == 1).count() == m
}

/// Binary expansion `w_i = Σ_j 2^j x_ij` of integer weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntegerEncoding {
    pub num_assets: usize,
    pub bits_per_weight: usize,
}

/// Flat variable `asset·m + bit` holds bit `bit` (weight `2^bit`) of asset `asset`.
pub fn encode_integer_weights(num_assets: usize, bits_per_weight: usize) -> Result<IntegerEncoding> {
    let total = num_assets * bits_per_weight;
    if num_assets == 0 || bits_per_weight == 0 {
        return Err(QfinError::InvalidArgument("need at least one asset and one bit".into()));
    }
    if total > MAX_QUBITS {
        return Err(QfinError::Capacity { requested: total, max: MAX_QUBITS });
    }
    Ok(IntegerEncoding { num_assets, bits_per_weight })
}

impl IntegerEncoding {
    pub fn num_vars(&self) -> usize {
        self.num_assets * self.bits_per_weight
    }

    pub fn index(&self, asset: usize, bit: usize) -> usize {
        asset * self.bits_per_weight + bit
    }

    pub fn max_weight(&self) -> u64 {
        (1u64 << self.bits_per_weight) - 1
    }

    pub fn weights(&self, x: &[u8]) -> Vec<u64> {
        (0..self.num_assets)
            .map(|a| (0..self.bits_per_weight).map(|j| (x[self.index(a, j)] as u64) << j).sum())
            .collect()
    }

    /// Rewrites `wᵀQw + lᵀw + c` over the binary variables.
    pub fn expand(&self, q: &[Vec<f64>], l: &[f64], c: f64) -> Result<QuboTask> {
        let n = self.num_assets;
        if q.len() != n || q.iter().any(|r| r.len() != n) || l.len() != n {
            return Err(QfinError::LengthMismatch { expected: n, got: l.len() });
        }
        let vars = self.num_vars();
        let m = self.bits_per_weight;
        let mut a = vec![vec![0.0; vars]; vars];
        let mut b = vec![0.0; vars];
        for i in 0..n {
            for j in 0..m {
                b[self.index(i, j)] = l[i] * (1u64 << j) as f64;
                for k in 0..n {
                    for t in 0..m {
                        a[self.index(i, j)][self.index(k, t)] = q[i][k] * ((1u64 << j) * (1u64 << t)) as f64;
                    }
                }
            }
        }
        let labels = (0..vars).map(|v| format!("w{}_{}", v / m, v % m)).collect();
        QuboTask::new(a, b, c)?.with_labels(labels)
    }
}
