//! Risk metrics of a discretized P/L distribution read off an ancilla qubit.
//!
//! The distribution is loaded as `Σ √p_i |i⟩` on `n` qubits and a uniformly
//! controlled `Ry` writes `f(i)` into the `|1⟩` probability of one extra
//! qubit, so that `P(ancilla = 1) = Σ p_i f(i)`. Choosing `f` gives
//!
//! | metric | `f(i)` | post-processing |
//! |---|---|---|
//! | `E[X]` | `i/(N−1)` | `P₁·(N−1)` |
//! | `E[X²]` | `i²/(N−1)²` | `P₁·(N−1)²` |
//! | `P[X ≤ l]` | `1` for `i ≤ l` | bisection over `l` gives VaR |
//! | CVaR | `i/VaR` for `i ≤ VaR` | `P₁·VaR / P[X ≤ VaR]` |
//!
//! All values are in bin units; bin 0 is the worst loss.

use serde::{Deserialize, Serialize};

use crate::circuit::CircuitSpec;
use crate::encoding::{multiplexed_ry, prepare_distribution, ry_angle_for_probability};
use crate::error::{QfinError, Result};
use crate::readout::{Mode, Readout};
use crate::state::StateVector;

const SUM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    probabilities: Vec<f64>,
    bin_edges: Option<Vec<f64>>,
    label: String,
}

impl DiscreteDistribution {
    /// Probabilities must be non-negative, sum to 1 within 1e-9 and have a
    /// power-of-two length; edges, when given, number one more than bins.
    pub fn new(probabilities: Vec<f64>, bin_edges: Option<Vec<f64>>, label: impl Into<String>) -> Result<Self> {
        let len = probabilities.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QfinError::NotPowerOfTwo(len));
        }
        if let Some(bad) = probabilities.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(QfinError::InvalidDistribution(format!("entry {bad}")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(QfinError::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        if let Some(edges) = &bin_edges {
            if edges.len() != len + 1 {
                return Err(QfinError::LengthMismatch { expected: len + 1, got: edges.len() });
            }
            if edges.windows(2).any(|w| w[1] <= w[0]) {
                return Err(QfinError::InvalidArgument("bin edges must increase".into()));
            }
        }
        Ok(Self { probabilities, bin_edges, label: label.into() })
    }

    /// Normalizes non-negative weights (counts, percentages) by their sum.
    pub fn from_weights(weights: &[f64], label: impl Into<String>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(QfinError::InvalidDistribution(format!("weights sum to {total}")));
        }
        Self::new(weights.iter().map(|w| w / total).collect(), None, label)
    }

    /// Uniform edges over `[lo, hi]`.
    pub fn with_range(mut self, lo: f64, hi: f64) -> Result<Self> {
        self.bin_edges = Some(uniform_edges(lo, hi, self.len())?);
        Ok(self)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn bin_edges(&self) -> Option<&[f64]> {
        self.bin_edges.as_deref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.len().trailing_zeros() as usize
    }

    /// `P[X ≤ l]`.
    pub fn cdf(&self, l: usize) -> f64 {
        self.probabilities[..=l.min(self.len() - 1)].iter().sum()
    }
}

fn uniform_edges(lo: f64, hi: f64, bins: usize) -> Result<Vec<f64>> {
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(QfinError::InvalidArgument(format!("empty range [{lo}, {hi}]")));
    }
    let width = (hi - lo) / bins as f64;
    Ok((0..=bins).map(|k| if k == bins { hi } else { lo + k as f64 * width }).collect())
}

/// What happens to observations outside the binning range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutlierPolicy {
    /// Counted in the first or last bin.
    Clip,
    /// Ignored.
    Drop,
}

/// Histogram of `series` over `num_bins` equal bins on `[lo, hi]`, as relative
/// counts. Bin 0 holds the lowest values.
pub fn discretize(
    series: &[f64],
    num_bins: usize,
    range: (f64, f64),
    policy: OutlierPolicy,
) -> Result<DiscreteDistribution> {
    if series.is_empty() {
        return Err(QfinError::InvalidDistribution("empty series".into()));
    }
    if num_bins < 2 || !num_bins.is_power_of_two() {
        return Err(QfinError::NotPowerOfTwo(num_bins));
    }
    let (lo, hi) = range;
    let edges = uniform_edges(lo, hi, num_bins)?;
    let width = (hi - lo) / num_bins as f64;
    let mut counts = vec![0.0; num_bins];
    for &v in series {
        if !v.is_finite() {
            return Err(QfinError::InvalidDistribution(format!("non-finite value {v}")));
        }
        let inside = (lo..=hi).contains(&v);
        if !inside && policy == OutlierPolicy::Drop {
            continue;
        }
        let bin = (((v - lo) / width).floor().max(0.0) as usize).min(num_bins - 1);
        counts[bin] += 1.0;
    }
    let kept: f64 = counts.iter().sum();
    if kept == 0.0 {
        return Err(QfinError::InvalidDistribution("every observation fell outside the range".into()));
    }
    DiscreteDistribution::new(counts.iter().map(|c| c / kept).collect(), Some(edges), "histogram")
}

/// Brackets a (possibly fractional) bin value by the lower edge of
/// `floor(value)` and the upper edge of `ceil(value)`.
pub fn bins_to_units(value_bins: f64, edges: Option<&[f64]>) -> Result<(f64, f64)> {
    let edges = edges.ok_or_else(|| QfinError::InvalidArgument("distribution has no bin edges".into()))?;
    let bins = edges.len().saturating_sub(1);
    if bins == 0 || !(0.0..=bins as f64).contains(&value_bins) {
        return Err(QfinError::InvalidArgument(format!("bin value {value_bins} outside 0..{bins}")));
    }
    let lower = (value_bins.floor() as usize).min(bins - 1);
    let upper = (value_bins.ceil() as usize).clamp(lower, bins - 1);
    Ok((edges[lower], edges[upper + 1]))
}

/// Converts a spread measured in bins (e.g. σ) into units: `value · width`.
pub fn bins_to_width_units(value_bins: f64, edges: Option<&[f64]>) -> Result<f64> {
    let edges = edges.ok_or_else(|| QfinError::InvalidArgument("distribution has no bin edges".into()))?;
    if edges.len() < 2 {
        return Err(QfinError::InvalidArgument("need at least one bin".into()));
    }
    Ok(value_bins * (edges[edges.len() - 1] - edges[0]) / (edges.len() - 1) as f64)
}

/// VaR and CVaR at one significance level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub alpha: f64,
    pub var_bins: usize,
    /// `P[X ≤ VaR]` as used in the CVaR denominator.
    pub prob_at_or_below_var: f64,
    pub cvar_bins: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskReport {
    /// `exact`, `sampled` or `classical`.
    pub backend: String,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub expected_value_bins: f64,
    pub std_dev_bins: f64,
    /// Set when a sampled variance came out negative and was clamped to 0.
    pub variance_clamped: bool,
    pub levels: Vec<LevelReport>,
}

/// A metric value with its bracket in the units of the bin edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricBounds {
    pub metric: String,
    pub bins: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl RiskReport {
    /// Table of every metric with its unit bracket. The standard deviation is
    /// reported as a single width (`lower`), no upper bound.
    pub fn bounds(&self, edges: Option<&[f64]>) -> Result<Vec<MetricBounds>> {
        let bracket = |metric: String, bins: f64| -> Result<MetricBounds> {
            let (lower, upper) = bins_to_units(bins, edges)?;
            Ok(MetricBounds { metric, bins, lower: Some(lower), upper: Some(upper) })
        };
        let mut out = vec![
            bracket("expected_value".into(), self.expected_value_bins)?,
            MetricBounds {
                metric: "std_dev".into(),
                bins: self.std_dev_bins,
                lower: Some(bins_to_width_units(self.std_dev_bins, edges)?),
                upper: None,
            },
        ];
        for level in &self.levels {
            let pct = format!("{}", level.alpha * 100.0);
            out.push(bracket(format!("var_{pct}"), level.var_bins as f64)?);
            out.push(bracket(format!("cvar_{pct}"), level.cvar_bins)?);
        }
        Ok(out)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(QfinError::InvalidArgument(format!("significance level {alpha} outside (0, 1)")));
    }
    Ok(())
}

/// Closed-form sums over the distribution.
pub fn classical_risk_oracle(dist: &DiscreteDistribution, alphas: &[f64]) -> Result<RiskReport> {
    let p = dist.probabilities();
    let mean: f64 = p.iter().enumerate().map(|(i, pi)| i as f64 * pi).sum();
    let second: f64 = p.iter().enumerate().map(|(i, pi)| (i * i) as f64 * pi).sum();
    let variance = second - mean * mean;
    let mut levels = Vec::new();
    for &alpha in alphas {
        check_alpha(alpha)?;
        let target = 1.0 - alpha;
        let var = (0..p.len()).find(|&l| dist.cdf(l) >= target).unwrap_or(p.len() - 1);
        let below = dist.cdf(var);
        let tail: f64 = p[..=var].iter().enumerate().map(|(i, pi)| i as f64 * pi).sum();
        let cvar = if var == 0 { 0.0 } else { tail / below };
        levels.push(LevelReport { alpha, var_bins: var, prob_at_or_below_var: below, cvar_bins: cvar });
    }
    Ok(RiskReport {
        backend: "classical".into(),
        shots: None,
        seed: None,
        expected_value_bins: mean,
        std_dev_bins: variance.max(0.0).sqrt(),
        variance_clamped: variance < 0.0,
        levels,
    })
}

/// Result of the VaR bisection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarOutcome {
    pub bin: usize,
    /// `P[X ≤ bin]` as read by the probe that fixed `bin`.
    pub prob_at_or_below: f64,
    pub probes: usize,
}

/// Runs the ancilla circuits for one distribution. The loaded state is
/// computed once; every metric appends its own rotation and reads the
/// ancilla through a shared [`Readout`].
pub struct QuantumRisk {
    n: usize,
    loaded: StateVector,
    readout: Readout,
    circuits_run: usize,
}

impl QuantumRisk {
    pub fn new(dist: &DiscreteDistribution, mode: Mode) -> Result<Self> {
        let n = dist.num_qubits();
        let mut prep = CircuitSpec::new(n + 1);
        prep.append(&prepare_distribution(dist.probabilities())?)?;
        Ok(Self { n, loaded: prep.run_from_zero()?, readout: Readout::new(mode), circuits_run: 0 })
    }

    fn bins(&self) -> usize {
        1 << self.n
    }

    /// Circuit writing `f(i)` into the ancilla, for inspection.
    pub fn rotation_circuit(&self, f: impl Fn(usize) -> f64) -> Result<CircuitSpec> {
        let alphas: Vec<f64> = (0..self.bins()).map(|i| ry_angle_for_probability(f(i))).collect();
        let controls: Vec<usize> = (0..self.n).collect();
        multiplexed_ry(&alphas, &controls, self.n)
    }

    /// Ancilla `P(1)` after encoding `f`, exact or sampled.
    pub fn ancilla_p1(&mut self, f: impl Fn(usize) -> f64) -> Result<f64> {
        let state = self.rotation_circuit(f)?.run(&self.loaded)?;
        self.circuits_run += 1;
        self.readout.marginal(&state, self.n, 1)
    }

    pub fn circuits_run(&self) -> usize {
        self.circuits_run
    }

    pub fn expected_value(&mut self) -> Result<f64> {
        let top = (self.bins() - 1) as f64;
        Ok(self.ancilla_p1(|i| i as f64 / top)? * top)
    }

    pub fn second_moment(&mut self) -> Result<f64> {
        let top = (self.bins() - 1) as f64;
        Ok(self.ancilla_p1(|i| (i as f64 / top).powi(2))? * top * top)
    }

    /// σ and whether a negative variance estimate was clamped to zero.
    pub fn std_dev(&mut self) -> Result<(f64, bool)> {
        let mean = self.expected_value()?;
        let variance = self.second_moment()? - mean * mean;
        Ok((variance.max(0.0).sqrt(), variance < 0.0))
    }

    /// `P[X ≤ l]` through the comparator schedule.
    pub fn cdf(&mut self, l: usize) -> Result<f64> {
        self.ancilla_p1(|i| if i <= l { 1.0 } else { 0.0 })
    }

    /// Smallest `l` with `P[X ≤ l] ≥ 1 − alpha`, by bisection starting from
    /// `[0, N−1]`. Bin 0 is tested first; after that the bracket keeps
    /// `cdf(a) < 1 − alpha ≤ cdf(b)` and the answer is `b`.
    pub fn value_at_risk(&mut self, alpha: f64) -> Result<VarOutcome> {
        check_alpha(alpha)?;
        let target = 1.0 - alpha;
        let p0 = self.cdf(0)?;
        let mut probes = 1;
        if p0 >= target {
            return Ok(VarOutcome { bin: 0, prob_at_or_below: p0, probes });
        }
        let (mut a, mut b) = (0usize, self.bins() - 1);
        // With f ≡ 1 on every bin the ancilla is |1⟩ with certainty.
        let mut p_b = 1.0;
        while b - a > 1 {
            let mid = (a + b) / 2;
            let p = self.cdf(mid)?;
            probes += 1;
            if p >= target {
                b = mid;
                p_b = p;
            } else {
                a = mid;
            }
        }
        Ok(VarOutcome { bin: b, prob_at_or_below: p_b, probes })
    }

    /// `P₁·VaR / P[X ≤ VaR]` with `f(i) = i/VaR` below VaR; 0 when VaR is bin 0.
    pub fn conditional_var(&mut self, var: &VarOutcome) -> Result<f64> {
        if var.bin == 0 {
            return Ok(0.0);
        }
        if var.prob_at_or_below <= 0.0 {
            return Err(QfinError::PostSelection { probability: var.prob_at_or_below });
        }
        let l = var.bin;
        let p1 = self.ancilla_p1(|i| if i <= l { i as f64 / l as f64 } else { 0.0 })?;
        Ok(p1 * l as f64 / var.prob_at_or_below)
    }

    /// Every metric in turn: E[X], E[X²], then VaR and CVaR per level.
    pub fn report(&mut self, alphas: &[f64]) -> Result<RiskReport> {
        let mean = self.expected_value()?;
        let variance = self.second_moment()? - mean * mean;
        let mut levels = Vec::new();
        for &alpha in alphas {
            let var = self.value_at_risk(alpha)?;
            let cvar = self.conditional_var(&var)?;
            levels.push(LevelReport {
                alpha,
                var_bins: var.bin,
                prob_at_or_below_var: var.prob_at_or_below,
                cvar_bins: cvar,
            });
        }
        let mode = self.readout.mode();
        let seed = match mode {
            Mode::Exact => None,
            Mode::Sampled { seed, .. } => Some(seed),
        };
        Ok(RiskReport {
            backend: mode.tag().into(),
            shots: mode.shots(),
            seed,
            expected_value_bins: mean,
            std_dev_bins: variance.max(0.0).sqrt(),
            variance_clamped: variance < 0.0,
            levels,
        })
    }
}

pub fn expected_value(dist: &DiscreteDistribution, mode: Mode) -> Result<f64> {
    QuantumRisk::new(dist, mode)?.expected_value()
}

pub fn std_dev(dist: &DiscreteDistribution, mode: Mode) -> Result<f64> {
    Ok(QuantumRisk::new(dist, mode)?.std_dev()?.0)
}

pub fn value_at_risk(dist: &DiscreteDistribution, alpha: f64, mode: Mode) -> Result<usize> {
    Ok(QuantumRisk::new(dist, mode)?.value_at_risk(alpha)?.bin)
}

/// Runs the VaR bisection and then the CVaR circuit on one readout.
pub fn conditional_var(dist: &DiscreteDistribution, alpha: f64, mode: Mode) -> Result<f64> {
    let mut q = QuantumRisk::new(dist, mode)?;
    let var = q.value_at_risk(alpha)?;
    q.conditional_var(&var)
}
