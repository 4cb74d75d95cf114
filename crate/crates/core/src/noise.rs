//! T1 relaxation and T2 dephasing as per-shot stochastic trajectories.
//!
//! Each idle gate lasts `idle_step` µs. A shot is one trajectory: the qubit is
//! prepared, idled `k` times with a random jump drawn at each step, and
//! measured. Curves are built from independent experiments per idle count;
//! experiment `k` draws from stream `k` of the seeded generator, so points can
//! be computed in parallel without changing the result.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QfinError, Result};
use crate::state::seeded_rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub t1: f64,
    pub t2: f64,
    pub idle_step: f64,
}

impl NoiseParams {
    pub fn new(t1: f64, t2: f64, idle_step: f64) -> Result<Self> {
        for (name, v) in [("T1", t1), ("T2", t2), ("idle_step", idle_step)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(QfinError::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { t1, t2, idle_step })
    }

    /// Default idle duration of 0.1 µs.
    pub fn with_default_step(t1: f64, t2: f64) -> Result<Self> {
        Self::new(t1, t2, 0.1)
    }

    /// Per-step probability of a |1⟩→|0⟩ jump.
    pub fn relaxation_step(&self) -> f64 {
        decay_probability(self.idle_step, self.t1)
    }

    /// Per-step probability of a Z flip. Halved so the curve saturates at 0.5.
    pub fn dephasing_step(&self) -> f64 {
        decay_probability(self.idle_step, self.t2) / 2.0
    }
}

/// `1 − e^{−t/T}`.
pub fn decay_probability(t: f64, big_t: f64) -> f64 {
    -(-t / big_t).exp_m1()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Relax,
    Dephase,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub idles: usize,
    pub p1: f64,
    pub expected: f64,
    /// Binomial standard error of `expected` at the curve's shot count.
    pub std_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseCurve {
    pub channel: Channel,
    pub params: NoiseParams,
    pub shots: u64,
    pub seed: u64,
    pub points: Vec<CurvePoint>,
}

impl NoiseCurve {
    /// Largest |p1 − expected| in units of the binomial standard error.
    /// Points with zero variance must match exactly or count as infinite.
    pub fn max_deviation_sigmas(&self) -> f64 {
        self.points
            .iter()
            .map(|p| {
                let d = (p.p1 - p.expected).abs();
                if p.std_err > 0.0 {
                    d / p.std_err
                } else if d < 1e-12 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,p1,expected\n");
        for p in &self.points {
            out.push_str(&format!("{},{},{}\n", p.idles, p.p1, p.expected));
        }
        out
    }
}

/// Closed-form P(1) after `k` idles.
pub fn expected_p1(channel: Channel, params: &NoiseParams, k: usize) -> f64 {
    match channel {
        Channel::Relax => (-(k as f64) * params.idle_step / params.t1).exp(),
        Channel::Dephase => (1.0 - (1.0 - 2.0 * params.dephasing_step()).powi(k as i32)) / 2.0,
    }
}

/// Prepare |1⟩, idle `k` times, measure. P(1) follows e^{−kτ/T1}.
pub fn relaxation_experiment(params: &NoiseParams, max_idles: usize, shots: u64, seed: u64) -> Result<NoiseCurve> {
    run(Channel::Relax, params, max_idles, shots, seed)
}

/// Prepare |+⟩, idle `k` times, apply H, measure. P(1) rises toward 0.5.
pub fn dephasing_experiment(params: &NoiseParams, max_idles: usize, shots: u64, seed: u64) -> Result<NoiseCurve> {
    run(Channel::Dephase, params, max_idles, shots, seed)
}

fn run(channel: Channel, params: &NoiseParams, max_idles: usize, shots: u64, seed: u64) -> Result<NoiseCurve> {
    if shots == 0 {
        return Err(QfinError::ZeroShots);
    }
    let points = (0..=max_idles)
        .into_par_iter()
        .map(|k| {
            let ones = trajectories(channel, params, k, shots, seed);
            let expected = expected_p1(channel, params, k);
            CurvePoint {
                idles: k,
                p1: ones as f64 / shots as f64,
                expected,
                std_err: (expected * (1.0 - expected) / shots as f64).sqrt(),
            }
        })
        .collect();
    Ok(NoiseCurve { channel, params: *params, shots, seed, points })
}

/// Number of shots reading 1 after `k` idles.
fn trajectories(channel: Channel, params: &NoiseParams, k: usize, shots: u64, seed: u64) -> u64 {
    let mut rng = seeded_rng(seed);
    rng.set_stream(k as u64);
    match channel {
        Channel::Relax => {
            let p = params.relaxation_step();
            (0..shots)
                .filter(|_| {
                    // Starts in |1⟩; the first jump leaves it in |0⟩ for good.
                    let mut excited = true;
                    for _ in 0..k {
                        if excited && rng.gen::<f64>() < p {
                            excited = false;
                        }
                    }
                    excited
                })
                .count() as u64
        }
        Channel::Dephase => {
            let p = params.dephasing_step();
            (0..shots)
                .filter(|_| {
                    // |+⟩ under an odd number of Z flips is |−⟩, which H sends to |1⟩.
                    let mut minus = false;
                    for _ in 0..k {
                        if rng.gen::<f64>() < p {
                            minus = !minus;
                        }
                    }
                    minus
                })
                .count() as u64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_closed_form() {
        assert_eq!(decay_probability(0.0, 5.0), 0.0);
        assert!((decay_probability(5.0, 5.0) - 0.632_120_558_8).abs() < 1e-9);
        assert!((decay_probability(15.0, 5.0) - 0.950_212_931_6).abs() < 1e-9);
    }

    #[test]
    fn params_must_be_positive() {
        assert!(NoiseParams::new(0.0, 1.0, 0.1).is_err());
        assert!(NoiseParams::new(1.0, 1.0, -0.1).is_err());
        assert!(NoiseParams::new(1.0, f64::NAN, 0.1).is_err());
    }

    #[test]
    fn zero_idles_are_ideal() {
        let p = NoiseParams::with_default_step(10.0, 8.0).unwrap();
        let r = relaxation_experiment(&p, 0, 512, 1).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.points[0].p1, 1.0);
        let d = dephasing_experiment(&p, 0, 512, 1).unwrap();
        assert_eq!(d.points[0].p1, 0.0);
        assert_eq!(d.max_deviation_sigmas(), 0.0);
    }

    #[test]
    fn relaxation_at_t1() {
        // 100 steps of 0.1 µs with T1 = 10 µs.
        let p = NoiseParams::new(10.0, 10.0, 0.1).unwrap();
        let c = relaxation_experiment(&p, 100, 8192, 3).unwrap();
        let last = c.points[100];
        assert!((last.expected - (-1.0f64).exp()).abs() < 1e-12);
        assert!((last.p1 - last.expected).abs() < 3.0 * last.std_err);
    }

    #[test]
    fn dephasing_saturates() {
        let p = NoiseParams::new(1.0, 0.5, 0.1).unwrap();
        assert!((expected_p1(Channel::Dephase, &p, 10_000) - 0.5).abs() < 1e-12);
        let c = dephasing_experiment(&p, 60, 4096, 9).unwrap();
        assert!((c.points[60].p1 - 0.5).abs() < 0.04);
    }

    #[test]
    fn curves_are_seeded() {
        let p = NoiseParams::new(5.0, 3.0, 0.1).unwrap();
        let a = dephasing_experiment(&p, 20, 1000, 4).unwrap();
        assert_eq!(a, dephasing_experiment(&p, 20, 1000, 4).unwrap());
        assert_ne!(a, dephasing_experiment(&p, 20, 1000, 5).unwrap());
        assert!(a.to_csv().starts_with("k,p1,expected\n0,0,0\n"));
    }
}
