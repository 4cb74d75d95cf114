//! QAOA for Ising-encoded binary objectives.
//!
//! Each layer applies `e^{−iγH}` (a CNOT·Rz·CNOT sandwich per coupling and
//! an Rz per field) followed by the mixer `Rx(2β)` on every qubit. The
//! angles are tuned by Nelder–Mead on the sampled mean energy; the answer is
//! the lowest-objective bitstring seen in any sample along the way.

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::CircuitSpec;
use crate::error::{QfinError, Result};
use crate::qubo::{qubo_to_ising, IsingModel, QuboTask};
use crate::state::{bitstring_to_index, seeded_rng, MeasurementCounts, MAX_QUBITS};

/// Circuit for angles `betas`, `gammas` (one of each per layer).
pub fn qaoa_ansatz(ising: &IsingModel, betas: &[f64], gammas: &[f64]) -> Result<CircuitSpec> {
    if betas.len() != gammas.len() || betas.is_empty() {
        return Err(QfinError::LengthMismatch { expected: betas.len(), got: gammas.len() });
    }
    let n = ising.num_spins();
    let couplings = ising.coupling_terms();
    let mut c = CircuitSpec::new(n);
    for q in 0..n {
        c.h(q)?;
    }
    for (&beta, &gamma) in betas.iter().zip(gammas) {
        for &(i, j, qij) in &couplings {
            c.cx(i, j)?;
            c.rz(2.0 * gamma * qij, j)?;
            c.cx(i, j)?;
        }
        for (i, &h) in ising.fields.iter().enumerate() {
            if h != 0.0 {
                c.rz(2.0 * gamma * h, i)?;
            }
        }
        for q in 0..n {
            c.rx(2.0 * beta, q)?;
        }
    }
    Ok(c)
}

fn parse_bits(bits: &str) -> Vec<u8> {
    bits.bytes().map(|b| b - b'0').collect()
}

/// Frequency-weighted mean Ising energy over the sampled bitstrings.
pub fn expected_energy(ising: &IsingModel, counts: &MeasurementCounts) -> Result<f64> {
    if counts.shots == 0 || counts.counts.is_empty() {
        return Err(QfinError::ZeroShots);
    }
    Ok(counts.counts.iter().map(|(bits, &c)| ising.energy_of_bits(&parse_bits(bits)) * c as f64).sum::<f64>()
        / counts.shots as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QaoaConfig {
    pub depth: usize,
    /// Objective evaluations allowed per restart.
    pub max_evaluations: usize,
    /// Simplex stops when the spread of its values falls below this.
    pub tolerance: f64,
    pub shots: u64,
    pub seed: u64,
    pub restarts: usize,
    /// Initial simplex edge in radians.
    pub initial_step: f64,
}

impl Default for QaoaConfig {
    fn default() -> Self {
        Self { depth: 1, max_evaluations: 60, tolerance: 1e-3, shots: 1024, seed: 0, restarts: 3, initial_step: 0.3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub restart: usize,
    pub evaluation: usize,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub expected_energy: f64,
    /// Lowest objective among this evaluation's samples.
    pub sample_best_objective: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QaoaOutcome {
    pub best_bits: String,
    pub best_objective: f64,
    pub evaluations: usize,
    /// False when some restart hit its evaluation budget before converging.
    pub converged: bool,
    pub best_params: (Vec<f64>, Vec<f64>),
    pub best_expected_energy: f64,
    pub trace: Vec<TraceEntry>,
}

/// Downhill simplex minimization of `f` from `x0`.
/// Returns `(argmin, min, evaluations, converged)`.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_evaluations: usize,
    tolerance: f64,
) -> (Vec<f64>, f64, usize, bool) {
    let dim = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evals)));
    for k in 0..dim {
        let mut x = x0.to_vec();
        x[k] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let mut converged = false;
    while evals < max_evaluations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[dim].1 - simplex[0].1 < tolerance {
            converged = true;
            break;
        }
        let centroid: Vec<f64> =
            (0..dim).map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64).collect();
        let toward =
            |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[dim].0).map(|(c, w)| c + t * (w - c)).collect() };
        let reflected = toward(-1.0);
        let fr = eval(&reflected, &mut evals);
        if fr < simplex[0].1 {
            let expanded = toward(-2.0);
            let fe = eval(&expanded, &mut evals);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[dim].1 { toward(-0.5) } else { toward(0.5) };
            let fc = eval(&contracted, &mut evals);
            if fc < fr.min(simplex[dim].1) {
                simplex[dim] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, v)| b + 0.5 * (v - b)).collect();
                    *vertex = (x.clone(), eval(&x, &mut evals));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v, evals, converged)
}

struct RestartResult {
    trace: Vec<TraceEntry>,
    best: Option<(f64, String)>,
    params: Vec<f64>,
    value: f64,
    converged: bool,
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    seed ^ (restart as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn run_restart(task: &QuboTask, ising: &IsingModel, config: &QaoaConfig, restart: usize) -> Result<RestartResult> {
    let p = config.depth;
    let mut rng = seeded_rng(restart_seed(config.seed, restart));
    // Start points spread along γ, scaled to the largest Ising coefficient.
    let scale =
        ising.fields.iter().chain(ising.couplings.iter().flatten()).fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
    let frac = (restart as f64 + rand::Rng::gen::<f64>(&mut rng)) / config.restarts.max(1) as f64;
    let gamma0 = frac * std::f64::consts::PI / (2.0 * scale);
    let beta0 = std::f64::consts::PI / 8.0 + 0.1 * (rand::Rng::gen::<f64>(&mut rng) - 0.5);
    let x0: Vec<f64> = (0..p).map(|_| beta0).chain((0..p).map(|_| gamma0)).collect();

    let mut trace = Vec::new();
    let mut best: Option<(f64, String)> = None;
    let mut failure = None;
    let (params, value, _, converged) = nelder_mead(
        |x| {
            let (betas, gammas) = x.split_at(p);
            let sampled = qaoa_ansatz(ising, betas, gammas)
                .and_then(|c| c.run_from_zero())
                .and_then(|s| s.sample_with(config.shots, &mut rng));
            let counts = match sampled {
                Ok(c) => c,
                Err(e) => {
                    failure.get_or_insert(e);
                    return f64::INFINITY;
                }
            };
            let energy = expected_energy(ising, &counts).unwrap_or(f64::INFINITY);
            let mut sample_best = f64::INFINITY;
            for bits in counts.counts.keys() {
                let v = task.value(&parse_bits(bits));
                sample_best = sample_best.min(v);
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, bits.clone()));
                }
            }
            trace.push(TraceEntry {
                restart,
                evaluation: trace.len(),
                betas: betas.to_vec(),
                gammas: gammas.to_vec(),
                expected_energy: energy,
                sample_best_objective: sample_best,
            });
            energy
        },
        &x0,
        config.initial_step,
        config.max_evaluations,
        config.tolerance,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(RestartResult { trace, best, params, value, converged })
}

/// Hybrid loop: restarts run independently (in parallel) with seeds derived
/// from `config.seed`; results are merged in restart order.
pub fn qaoa_solve(task: &QuboTask, config: &QaoaConfig) -> Result<QaoaOutcome> {
    let n = task.num_vars();
    if n > MAX_QUBITS {
        return Err(QfinError::Capacity { requested: n, max: MAX_QUBITS });
    }
    if config.depth == 0 || config.restarts == 0 || config.shots == 0 {
        return Err(QfinError::InvalidArgument("depth, restarts and shots must be positive".into()));
    }
    let ising = qubo_to_ising(task);
    let runs: Vec<RestartResult> =
        (0..config.restarts).into_par_iter().map(|r| run_restart(task, &ising, config, r)).collect::<Result<_>>()?;

    let mut best: Option<(f64, String)> = None;
    let mut best_run = 0;
    for (r, run) in runs.iter().enumerate() {
        if let Some((v, bits)) = &run.best {
            if best.as_ref().is_none_or(|(b, _)| v < b) {
                best = Some((*v, bits.clone()));
            }
        }
        if run.value < runs[best_run].value {
            best_run = r;
        }
    }
    let (best_objective, best_bits) = best.ok_or(QfinError::ZeroShots)?;
    debug_assert!(bitstring_to_index(&best_bits).is_ok());
    let p = config.depth;
    let params = &runs[best_run].params;
    Ok(QaoaOutcome {
        best_bits,
        best_objective,
        evaluations: runs.iter().map(|r| r.trace.len()).sum(),
        converged: runs.iter().all(|r| r.converged),
        best_params: (params[..p].to_vec(), params[p..].to_vec()),
        best_expected_energy: runs[best_run].value,
        trace: runs.into_iter().flat_map(|r| r.trace).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::brute_force;

    #[test]
    fn two_variable_ansatz_shape() {
        let task = QuboTask::new(vec![vec![0.0, 2.0], vec![0.0, 0.0]], vec![-2.0, -1.5], 0.0).unwrap();
        let c = qaoa_ansatz(&qubo_to_ising(&task), &[0.3], &[0.7]).unwrap();
        let names: Vec<&str> = c.instructions().iter().map(|i| i.name.as_str()).collect();
        assert_eq!(names, ["h", "h", "x", "rz", "x", "rz", "rz", "rx", "rx"]);
        assert!(qaoa_ansatz(&qubo_to_ising(&task), &[0.3], &[]).is_err());
    }

    #[test]
    fn zero_angles_give_uniform_state() {
        let task =
            QuboTask::new(vec![vec![1.0, 2.0, 0.0], vec![0.0, 0.0, -1.0], vec![0.0; 3]], vec![0.5, -1.0, 2.0], 1.0)
                .unwrap();
        let s = qaoa_ansatz(&qubo_to_ising(&task), &[0.0], &[0.0]).unwrap().run_from_zero().unwrap();
        for p in s.probabilities() {
            assert!((p - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn layer_realizes_cost_evolution() {
        // At β = 0 the state is e^{−iγH}|+…+⟩: uniform magnitudes with phases −γE(z).
        let task = QuboTask::new(vec![vec![0.0, 1.5], vec![0.0, 0.0]], vec![-0.5, 0.25], 0.0).unwrap();
        let ising = qubo_to_ising(&task);
        let gamma = 0.37;
        let s = qaoa_ansatz(&ising, &[0.0], &[gamma]).unwrap().run_from_zero().unwrap();
        let a = s.amplitudes();
        for k in 1..4 {
            let bits = [(k >> 1) as u8, (k & 1) as u8];
            let b0 = [0u8, 0];
            let want = -gamma * (ising.energy_of_bits(&bits) - ising.energy_of_bits(&b0));
            let got = (a[k] / a[0]).arg();
            let diff = (got - want).rem_euclid(2.0 * std::f64::consts::PI);
            assert!(diff < 1e-9 || (2.0 * std::f64::consts::PI - diff) < 1e-9, "k={k}");
        }
    }

    #[test]
    fn energy_examples() {
        let task = QuboTask::new(vec![vec![0.0, 2.0], vec![0.0, 0.0]], vec![-1.0, -1.0], 0.0).unwrap();
        let ising = qubo_to_ising(&task);
        let single = MeasurementCounts { num_qubits: 2, counts: [("10".to_string(), 7)].into(), shots: 7, seed: 0 };
        assert!((expected_energy(&ising, &single).unwrap() + 1.0).abs() < 1e-12);
        let uniform = MeasurementCounts {
            num_qubits: 2,
            counts: ["00", "01", "10", "11"].iter().map(|b| (b.to_string(), 5)).collect(),
            shots: 20,
            seed: 0,
        };
        assert!((expected_energy(&ising, &uniform).unwrap() - (0.0 - 1.0 - 1.0 + 0.0) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let (x, v, _, converged) =
            nelder_mead(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2), &[0.0, 0.0], 0.5, 500, 1e-12);
        assert!(converged);
        assert!((x[0] - 1.0).abs() < 1e-4 && (x[1] + 0.5).abs() < 1e-4 && v < 1e-8);
    }

    #[test]
    fn small_tasks_solve_to_optimum() {
        let single = QuboTask::new(vec![vec![0.0]], vec![1.0], 0.0).unwrap();
        let out = qaoa_solve(&single, &QaoaConfig::default()).unwrap();
        assert_eq!((out.best_bits.as_str(), out.best_objective), ("0", 0.0));

        let pair = QuboTask::new(vec![vec![0.0, 2.0], vec![0.0, 0.0]], vec![-1.0, -1.0], 0.0).unwrap();
        let out = qaoa_solve(&pair, &QaoaConfig::default()).unwrap();
        assert!(out.best_bits == "01" || out.best_bits == "10");
        assert_eq!(out.best_objective, brute_force(&pair, None).unwrap().optimum_row().objective);
    }

    #[test]
    fn deterministic_under_seed() {
        let task =
            QuboTask::new(vec![vec![0.3, 1.0, -0.4], vec![0.0, 0.1, 0.8], vec![0.0; 3]], vec![-1.0, 0.2, -0.6], 0.0)
                .unwrap();
        let cfg = QaoaConfig { seed: 42, ..QaoaConfig::default() };
        assert_eq!(qaoa_solve(&task, &cfg).unwrap(), qaoa_solve(&task, &cfg).unwrap());
    }
}
