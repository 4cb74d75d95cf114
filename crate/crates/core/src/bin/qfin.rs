use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use qfin::error::{QfinError, Result};
use qfin::fixtures;
use qfin::hhl::{
    build_portfolio_system, classical_solve, hhl_2x2_reference, hhl_solve, LinearSystem, PortfolioSpec, TimeScale,
};
use qfin::io::{self, InputDigest, RunManifest};
use qfin::noise::{dephasing_experiment, relaxation_experiment, NoiseParams};
use qfin::qaoa::{qaoa_solve, QaoaConfig};
use qfin::qubo::{brute_force, build_portfolio_qubo, exactly_m_ones};
use qfin::readout::Mode;
use qfin::risk::{classical_risk_oracle, discretize, DiscreteDistribution, OutlierPolicy, QuantumRisk};

/// Quantum finance experiments on a statevector simulator.
///
/// Results go to stdout (JSON, or CSV for `decohere`). A run manifest with
/// parameters, seed, input digests and timing goes to stderr or to
/// `--manifest`.
#[derive(Parser, Debug)]
#[command(name = "qfin", version)]
struct Cli {
    /// Write the run manifest here instead of stderr.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Worker threads for parallel restarts and shots (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Expected value, standard deviation, VaR and CVaR of a P/L histogram.
    Risk(RiskArgs),
    /// Minimum-variance weights for a required return, classically and by HHL.
    Balance(BalanceArgs),
    /// Choose m assets by QUBO brute force and QAOA.
    Pick(PickArgs),
    /// Relaxation or dephasing curve over repeated idle gates.
    Decohere(DecohereArgs),
}

#[derive(Args, Debug)]
struct SamplingArgs {
    /// Sample this many shots instead of reading exact probabilities.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SamplingArgs {
    fn mode(&self) -> Result<Mode> {
        match self.shots {
            None => Ok(Mode::Exact),
            Some(0) => Err(QfinError::ZeroShots),
            Some(shots) => Ok(Mode::Sampled { shots, seed: self.seed }),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Fixture {
    /// 8-bin histogram over ±86.667 bp.
    Cnb8,
    /// 16-bin histogram over ±74.286 bp.
    Cnb16,
}

#[derive(Args, Debug)]
struct RiskArgs {
    /// Built-in histogram.
    #[arg(long, value_enum, conflicts_with_all = ["probabilities", "series"])]
    fixture: Option<Fixture>,
    /// Probability array file (sums to 100 or 1).
    #[arg(long, conflicts_with = "series")]
    probabilities: Option<PathBuf>,
    /// P/L series CSV, one value per line with an optional date column.
    #[arg(long)]
    series: Option<PathBuf>,
    /// Histogram bins for --series (power of two).
    #[arg(long, default_value_t = 8)]
    bins: usize,
    /// Lower edge of the value range (default: series minimum).
    #[arg(long, allow_hyphen_values = true)]
    lo: Option<f64>,
    /// Upper edge of the value range (default: series maximum).
    #[arg(long, allow_hyphen_values = true)]
    hi: Option<f64>,
    /// Drop out-of-range values instead of clipping them into the end bins.
    #[arg(long)]
    drop_outliers: bool,
    /// Significance levels.
    #[arg(long, value_delimiter = ',', default_values_t = [0.95, 0.99])]
    alpha: Vec<f64>,
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum DemoSystem {
    /// diag(1, 2, 3, 4) with b = (1, 1, 1, 1).
    DiagDemo,
    /// (H⊗H) diag(1, 2, 3, 4) (H⊗H) with b = (0, 1, 1, 0).
    HadamardDemo,
    /// diag(−1, 2, 3, 4) with b = (−1, 1, 1, 1).
    SignedDemo,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DemoCircuit {
    /// Fixed 5-qubit circuit for [[1.5, 0.5], [0.5, 1.5]] x = (cos θ, sin θ).
    Fig12,
}

#[derive(Args, Debug)]
struct BalanceArgs {
    /// Asset table CSV with returns, prices and covariance
    /// (default: bundled fixed income vs equities, percent units).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Required portfolio return, in the units of the returns row.
    #[arg(long, allow_hyphen_values = true)]
    gain: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    budget: f64,
    /// Solve a small test system instead of a portfolio.
    #[arg(long, value_enum, conflicts_with = "circuit")]
    system: Option<DemoSystem>,
    /// Run a fixed reference circuit.
    #[arg(long, value_enum)]
    circuit: Option<DemoCircuit>,
    /// Right-hand-side angle for --circuit, e.g. `pi/4` or `0.6`.
    #[arg(long, default_value = "pi/4")]
    theta: String,
    /// Clock qubits.
    #[arg(long, short = 't', default_value_t = 8)]
    clock: usize,
    /// `gershgorin`, `spectral` or a fixed evolution time. Defaults to
    /// `gershgorin` for portfolios and 2π/2^t for the integer demo systems.
    #[arg(long)]
    time_scale: Option<String>,
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Args, Debug)]
struct PickArgs {
    /// Asset table CSV (default: bundled five semiconductor shares).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Number of assets to hold.
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    lambda_return: f64,
    #[arg(long, default_value_t = 4.0)]
    lambda_risk: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda_count: f64,
    /// Print the objective table only.
    #[arg(long)]
    brute_force_only: bool,
    /// QAOA layers.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = 1024)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    restarts: usize,
    /// Objective evaluations per restart.
    #[arg(long, default_value_t = 60)]
    max_evals: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NoiseMode {
    Relax,
    Dephase,
}

#[derive(Args, Debug)]
struct DecohereArgs {
    #[arg(long, value_enum)]
    mode: NoiseMode,
    /// Relaxation time, µs.
    #[arg(long, default_value_t = 10.0)]
    t1: f64,
    /// Dephasing time, µs.
    #[arg(long, default_value_t = 8.0)]
    t2: f64,
    /// Duration of one idle gate, µs.
    #[arg(long, default_value_t = 0.1)]
    idle_step: f64,
    /// Largest idle count; the curve covers 0..=idles.
    #[arg(long, alias = "max-idles", default_value_t = 200)]
    idles: usize,
    #[arg(long, default_value_t = 8192)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

struct Output {
    body: String,
    manifest: RunManifest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("warning: {e}");
        }
    }
    let started = Instant::now();
    let result = match &cli.command {
        Command::Risk(a) => cmd_risk(a),
        Command::Balance(a) => cmd_balance(a),
        Command::Pick(a) => cmd_pick(a),
        Command::Decohere(a) => cmd_decohere(a),
    };
    match result {
        Ok(out) => {
            print!("{}", out.body);
            let mut manifest = out.manifest.finish(started.elapsed());
            manifest.parameters["argv"] = json!(std::env::args().collect::<Vec<_>>());
            let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
            match &cli.manifest {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text + "\n") {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => eprintln!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}

fn to_json(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("output serializes") + "\n"
}

fn load_distribution(a: &RiskArgs, inputs: &mut Vec<InputDigest>) -> Result<DiscreteDistribution> {
    if let Some(path) = &a.series {
        let text = io::read_text(path)?;
        inputs.push(InputDigest::of(path, &text));
        let series = io::parse_pl_series(&text)?;
        let lo = a.lo.unwrap_or_else(|| series.iter().copied().fold(f64::INFINITY, f64::min));
        let hi = a.hi.unwrap_or_else(|| series.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        let policy = if a.drop_outliers { OutlierPolicy::Drop } else { OutlierPolicy::Clip };
        return discretize(&series, a.bins, (lo, hi), policy);
    }
    if let Some(path) = &a.probabilities {
        let text = io::read_text(path)?;
        inputs.push(InputDigest::of(path, &text));
        let (weights, _) = io::parse_probability_array(&text)?;
        let dist = DiscreteDistribution::from_weights(&weights, path.display().to_string())?;
        return match (a.lo, a.hi) {
            (Some(lo), Some(hi)) => dist.with_range(lo, hi),
            (None, None) => Ok(dist),
            _ => Err(QfinError::InvalidArgument("--lo and --hi go together".into())),
        };
    }
    match a.fixture.unwrap_or(Fixture::Cnb8) {
        Fixture::Cnb8 => fixtures::risk_8(),
        Fixture::Cnb16 => fixtures::risk_16(),
    }
}

fn cmd_risk(a: &RiskArgs) -> Result<Output> {
    let mode = a.sampling.mode()?;
    let mut inputs = Vec::new();
    let dist = load_distribution(a, &mut inputs)?;
    let classical = classical_risk_oracle(&dist, &a.alpha)?;
    let mut q = QuantumRisk::new(&dist, mode)?;
    let quantum = q.report(&a.alpha)?;
    let edges = dist.bin_edges();
    let body = json!({
        "distribution": {
            "label": dist.label(),
            "bins": dist.len(),
            "probabilities": dist.probabilities(),
            "bin_edges": edges,
        },
        "quantum": quantum,
        "quantum_units": edges.map(|e| quantum.bounds(Some(e))).transpose()?,
        "classical": classical,
        "classical_units": edges.map(|e| classical.bounds(Some(e))).transpose()?,
        "circuits_run": q.circuits_run(),
    });
    let params = json!({ "bins": dist.len(), "alpha": a.alpha, "mode": mode });
    let mut manifest = RunManifest::new("risk", params, a.sampling.shots.map(|_| a.sampling.seed));
    manifest.inputs = inputs;
    Ok(Output { body: to_json(&body), manifest })
}

fn parse_angle(text: &str) -> Result<f64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
    let bad = || QfinError::Parse(format!("angle `{text}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d.parse::<f64>().map_err(|_| bad())?),
        None => (s.as_str(), 1.0),
    };
    let value = match num.strip_suffix("pi") {
        Some("") => PI,
        Some("-") => -PI,
        Some(coef) => coef.trim_end_matches('*').parse::<f64>().map_err(|_| bad())? * PI,
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(value / den)
}

fn parse_time_scale(text: &str) -> Result<TimeScale> {
    match text {
        "gershgorin" => Ok(TimeScale::Gershgorin),
        "spectral" => Ok(TimeScale::Spectral),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0)
            .map(TimeScale::Fixed)
            .ok_or_else(|| QfinError::Parse(format!("time scale `{other}`"))),
    }
}

fn demo_system(which: DemoSystem) -> Result<LinearSystem> {
    let diag = |d: [f64; 4]| -> Vec<Vec<f64>> {
        (0..4).map(|i| (0..4).map(|j| if i == j { d[i] } else { 0.0 }).collect()).collect()
    };
    match which {
        DemoSystem::DiagDemo => LinearSystem::real(&diag([1.0, 2.0, 3.0, 4.0]), &[1.0; 4]),
        DemoSystem::SignedDemo => LinearSystem::real(&diag([-1.0, 2.0, 3.0, 4.0]), &[-1.0, 1.0, 1.0, 1.0]),
        DemoSystem::HadamardDemo => {
            // (H⊗H)_{ij} = (−1)^{popcount(i & j)} / 2.
            let hh = |i: usize, j: usize| if (i & j).count_ones().is_multiple_of(2) { 0.5 } else { -0.5 };
            let d = [1.0, 2.0, 3.0, 4.0];
            let rows: Vec<Vec<f64>> =
                (0..4).map(|i| (0..4).map(|j| (0..4).map(|k| hh(i, k) * d[k] * hh(k, j)).sum()).collect()).collect();
            LinearSystem::real(&rows, &[0.0, 1.0, 1.0, 0.0])
        }
    }
}

fn re(v: &[Complex64]) -> Vec<f64> {
    v.iter().map(|z| z.re).collect()
}

fn cmd_balance(a: &BalanceArgs) -> Result<Output> {
    let mode = a.sampling.mode()?;
    let seed = a.sampling.shots.map(|_| a.sampling.seed);
    if let Some(DemoCircuit::Fig12) = a.circuit {
        let theta = parse_angle(&a.theta)?;
        let result = hhl_2x2_reference(theta, mode)?;
        let sys = LinearSystem::real(&[vec![1.5, 0.5], vec![0.5, 1.5]], &[theta.cos(), theta.sin()])?;
        let classical = classical_solve(&sys)?;
        let body = json!({
            "circuit": "fig12",
            "theta": theta,
            "hhl": result,
            "classical_normalized": re(&classical.normalized),
        });
        let params = json!({ "circuit": "fig12", "theta": theta, "mode": mode });
        return Ok(Output { body: to_json(&body), manifest: RunManifest::new("balance", params, seed) });
    }
    let time_scale = match (&a.time_scale, a.system) {
        (Some(text), _) => parse_time_scale(text)?,
        (None, Some(_)) => TimeScale::Fixed(2.0 * PI / (1u64 << a.clock.min(62)) as f64),
        (None, None) => TimeScale::Gershgorin,
    };
    let mut inputs = Vec::new();
    let (label, sys, labels) = match a.system {
        Some(which) => (format!("{which:?}"), demo_system(which)?, None),
        None => {
            let spec = match &a.input {
                Some(path) => {
                    let text = io::read_text(path)?;
                    inputs.push(InputDigest::of(path, &text));
                    let t = io::parse_asset_table(&text)?;
                    let n = t.labels.len();
                    let gain =
                        a.gain.ok_or_else(|| QfinError::InvalidArgument("--gain is required with --input".into()))?;
                    let spec = PortfolioSpec {
                        covariance: t.covariance,
                        returns: t.returns,
                        prices: t.prices.unwrap_or_else(|| vec![1.0; n]),
                        gain,
                        budget: a.budget,
                    };
                    (spec, Some(t.labels))
                }
                None => {
                    let mut spec = fixtures::bonds_equities();
                    spec.gain = a.gain.unwrap_or(spec.gain);
                    spec.budget = a.budget;
                    (spec, Some(vec!["fixed income".to_string(), "equities".to_string()]))
                }
            };
            ("portfolio".to_string(), build_portfolio_system(&spec.0)?, spec.1)
        }
    };
    let classical = classical_solve(&sys)?;
    let hhl = hhl_solve(&sys, a.clock, time_scale, mode)?;
    let weights = |x: &[Complex64]| -> Value {
        let total: f64 = x.iter().map(|z| z.re).sum();
        json!(x.iter().map(|z| z.re / total).collect::<Vec<_>>())
    };
    let mut body = json!({
        "system": label,
        "matrix": sys.matrix().row_iter().map(|r| r.iter().map(|z| z.re).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "rhs": re(sys.rhs().as_slice()),
        "eigenvalues": classical.eigenvalues,
        "condition_number": classical.condition_number,
        "classical": { "solution": re(&classical.solution), "normalized": re(&classical.normalized) },
        "hhl": hhl,
    });
    if let Some(labels) = labels {
        // Weights are the trailing unknowns after the two multipliers.
        let n = labels.len();
        body["assets"] = json!(labels);
        body["classical"]["weights"] = weights(&classical.solution[2..2 + n]);
        body["hhl_weights"] = weights(&hhl.denormalized[2..2 + n]);
    }
    let params = json!({ "system": label, "clock": a.clock, "time_scale": time_scale, "gain": a.gain, "budget": a.budget, "mode": mode });
    let mut manifest = RunManifest::new("balance", params, seed);
    manifest.inputs = inputs;
    Ok(Output { body: to_json(&body), manifest })
}

fn cmd_pick(a: &PickArgs) -> Result<Output> {
    let mut inputs = Vec::new();
    let (labels, returns, covariance) = match &a.input {
        Some(path) => {
            let text = io::read_text(path)?;
            inputs.push(InputDigest::of(path, &text));
            let t = io::parse_asset_table(&text)?;
            (t.labels, t.returns, t.covariance)
        }
        None => (
            fixtures::SEMI_LABELS.iter().map(|s| s.to_string()).collect(),
            fixtures::SEMI_RETURNS.to_vec(),
            fixtures::semi_covariance(),
        ),
    };
    let lambdas = (a.lambda_return, a.lambda_risk, a.lambda_count);
    let task = build_portfolio_qubo(&returns, &covariance, a.m, lambdas)?.with_labels(labels.clone())?;
    let feasible = exactly_m_ones(a.m);
    let table = brute_force(&task, Some(&feasible))?;
    let optimum = table.optimum_row().clone();
    let mut body = json!({ "assets": labels, "brute_force": table });
    let mut seed = None;
    if !a.brute_force_only {
        let config = QaoaConfig {
            depth: a.depth,
            max_evaluations: a.max_evals,
            shots: a.shots,
            seed: a.seed,
            restarts: a.restarts,
            ..QaoaConfig::default()
        };
        let outcome = qaoa_solve(&task, &config)?;
        body["agrees_with_brute_force"] = json!(outcome.best_bits == optimum.bits);
        body["qaoa"] = json!(outcome);
        body["qaoa_config"] = json!(config);
        seed = Some(a.seed);
    }
    body["optimum"] = json!(optimum);
    let params = json!({
        "m": a.m, "lambdas": [a.lambda_return, a.lambda_risk, a.lambda_count],
        "brute_force_only": a.brute_force_only, "depth": a.depth, "shots": a.shots,
        "restarts": a.restarts, "max_evals": a.max_evals,
    });
    let mut manifest = RunManifest::new("pick", params, seed);
    manifest.inputs = inputs;
    Ok(Output { body: to_json(&body), manifest })
}

fn cmd_decohere(a: &DecohereArgs) -> Result<Output> {
    let params = NoiseParams::new(a.t1, a.t2, a.idle_step)?;
    let curve = match a.mode {
        NoiseMode::Relax => relaxation_experiment(&params, a.idles, a.shots, a.seed)?,
        NoiseMode::Dephase => dephasing_experiment(&params, a.idles, a.shots, a.seed)?,
    };
    let manifest = RunManifest::new(
        "decohere",
        json!({ "mode": curve.channel, "t1": a.t1, "t2": a.t2, "idle_step": a.idle_step, "idles": a.idles, "shots": a.shots }),
        Some(a.seed),
    );
    Ok(Output { body: curve.to_csv(), manifest })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn time_scales() {
        assert_eq!(parse_time_scale("spectral").unwrap(), TimeScale::Spectral);
        assert_eq!(parse_time_scale("0.25").unwrap(), TimeScale::Fixed(0.25));
        assert!(parse_time_scale("-1").is_err());
    }

    #[test]
    fn cli_definition() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
