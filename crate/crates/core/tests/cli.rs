use std::process::{Command, Output};

use serde_json::Value;

fn qfin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfin")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn close(v: &Value, want: f64, tol: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() < tol
}

#[test]
fn risk_fixtures_in_exact_mode() {
    let r = json(&qfin(&["risk", "--probabilities", &data("cnb_risk_8.txt")]));
    let q = &r["quantum"];
    assert!(close(&q["expected_value_bins"], 3.584, 1e-3));
    assert!(close(&q["std_dev_bins"], 0.948, 1e-3));
    assert_eq!(q["levels"][0]["var_bins"], 2);
    assert_eq!(q["levels"][1]["var_bins"], 1);
    let r = json(&qfin(&["risk", "--fixture", "cnb16"]));
    assert!(close(&r["quantum"]["levels"][0]["cvar_bins"], 3.137, 1e-3));
}

#[test]
fn risk_is_byte_identical_for_a_seed() {
    let args = ["risk", "--fixture", "cnb8", "--shots", "8192", "--seed", "7"];
    let (a, b) = (qfin(&args), qfin(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, qfin(&["risk", "--fixture", "cnb8", "--shots", "8192", "--seed", "8"]).stdout);
}

#[test]
fn risk_from_series() {
    let dir = std::env::temp_dir().join(format!("qfin-series-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("pl.csv");
    std::fs::write(&path, "date,pl\n2021-01-04,-3\n2021-01-05,-0.5\n2021-01-06,2\n2021-01-07,5\n").unwrap();
    let r = json(&qfin(&["risk", "--series", path.to_str().unwrap(), "--bins", "4", "--lo", "-4", "--hi", "6"]));
    assert_eq!(r["distribution"]["probabilities"], serde_json::json!([0.25, 0.25, 0.25, 0.25]));
    let bad = qfin(&["risk", "--series", path.to_str().unwrap(), "--bins", "6"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn balance_portfolio_and_demos() {
    let r = json(&qfin(&["balance", "--input", &data("bonds_equities.csv"), "--gain", "7"]));
    let w = &r["classical"]["weights"];
    assert!(close(&w[0], 0.8956, 1e-4) && close(&w[1], 0.1044, 1e-4));
    assert_eq!(r["eigenvalues"].as_array().unwrap().len(), 4);
    let r = json(&qfin(&["balance", "--system", "diag-demo", "-t", "4"]));
    let x = &r["hhl"]["denormalized"];
    for (i, want) in [1.0, 0.5, 1.0 / 3.0, 0.25].iter().enumerate() {
        assert!(close(&x[i][0], *want, 1e-6));
    }
    let r = json(&qfin(&["balance", "--circuit", "fig12", "--theta", "pi/4", "--shots", "8192", "--seed", "0"]));
    assert!(close(&r["hhl"]["solution"][0][0], std::f64::consts::FRAC_1_SQRT_2, 0.03));
    assert!(close(&r["hhl"]["solution"][1][0], std::f64::consts::FRAC_1_SQRT_2, 0.03));
}

#[test]
fn pick_defaults_and_flags() {
    let r = json(&qfin(&["pick"]));
    assert_eq!(r["qaoa"]["best_bits"], "11010");
    assert!(close(&r["qaoa"]["best_objective"], -0.2218, 1e-4));
    assert_eq!(r["agrees_with_brute_force"], true);
    let r = json(&qfin(&["pick", "--brute-force-only", "--input", &data("semis.csv")]));
    assert_eq!(r["brute_force"]["rows"].as_array().unwrap().len(), 32);
    assert!(r.get("qaoa").is_none());
    let r = json(&qfin(&["pick", "--m", "0", "--brute-force-only"]));
    assert_eq!(r["optimum"]["bits"], "00000");
    assert_eq!(r["optimum"]["objective"], 0.0);
}

#[test]
fn decohere_curves() {
    let out = qfin(&["decohere", "--mode", "relax", "--idles", "200", "--shots", "2048"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let p1: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(p1.len(), 201);
    assert!(p1[0] == 1.0 && p1[200] < 0.2);
    let out = qfin(&["decohere", "--mode", "dephase", "--idles", "0"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "k,p1,expected\n0,0,0\n");
}

#[test]
fn manifest_replays() {
    let dir = std::env::temp_dir().join(format!("qfin-manifest-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("m.json");
    let first = qfin(&["--manifest", path.to_str().unwrap(), "pick", "--seed", "3", "--input", &data("semis.csv")]);
    assert!(first.status.success());
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "pick");
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(manifest["rng_algorithm"].as_str().unwrap().contains("ChaCha8"));
    let argv: Vec<String> =
        manifest["parameters"]["argv"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    let replay = Command::new(&argv[0]).args(&argv[1..]).output().unwrap();
    assert_eq!(first.stdout, replay.stdout);
}

#[test]
fn exit_codes_separate_input_and_numerical_failures() {
    assert_eq!(qfin(&["risk", "--probabilities", "/no/such/file"]).status.code(), Some(2));
    assert_eq!(qfin(&["pick", "--input", &data("cnb_risk_8.txt")]).status.code(), Some(2));
    assert_eq!(qfin(&["frobnicate"]).status.code(), Some(2));
    // Identical returns make the portfolio system singular.
    let dir = std::env::temp_dir().join(format!("qfin-singular-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("flat.csv");
    std::fs::write(&path, "label,A,B\nreturns,1,1\nprices,1,1\nA,1,0\nB,0,1\n").unwrap();
    assert_eq!(qfin(&["balance", "--input", path.to_str().unwrap(), "--gain", "1"]).status.code(), Some(3));
}
