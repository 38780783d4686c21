use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn freeineq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeineq")).args(args).env_remove("FREEINEQ_CONFIG").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn identical_measures_have_zero_functionals() {
    let a = fixture("sharp_c03.json");
    let out = freeineq(&["functionals", path(&a), path(&a)]);
    assert!(out.status.success());
    let v = json(&out);
    for key in ["W1", "H", "I", "J", "TV", "slack_transport", "slack_lsi", "slack_hwi"] {
        assert_eq!(num(&v[key]), 0.0, "{key}");
    }
}

#[test]
fn sharpness_fixture_is_tight() {
    let out = freeineq(&["functionals", path(&fixture("sharp_c03.json")), path(&fixture("arcsine.json")), "--diagnostic"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for key in ["slack_transport", "slack_lsi", "slack_hwi"] {
        assert!(num(&v[key]).abs() < 1e-8, "{key}");
    }
    assert!((num(&v["W1"]) - 0.6).abs() < 1e-12);
}

#[test]
fn atomic_measure_has_infinite_entropy() {
    let out = freeineq(&["functionals", path(&fixture("atoms.json")), path(&fixture("arcsine.json"))]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["H"], "inf");
    assert!(num(&v["W1"]) > 0.0);
}

#[test]
fn numbers_round_trip_with_17_digits() {
    let out = freeineq(&["functionals", path(&fixture("sharp_c03.json")), path(&fixture("arcsine.json"))]);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("\"TV\"")).unwrap();
    let digits = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = digits.split('e').next().unwrap().replace(['.', '-'], "");
    assert_eq!(mantissa.len(), 17, "{digits}");
}

#[test]
fn input_errors_exit_with_one() {
    let missing = freeineq(&["functionals", "/nonexistent/a.json", path(&fixture("arcsine.json"))]);
    assert_eq!(missing.status.code(), Some(1));
    let broken = freeineq(&["functionals", path(&fixture("broken.json")), path(&fixture("arcsine.json"))]);
    assert_eq!(broken.status.code(), Some(1));
    assert_eq!(freeineq(&["equilibrium", "/nonexistent/v.json"]).status.code(), Some(1));
    assert_eq!(freeineq(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn verify_writes_one_row_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v.csv");
    let out = freeineq(&["verify", "--seed", "1", "--samples", "10", "--out", path(&csv), "--diagnostic"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sample_id,W1,H,I,J,slack_t,slack_lsi,slack_hwi");
    assert_eq!(lines.len(), 11);
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed=1"));
}

#[test]
fn verify_with_no_samples_is_header_only() {
    let out = freeineq(&["verify", "--samples", "0"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "sample_id,W1,H,I,J,slack_t,slack_lsi,slack_hwi\n");
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(freeineq(&["verify", "--seed", "7", "--samples", "25", "--out", path(&a)]).status.success());
    assert!(freeineq(&["verify", "--seed", "7", "--samples", "25", "--jobs", "1", "--out", path(&b)]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn diagnostic_mode_flags_the_seeded_counterexample() {
    // sample 525 of this seed violates the HWI bound with the exact W1
    let out = freeineq(&["verify", "--seed", "20240601", "--samples", "526", "--diagnostic"]);
    assert_eq!(out.status.code(), Some(2));
    let plain = freeineq(&["verify", "--seed", "20240601", "--samples", "526"]);
    assert_eq!(plain.status.code(), Some(0));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("freeineq.toml");
    std::fs::write(&cfg, "samples = 4\nseed = 3\n").unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["verify"];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_freeineq")).args(&args).env("FREEINEQ_CONFIG", &cfg).output().unwrap()
    };
    let from_file = run(&[]);
    assert_eq!(String::from_utf8(from_file.stdout).unwrap().lines().count(), 5);
    let from_flag = run(&["--samples", "2"]);
    assert_eq!(String::from_utf8(from_flag.stdout).unwrap().lines().count(), 3);
    std::fs::write(&cfg, "samples = \"many\"\n").unwrap();
    assert_eq!(run(&[]).status.code(), Some(1));
}

#[test]
fn lp_sweep_has_rows_and_slope_footer() {
    let out = freeineq(&["lp-sweep", "--p", "1.5", "--r-min", "0.9", "--r-max", "0.9999", "--steps", "10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("r,terms,"));
    assert_eq!(lines.iter().filter(|l| !l.starts_with('#')).count(), 11);
    let slope = lines.iter().find_map(|l| l.strip_prefix("# slope=")).unwrap();
    assert!(slope.parse::<f64>().unwrap() > 0.0);
}

#[test]
fn lp_sweep_at_two_matches_functionals_j() {
    let (r, eta) = (0.5f64, 0.1f64);
    let out = freeineq(&["lp-sweep", "--p", "2", "--r-min", "0.5", "--r-max", "0.5", "--steps", "1", "--eta", "0.1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let alpha: f64 = row[4].parse().unwrap();

    let mut coeffs = vec![1.0];
    coeffs.extend((0..60).map(|k| eta * r.powi(k)));
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("geo.json");
    std::fs::write(&spec, serde_json::json!({"kind": "cheb", "coeffs": coeffs}).to_string()).unwrap();
    let f = freeineq(&["functionals", path(&spec), path(&fixture("arcsine.json"))]);
    let j = num(&json(&f)["J"]);
    assert!((alpha - j).abs() < 1e-12 * j, "{alpha} vs {j}");
}

#[test]
fn lp_sweep_rejects_radius_one() {
    assert_eq!(freeineq(&["lp-sweep", "--p", "1.5", "--r-max", "1.0"]).status.code(), Some(1));
}

#[test]
fn equilibrium_of_quadratic_potential() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("density.csv");
    let out = freeineq(&["equilibrium", path(&fixture("quadratic.json")), "--cells", "400", "--out", path(&csv)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(num(&v["residual"]) < 5e-3);
    assert!((num(&v["robin_constant"]) - 1.0).abs() < 1e-2);
    assert_eq!(v["transport"]["counterexamples"], 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,weight,density\n"));
    assert_eq!(text.lines().count(), 401);
}

#[test]
fn equilibrium_of_double_well() {
    let out = freeineq(&["equilibrium", path(&fixture("double_well.json")), "--cells", "300"]);
    assert!(out.status.success());
    let v = json(&out);
    for well in v["double_well"]["wells"].as_array().unwrap() {
        assert!(num(&well["sup_hilbert_gap"]) < 1e-6);
    }
    assert_eq!(v["double_well"]["lsi_obstructed"], true);
}
