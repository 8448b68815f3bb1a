use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hazdep_cli::csv::GridCsv;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hazdep"));
    cmd.env_remove("HAZDEP_THREADS");
    cmd
}

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn write_spec(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_csv(out: &Output) -> GridCsv {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    GridCsv::parse(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

fn gamma_grid(model: &Path, extra: &[&str]) -> GridCsv {
    let mut args = vec!["gamma-grid", "--model", s(model), "--resolution", "21"];
    args.extend_from_slice(extra);
    stdout_csv(&run(&args))
}

#[test]
fn clayton_corner_is_one() {
    let g = gamma_grid(&spec("clayton.json"), &[]);
    assert_eq!(g.rows.len(), 21 * 21);
    assert_eq!(g.columns, ["u1", "u2", "value"]);
    assert_eq!(g.rows[0], [0.0, 0.0, 1.0]);
    assert_eq!(g.meta("route"), Some("closed-form"));
}

#[test]
fn proportional_grid_is_minus_beta() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_spec(dir.path(), "prop.json", r#"{"schema": 1, "type": "prop", "beta": 1.0}"#);
    let g = gamma_grid(&m, &[]);
    assert!(g.values().iter().all(|&v| v == -1.0));
}

#[test]
fn chisq_corner_is_twice_rho_squared() {
    let dir = tempfile::tempdir().unwrap();
    let r = 0.9f64.sqrt();
    let m = write_spec(dir.path(), "chisq.json", &format!(r#"{{"schema": 1, "type": "chisq3", "rho": [{r}, 0.0, 0.0]}}"#));
    let g = gamma_grid(&m, &["--pair", "1,2"]);
    assert!((g.rows[0][2] - 1.8).abs() < 1e-10);
    let g13 = gamma_grid(&m, &["--pair", "1,3"]);
    assert!(g13.values().iter().all(|v| v.abs() < 1e-10));
}

#[test]
fn fd_route_is_selectable_and_recorded() {
    let g = gamma_grid(&spec("clayton.json"), &["--route", "fd-pipeline"]);
    assert_eq!(g.meta("route"), Some("fd-pipeline"));
    let cf = gamma_grid(&spec("clayton.json"), &[]);
    for (a, b) in g.rows.iter().zip(&cf.rows) {
        assert!((a[2] - b[2]).abs() < 1e-4, "{a:?} vs {b:?}");
    }
}

#[test]
fn unsupported_pair_is_a_capability_error() {
    let out = run(&["gamma-grid", "--model", s(&spec("clayton.json")), "--pair", "1,3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("capability"));
}

#[test]
fn output_file_roundtrips_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("frank.csv");
    let m = write_spec(dir.path(), "frank.json", r#"{"schema": 1, "type": "frank", "theta": -2.0}"#);
    let status = bin().args(["gamma-grid", "--model", s(&m), "--resolution", "31", "--out", s(&out)]).status().unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let parsed = GridCsv::read(&out).unwrap();
    assert_eq!(parsed.render(), text);
    assert_eq!(parsed.rows.len(), 31 * 31);
    assert_eq!(parsed.meta("model"), Some("frank(theta=-2)"));
}

#[test]
fn independence_exponents_vanish() {
    let out = run(&["factorize", "--model", s(&spec("independence.json")), "--subset", "1,2,3", "--grid", "0:2:5"]);
    let g = stdout_csv(&out);
    assert_eq!(g.rows.len(), 125);
    assert!(g.values().iter().all(|&v| v == 0.0));
}

#[test]
fn clayton_pair_exponent_at_one_one() {
    let out = run(&["factorize", "--model", s(&spec("clayton.json")), "--subset", "1,2", "--grid", "0,0.5,1"]);
    let g = stdout_csv(&out);
    assert_eq!(g.columns, ["t1", "t2", "value"]);
    let last = g.rows.last().unwrap();
    assert_eq!(&last[..2], [1.0, 1.0]);
    assert!((last[2] - (4.0f64 / 3.0).ln()).abs() < 1e-10);
}

#[test]
fn three_atom_measure_on_the_box() {
    let out = run(&["factorize", "--model", s(&spec("minid_three_atoms.json")), "--subset", "1,2", "--grid", "0,0.6"]);
    let g = stdout_csv(&out);
    assert_eq!(g.columns, ["u1", "u2", "value"]);
    assert!((g.rows.last().unwrap()[2] - 0.2).abs() < 1e-12);
}

#[test]
fn per_axis_grid_items() {
    let out = run(&["factorize", "--model", s(&spec("chisq3.json")), "--subset", "1,3", "--grid", "0:1:3;0,2"]);
    let g = stdout_csv(&out);
    assert_eq!(g.columns, ["t1", "t3", "value"]);
    assert_eq!(g.rows.len(), 6);
    let bad = run(&["factorize", "--model", s(&spec("chisq3.json")), "--subset", "1,3", "--grid", "0:1:3;0,2;1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn sampling_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = ["a.csv", "b.csv", "c.csv"].iter().map(|n| dir.path().join(n)).collect();
    for (p, seed) in paths.iter().zip(["7", "7", "8"]) {
        let st = bin()
            .args(["sample", "--model", s(&spec("chisq3.json")), "-n", "500", "--seed", seed, "--out", s(p)])
            .status()
            .unwrap();
        assert!(st.success());
    }
    let read = |p: &Path| std::fs::read(p).unwrap();
    assert_eq!(read(&paths[0]), read(&paths[1]));
    assert_ne!(read(&paths[0]), read(&paths[2]));
    let g = GridCsv::read(&paths[0]).unwrap();
    assert_eq!(g.columns, ["t1", "t2", "t3"]);
    assert_eq!(g.meta("seed"), Some("7"));
    assert_eq!(g.rows.len(), 500);
}

#[test]
fn thread_count_does_not_change_samples() {
    let model = spec("clayton.json");
    let args = ["sample", "--model", s(&model), "-n", "2000", "--seed", "3"];
    let one = bin().env("HAZDEP_THREADS", "1").args(args).output().unwrap();
    let many = bin().env("HAZDEP_THREADS", "4").args(args).output().unwrap();
    assert!(one.status.success() && many.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn unit_frailty_gives_standard_exponential_means() {
    let n = 1_000_000;
    let out = run(&["sample", "--model", s(&spec("unit_frailty.json")), "-n", &n.to_string(), "--seed", "11"]);
    let g = stdout_csv(&out);
    let bound = 3.0 / (n as f64).sqrt();
    for col in ["t1", "t2"] {
        let v = g.column(col).unwrap();
        let mean = v.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < bound, "{col} mean {mean}");
    }
}

#[test]
fn clayton_empirical_survival_at_one_one() {
    let n = 200_000;
    let out = run(&["sample", "--model", s(&spec("clayton.json")), "-n", &n.to_string(), "--seed", "5"]);
    let g = stdout_csv(&out);
    let hits = g.rows.iter().filter(|r| r[0] > 1.0 && r[1] > 1.0).count() as f64 / n as f64;
    let p = 1.0 / 3.0;
    assert!((hits - p).abs() < 3.0 * (p * (1.0 - p) / n as f64).sqrt(), "{hits}");
}

#[test]
fn target_marginals_reshape_samples() {
    let n = 100_000;
    let out = run(&["sample", "--model", s(&spec("clayton_weibull_lomax.json")), "-n", &n.to_string(), "--seed", "9"]);
    let g = stdout_csv(&out);
    // Weibull(1.5, 2) survival at 2 is e^{-1}; Lomax(3) survival at 1 is 2^{-3}.
    let p1 = g.column("t1").unwrap().iter().filter(|&&t| t > 2.0).count() as f64 / n as f64;
    let p2 = g.column("t2").unwrap().iter().filter(|&&t| t > 1.0).count() as f64 / n as f64;
    for (hat, p) in [(p1, (-1.0f64).exp()), (p2, 0.125)] {
        assert!((hat - p).abs() < 3.0 * (p * (1.0 - p) / n as f64).sqrt(), "{hat} vs {p}");
    }
}

#[test]
fn sampling_without_a_sampler_is_a_capability_error() {
    let out = run(&["sample", "--model", s(&spec("fgm.json")), "-n", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
}

#[test]
fn spec_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown.json", r#"{"schema": 1, "type": "clayton", "theta": 2.0}"#),
        ("schema.json", r#"{"schema": 2, "type": "clayton"}"#),
        ("noschema.json", r#"{"type": "clayton"}"#),
        ("family.json", r#"{"schema": 1, "type": "gumbel"}"#),
        ("param.json", r#"{"schema": 1, "type": "frank", "theta": 0.0}"#),
        ("margins.json", r#"{"schema": 1, "type": "clayton", "marginals": [{"kind": "uniform"}]}"#),
        ("syntax.json", r#"{"schema": 1, "type": "#),
    ];
    for (name, json) in cases {
        let m = write_spec(dir.path(), name, json);
        let out = run(&["gamma-grid", "--model", s(&m)]);
        assert_eq!(out.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn missing_files_name_the_path() {
    let out = run(&["gamma-grid", "--model", "/nonexistent/model.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/model.json"));
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let out = run(&["gamma-grid", "--model", s(&spec("clayton.json")), "--out", s(&target)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out.csv"));
}

#[test]
fn numeric_domain_errors_exit_three() {
    let out = run(&["factorize", "--model", s(&spec("fgm.json")), "--subset", "1,2", "--grid", "0,1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_exit_codes() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    let threads = bin().env("HAZDEP_THREADS", "zero").args(["verify", "--suite", "minid"]).output().unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn verify_prints_a_json_report() {
    let out = run(&["verify", "--suite", "levy"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["suite"], "levy");
    assert_eq!(report["passed"], true);
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"] == true && c["name"].is_string()));
}

#[test]
fn verify_writes_the_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&["verify", "--suite", "minid", "--out", s(&path)]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["suite"], "minid");
}
