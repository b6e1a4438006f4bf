use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_weyl-lab"));
    c.env_remove("WEYL_LAB_WORKERS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Value after `key ` on its own stdout line.
fn field(o: &Output, key: &str) -> f64 {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no `{key}` in {}", stdout(o)))
        .parse()
        .unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn quantize_writes_a_hermitian_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let o = run(&[
        "quantize",
        "--symbol",
        "x^2+xi^2",
        "--d",
        "1",
        "--N",
        "64",
        "--method",
        "monomial",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(field(&o, "hermitian_deviation") <= 1e-10);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["config"]["N"], 64);
    let m: weyl_lab::fock::FockMatrix = serde_json::from_value(json["matrix"].clone()).unwrap();
    assert_eq!(m.n(), 64);
    assert!((m.entry(3, 3).re - 7.0).abs() <= 1e-12);
}

#[test]
fn syntax_errors_exit_2_with_a_position() {
    let o = run(&["quantize", "--symbol", "x +", "--N", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position"));
}

#[test]
fn kernel_identity_has_unit_norm() {
    let o = run(&["quantize", "--symbol", "1", "--N", "32", "--method", "kernel"]);
    assert_eq!(o.status.code(), Some(0));
    assert!((field(&o, "operator_norm") - 1.0).abs() <= 1e-8);
}

#[test]
fn binary_matrix_has_header_payload_and_config_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.bin");
    let o = run(&["quantize", "--symbol", "x*xi", "--N", "8", "--format", "binary", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let bytes = std::fs::read(&out).unwrap();
    assert_eq!(bytes.len(), 32 + 16 * 64);
    assert_eq!(&bytes[..8], b"WEYL0001");
    let back = weyl_lab::fock::FockMatrix::from_binary(&bytes).unwrap();
    assert!(back.hermitian_deviation() <= 1e-12);
    assert!(dir.path().join("m.bin.config.json").exists());
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    for (symbol, code) in [("xi^2 + x^3", 10), ("cos(x) + xi^2", 0), ("xi^2 + 1/x", 11)] {
        let out = dir.path().join("r.json");
        let o = run(&["check", "--symbol", symbol, "--out", path_str(&out)]);
        assert_eq!(o.status.code(), Some(code), "{symbol}: {}", String::from_utf8_lossy(&o.stderr));
        let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(report["schema"], "weyl-lab-report/1");
    }
}

#[test]
fn bc_csv_has_one_row_per_level_bc_and_box() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bc.csv");
    let o = run(&[
        "bc",
        "--potential",
        "x^3",
        "--L",
        "8,10,12",
        "--grid",
        "4000",
        "--levels",
        "5",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_path(&out).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["L", "bc", "level", "eigenvalue"]);
    assert_eq!(reader.records().count(), 2 * 3 * 5);
}

#[test]
fn oracle_ladder_entry_matches_the_fast_path() {
    let o = run(&["oracle", "ladder-entry", "--row", "0", "--col", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("oracle 0.7071067"));
    assert!(field(&o, "difference") <= 1e-12);
}

#[test]
fn oracle_paths_agree() {
    let cases: [&[&str]; 5] = [
        &["oracle", "kernel-element", "--symbol", "cos(x)*cos(xi)", "--row", "1", "--col", "3"],
        &["oracle", "toeplitz-entry", "--symbol", "x^2+sin(xi)", "--row", "2", "--col", "0"],
        &["oracle", "heat-value", "--symbol", "cos(x)*xi^2", "--x", "0.3", "--xi", "-1"],
        &["oracle", "weyl-entry", "--x", "0.5", "--xi", "-0.3", "--row", "1", "--col", "2"],
        &["oracle", "coherent-overlap", "--z", "0.5,-0.2", "--w", "1,1"],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert!(field(&o, "difference") <= 1e-8, "{args:?}: {}", stdout(&o));
    }
}

#[test]
fn toeplitz_heat_verification() {
    let o = run(&["toeplitz", "--symbol", "(x^2+xi^2)/2", "--N", "64", "--verify-heat"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(field(&o, "heat_residual") <= 1e-4);
}

#[test]
fn spectrum_of_the_oscillator() {
    let o = run(&["spectrum", "--symbol", "(x^2+xi^2)/2", "--N", "32", "--levels", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(o.stdout.as_slice());
    let ev: Vec<f64> = reader.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(ev.len(), 6);
    for (n, e) in ev.iter().enumerate() {
        assert!((e - (n as f64 + 0.5)).abs() <= 1e-10);
    }
}

#[test]
fn sampled_gaussian_has_unit_norm() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.bin");
    let s = run(&[
        "sample",
        "--symbol",
        "exp(-(x^2+xi^2))",
        "--half-width",
        "8",
        "--points",
        "64",
        "--out",
        path_str(&file),
    ]);
    assert_eq!(s.status.code(), Some(0));
    let o = run(&["mnorm", "--sampled", path_str(&file)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!((field(&o, "value") - 1.0).abs() <= 0.05);
    assert!(stdout(&o).contains("converged true"));
    let x = run(&["mnorm", "--symbol", "x"]);
    assert!(stdout(&x).contains("converged false"));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"N": 16, "method": "kernel"}"#).unwrap();
    let out = dir.path().join("m.json");
    let o = run(&["--config", path_str(&cfg), "quantize", "--symbol", "x", "--N", "8", "--out", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["config"]["N"], 8);
    assert_eq!(json["config"]["method"], "kernel");
    assert_eq!(json["matrix"]["method"], "KERNEL_QUADRATURE");
}

#[test]
fn bad_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"N": 16, "colour": "blue"}"#).unwrap();
    let o = run(&["--config", path_str(&cfg), "quantize", "--symbol", "x"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&cfg, r#"{"N": 16, "M": 12}"#).unwrap();
    let o = run(&["--config", path_str(&cfg), "toeplitz", "--symbol", "x"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bin().args(["quantize", "--symbol", "x"]).env("WEYL_LAB_WORKERS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn artifacts_do_not_depend_on_the_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let symbol = "cos(x)*cos(xi)";
    let o1 = run(&["--workers", "1", "check", "--symbol", symbol, "--out", path_str(&a)]);
    let o2 =
        bin().args(["check", "--symbol", symbol, "--out", path_str(&b)]).env("WEYL_LAB_WORKERS", "4").output().unwrap();
    assert_eq!(o1.status.code(), Some(0));
    assert_eq!(o2.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
