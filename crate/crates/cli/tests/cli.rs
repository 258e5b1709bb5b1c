use std::path::Path;
use std::process::{Command, Output};

fn weylvm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylvm")).args(args).output().expect("spawn weylvm")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_is_deterministic() {
    let a = weylvm(&["gen", "function", "--orders", "2,3", "--seed", "7"]);
    let b = weylvm(&["gen", "function", "--orders", "2,3", "--seed", "7"]);
    let c = weylvm(&["gen", "function", "--orders", "2,3", "--seed", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);

    let m1 = weylvm(&["gen", "measure", "--orders", "4", "--dim", "2", "--field", "complex", "--lq", "3", "--seed", "1"]);
    let m2 = weylvm(&["gen", "measure", "--orders", "4", "--dim", "2", "--field", "complex", "--lq", "3", "--seed", "1"]);
    assert!(m1.status.success());
    assert_eq!(m1.stdout, m2.stdout);
}

#[test]
fn weyl_and_tconv_paths_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let (f, g) = (dir.path().join("f.json"), dir.path().join("g.json"));
    assert!(weylvm(&["gen", "function", "--orders", "3", "--seed", "1", "--out", path(&f)]).status.success());
    assert!(weylvm(&["gen", "function", "--orders", "3", "--seed", "2", "--out", path(&g)]).status.success());

    let direct = weylvm(&["weyl", "--function", path(&f)]);
    let fft = weylvm(&["weyl", "--function", path(&f), "--fft"]);
    assert!(direct.status.success() && fft.status.success());
    let parse = |o: &Output| serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap();
    let (a, b) = (parse(&direct), parse(&fft));
    let flat = |v: &serde_json::Value| -> Vec<f64> {
        v.to_string()
            .split(|c: char| !(c.is_ascii_digit() || c == '.' || c == '-' || c == 'e' || c == '+'))
            .filter_map(|t| t.parse().ok())
            .collect()
    };
    let (a, b) = (flat(&a), flat(&b));
    assert_eq!(a.len(), b.len());
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-10));

    for p in ["direct", "weyl_factorized", "fft"] {
        let out = weylvm(&["tconv", "--f", path(&f), "--g", path(&g), "--path", p]);
        assert!(out.status.success(), "{p}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn vmeas_prints_brackets() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    let gen = weylvm(&["gen", "measure", "--orders", "2", "--dim", "2", "--field", "real", "--seed", "3", "--out", path(&m)]);
    assert!(gen.status.success());
    let sv = weylvm(&["vmeas", "sv", "--measure", path(&m), "--set", "0,1"]);
    assert!(sv.status.success());
    let v: serde_json::Value = serde_json::from_slice(&sv.stdout).unwrap();
    assert!(v["lower"].as_f64().unwrap() <= v["upper"].as_f64().unwrap());
    let psv = weylvm(&["vmeas", "psv", "--measure", path(&m), "--p", "2"]);
    assert!(psv.status.success());
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(weylvm(&["gen", "function"]).status.code(), Some(2));
    assert_eq!(weylvm(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(weylvm(&["gen", "group", "--orders", "0"]).status.code(), Some(2));

    let missing = weylvm(&["weyl", "--function", "/nonexistent/f.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/f.json"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[optimizer]\ngrid_budget = 1\n").unwrap();
    let out = weylvm(&["verify", "core", "--tolerances", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(path(&bad)));
}

#[test]
fn failing_check_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let tol = dir.path().join("tol.toml");
    let text = weylvm::verify::DEFAULT_TOLERANCES.replace("threshold = 1e-6", "threshold = 1e6");
    assert_ne!(text, weylvm::verify::DEFAULT_TOLERANCES);
    std::fs::write(&tol, text).unwrap();
    let out_json = dir.path().join("r.json");
    let out = weylvm(&["verify", "core", "--tolerances", path(&tol), "--trials", "2", "--out", path(&out_json)]);
    assert_eq!(out.status.code(), Some(1));
    let report: weylvm::verify::VerificationReport =
        serde_json::from_str(&std::fs::read_to_string(&out_json).unwrap()).unwrap();
    assert!(!report.pass);
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).map(|c| c.check_name.as_str()).collect();
    assert_eq!(failed, ["noncommutativity_witness"]);
}

#[test]
fn verify_formats() {
    let table = weylvm(&["verify", "core", "--trials", "2", "--orders", "3", "--format", "table"]);
    assert!(table.status.success());
    assert!(stdout(&table).contains("plancherel"));
    let csv = weylvm(&["verify", "core", "--trials", "2", "--orders", "3", "--format", "csv"]);
    let text = stdout(&csv);
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("check_name,"));
    let cols = header.split(',').count();
    assert!(text.lines().skip(1).all(|l| l.split(',').count() == cols));
}

#[test]
fn bench_with_zero_trials_prints_only_the_header() {
    let out = weylvm(&["bench", "--orders", "4", "--trials", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "group,path,mean_ns,stddev_ns,agreement_err\n");
}

#[test]
fn bench_reports_all_paths() {
    let out = weylvm(&["bench", "--orders", "4", "--trials", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for p in ["direct", "weyl_factorized", "fft"] {
        assert!(text.lines().any(|l| l.split(',').nth(1) == Some(p)), "{text}");
    }
}
