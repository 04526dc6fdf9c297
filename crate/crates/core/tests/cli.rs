use std::process::{Command, Output};

use lrpe::bench::BenchReport;
use lrpe::verify::PropertyReport;

fn lrpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrpe")).args(args).output().expect("spawn lrpe")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_json_is_parseable_and_deterministic() {
    let args = ["check", "--spec", "mixed:householder:a:7", "--n", "12", "--seed", "3", "--format", "json"];
    let a = lrpe(&args);
    let b = lrpe(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let reports: Vec<PropertyReport> = serde_json::from_slice(&a.stdout).unwrap();
    assert!(reports.len() >= 10);
    assert!(reports.iter().all(|r| r.passed));
}

#[test]
fn check_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let o =
        lrpe(&["check", "--spec", "permutation:identity:a:5", "--n", "8", "--causal", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("name,max_error,tolerance,passed,cases\n"));
    assert!(text.contains("permutation_power_law"));
    assert!(text.contains("causal"));
}

#[test]
fn spec_seed_takes_precedence_over_flag() {
    let explicit = lrpe(&["dump", "--spec", "orthogonal:householder:a:4:seed=9", "--seed", "1", "--n", "2"]);
    let via_flag = lrpe(&["dump", "--spec", "orthogonal:householder:a:4", "--seed", "9", "--n", "2"]);
    let other = lrpe(&["dump", "--spec", "orthogonal:householder:a:4", "--seed", "1", "--n", "2"]);
    assert_eq!(explicit.stdout, via_flag.stdout);
    assert_ne!(explicit.stdout, other.stdout);
}

#[test]
fn d_flag_overrides_spec_dimension() {
    let o = lrpe(&["dump", "--spec", "unitary:fourier:a:4", "--d", "3", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1 + 9);
    assert_eq!(lrpe(&["dump", "--spec", "mixed:identity:a:4", "--d", "2"]).status.code(), Some(2));
}

#[test]
fn dump_json_entries() {
    let o = lrpe(&["dump", "--spec", "unitary:identity:a:2", "--n", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 2 * 4);
    // s = 1, (0, 0) entry is e^{iθ_0} with θ_0 = 1.
    let e = &entries[4];
    assert_eq!(e["index"], 1);
    assert!((e["re"].as_f64().unwrap() - 1f64.cos()).abs() < 1e-12);
    assert!((e["im"].as_f64().unwrap() - 1f64.sin()).abs() < 1e-12);
}

#[test]
fn bench_json_and_csv_round_trip() {
    let base = [
        "bench",
        "--spec",
        "unitary:householder:a:4",
        "--sizes",
        "16,32,64,128",
        "--vanilla-sizes",
        "0",
        "--trials",
        "1",
    ];
    let csv = lrpe(&base);
    assert_eq!(csv.status.code(), Some(0));
    let report = BenchReport::from_csv(csv.stdout.as_slice()).unwrap();
    assert_eq!(report.rows.len(), 4);
    assert_eq!(report.fits.len(), 1);
    assert!(report.rows.iter().all(|r| r.encoding == "unitary" && r.p_matrix == "householder" && r.d == 4));

    let mut json_args = base.to_vec();
    json_args.extend(["--format", "json"]);
    let json: BenchReport = serde_json::from_slice(&lrpe(&json_args).stdout).unwrap();
    assert_eq!(json.rows.len(), 4);
}

#[test]
fn bench_rejects_too_few_sizes() {
    let o = lrpe(&["bench", "--sizes", "16,32", "--vanilla-sizes", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

fn dump_rows(spec: &str, n: &str) -> Vec<(i64, usize, usize, f64, f64)> {
    let o = lrpe(&["dump", "--spec", spec, "--n", n]);
    assert_eq!(o.status.code(), Some(0));
    stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
                f[4].parse().unwrap(),
            )
        })
        .collect()
}

#[test]
fn dump_position_zero_is_identity() {
    for spec in ["unitary:fourier:a:4", "mixed:householder:a:5", "permutation:odd_even:a:6:seed=3"] {
        for (s, i, j, re, im) in dump_rows(spec, "3") {
            if s == 0 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12, "{spec} ({i},{j}) = {re}+{im}i");
            }
        }
    }
}

#[test]
fn dump_orthogonal_d2_is_rotation_by_theta() {
    // Kind a at d = 2 gives θ = 1.
    let rows = dump_rows("orthogonal:identity:a:2", "2");
    let at = |i: usize, j: usize| rows.iter().find(|r| r.0 == 1 && r.1 == i && r.2 == j).unwrap().3;
    let (sin, cos) = 1f64.sin_cos();
    assert!((at(0, 0) - cos).abs() < 1e-12 && (at(1, 1) - cos).abs() < 1e-12);
    assert!((at(0, 1) + sin).abs() < 1e-12 && (at(1, 0) - sin).abs() < 1e-12);
}

#[test]
fn dump_permutation_rows_are_one_hot() {
    let d = 7;
    let rows = dump_rows("permutation:identity:a:7:seed=4", "10");
    for s in 0..10 {
        for i in 0..d {
            let row: Vec<f64> = rows.iter().filter(|r| r.0 == s && r.1 == i).map(|r| r.3).collect();
            assert_eq!(row.len(), d);
            assert_eq!(row.iter().filter(|&&x| x == 1.0).count(), 1);
            assert_eq!(row.iter().filter(|&&x| x == 0.0).count(), d - 1);
        }
    }
}
