//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs without the libtest harness so the timing criterion is measured on
//! a quiet, single-threaded process.

use std::collections::HashSet;
use std::process::{Command, Output};
use std::time::Instant;

use lrpe::bench::{bench_lrpe, bench_vanilla, DEFAULT_SIZES, DEFAULT_VANILLA_SIZES};
use lrpe::cli::{EXIT_IO, EXIT_OK, EXIT_PROPERTY, EXIT_USAGE};
use lrpe::verify::{self, CanonicalMethod, PropertyReport};
use lrpe::{EncodingSpec, LambdaFamily, PFamily, PositionTransform, ThetaKind};

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn from_reports(reports: &[PropertyReport]) -> Self {
        let failing: Vec<&PropertyReport> = reports.iter().filter(|r| !r.passed).collect();
        let worst = reports
            .iter()
            .map(|r| if r.tolerance > 0.0 { r.max_error / r.tolerance } else { r.max_error })
            .fold(0.0_f64, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) });
        let cases: usize = reports.iter().map(|r| r.cases).sum();
        let mut detail = format!("{} checks, {cases} cases, worst error/tol = {worst:.2e}", reports.len());
        if let Some(f) = failing.first() {
            detail.push_str(&format!("; first failure: {}", f.line()));
        }
        Self { passed: failing.is_empty(), detail }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Self { passed: false, detail: detail.into() }
    }
}

type Criterion = fn() -> Result<Outcome, String>;

const DIMS: [usize; 3] = [4, 8, 16];
const SEED: u64 = 20240601;

fn all_transforms(d: usize) -> Vec<PositionTransform> {
    EncodingSpec::valid_combinations(d, SEED).iter().map(|s| s.build().expect("valid combination builds")).collect()
}

fn collect(f: impl FnOnce(&mut Vec<PropertyReport>) -> lrpe::Result<()>) -> Result<Outcome, String> {
    let mut reports = Vec::new();
    f(&mut reports).map_err(|e| e.to_string())?;
    Ok(Outcome::from_reports(&reports))
}

fn c1_unitarity() -> Result<Outcome, String> {
    collect(|out| {
        for d in DIMS {
            for t in all_transforms(d) {
                out.push(verify::check_unitarity(&t, 64)?);
            }
        }
        Ok(())
    })
}

fn c2_decomposability() -> Result<Outcome, String> {
    collect(|out| {
        for d in DIMS {
            for t in all_transforms(d) {
                out.push(verify::check_decomposability(&t, 32)?);
                out.push(verify::check_anchor_independence(&t, 16, 16)?);
            }
        }
        Ok(())
    })
}

fn c3_linear_vs_oracle() -> Result<Outcome, String> {
    collect(|out| {
        for d in DIMS {
            for t in all_transforms(d) {
                for causal in [false, true] {
                    let r = verify::check_linear_vs_oracle(&t, 32, SEED, causal)?;
                    assert_eq!(r.tolerance, 1e-8);
                    out.push(r);
                }
            }
        }
        Ok(())
    })
}

fn c4_permutation() -> Result<Outcome, String> {
    collect(|out| {
        for d in [4, 7, 16] {
            for seed in 0..4 {
                let t = EncodingSpec::new(LambdaFamily::Permutation, PFamily::Identity, ThetaKind::A, d)
                    .with_seed(seed)
                    .build()?;
                out.push(verify::check_permutation_power_law(&t)?);
                out.push(verify::check_permutation_orthogonality(&t)?);
            }
        }
        Ok(())
    })
}

fn c5_canonical() -> Result<Outcome, String> {
    collect(|out| {
        for m in CanonicalMethod::all() {
            out.push(verify::check_canonical(m, 8, 100, SEED, None)?);
            out.push(verify::check_canonical_stacking(m, 8, 100, SEED, None)?);
        }
        Ok(())
    })
}

fn c6_type_correspondence() -> Result<Outcome, String> {
    collect(|out| {
        for dc in [2, 4, 8] {
            out.push(verify::check_type_correspondence(dc, 100, SEED + dc as u64)?);
        }
        Ok(())
    })
}

fn c7_gradient() -> Result<Outcome, String> {
    collect(|out| {
        for t in all_transforms(8) {
            if t.lambda_family().has_theta() {
                let r = verify::check_gradient(&t, 50, SEED)?;
                assert_eq!(r.cases, 50);
                out.push(r);
            }
        }
        Ok(())
    })
}

fn c8_complexity() -> Result<Outcome, String> {
    let t: PositionTransform =
        "orthogonal:householder:a:32".parse::<EncodingSpec>().and_then(|s| s.build()).map_err(|e| e.to_string())?;
    // A timing fit is a noisy measurement; up to three independent attempts.
    let mut last = String::new();
    for attempt in 1..=3 {
        let (lin, _) = bench_lrpe(&t, &DEFAULT_SIZES, 5, SEED, false).map_err(|e| e.to_string())?;
        let (van, _) = bench_vanilla(32, &DEFAULT_VANILLA_SIZES, 3, SEED, false).map_err(|e| e.to_string())?;
        last = format!(
            "attempt {attempt}: linear slope {:.3} (r2 {:.3}, need <= 1.35), vanilla slope {:.3} (r2 {:.3}, need >= 1.7)",
            lin.slope, lin.r2, van.slope, van.r2
        );
        if lin.slope <= 1.35 && van.slope >= 1.7 {
            return Ok(Outcome { passed: true, detail: last });
        }
    }
    Ok(Outcome::fail(last))
}

fn c9_negative_controls() -> Result<Outcome, String> {
    let controls = verify::run_negative_controls(SEED).map_err(|e| e.to_string())?;
    let missed: Vec<&str> = controls.iter().filter(|c| !c.detected).map(|c| c.name.as_str()).collect();
    let names: Vec<&str> = controls.iter().map(|c| c.name.as_str()).collect();
    Ok(Outcome {
        passed: missed.is_empty() && controls.len() >= 2,
        detail: if missed.is_empty() {
            format!("{} controls detected: {}", controls.len(), names.join(", "))
        } else {
            format!("undetected: {}", missed.join(", "))
        },
    })
}

fn lrpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrpe")).args(args).output().expect("spawn lrpe")
}

fn strip_wall_ns(csv: &str) -> String {
    csv.lines().map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head)).collect::<Vec<_>>().join("\n")
}

fn c10_cli_contract() -> Result<Outcome, String> {
    let mut problems = Vec::new();
    let mut expect_code = |args: &[&str], code: i32| {
        let got = lrpe(args).status.code();
        if got != Some(code) {
            problems.push(format!("`lrpe {}` exited {got:?}, expected {code}", args.join(" ")));
        }
    };
    expect_code(&["check", "--spec", "orthogonal:householder:a:16", "--n", "32", "--seed", "7"], EXIT_OK);
    expect_code(&["check", "--spec", "orthogonal:fourier:a:16"], EXIT_USAGE);
    expect_code(&["check", "--spec", "none:identity:a:8"], EXIT_OK);
    expect_code(&["check", "--spec", "unitary:fourier:a:8", "--n", "8", "--tol-scale", "0"], EXIT_PROPERTY);
    expect_code(&["check", "--n", "8"], EXIT_USAGE);
    expect_code(&["dump", "--spec", "none:identity:a:2", "--out", "/nonexistent-dir/x.csv"], EXIT_IO);

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("bench{i}.csv"));
        let p = path.to_str().expect("utf-8 temp path");
        let args = [
            "bench",
            "--spec",
            "mixed:odd_even:a:8",
            "--sizes",
            "64,128,256,512",
            "--vanilla-sizes",
            "32,64,128,256",
            "--trials",
            "2",
            "--seed",
            "11",
            "--out",
            p,
        ];
        let o = lrpe(&args);
        if o.status.code() != Some(EXIT_OK) {
            problems.push(format!("bench exited {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)));
        }
        outputs.push(std::fs::read_to_string(&path).unwrap_or_default());
    }
    let first = &outputs[0];
    if !first.starts_with("encoding,p_matrix,n,d,trial,wall_ns\n") {
        problems.push("bench csv header missing or not LF-terminated".into());
    }
    if first.contains('\r') {
        problems.push("bench csv contains CR".into());
    }
    if first.lines().count() != 1 + 2 * 4 * 2 + 2 {
        problems.push(format!("bench csv has {} lines", first.lines().count()));
    }
    if strip_wall_ns(&outputs[0]) != strip_wall_ns(&outputs[1]) {
        problems.push("same seed and flags gave different bench csv outside wall_ns".into());
    }

    let mut round_trips = 0;
    let mut seen = HashSet::new();
    for d in [3, 4, 7, 8, 16] {
        for mut spec in EncodingSpec::valid_combinations(d, 99) {
            for kind in [ThetaKind::A, ThetaKind::B, ThetaKind::C, ThetaKind::LearnedInitA] {
                spec.theta_kind = kind;
                spec.l = kind.needs_length().then_some(64);
                let text = spec.to_string();
                match text.parse::<EncodingSpec>() {
                    Ok(back) if back == spec => round_trips += 1,
                    other => problems.push(format!("{text} re-parsed as {other:?}")),
                }
                if seen.insert((spec.lambda, spec.p)) {
                    let code = lrpe(&["dump", "--spec", &text, "--n", "2"]).status.code();
                    if code != Some(EXIT_OK) {
                        problems.push(format!("dump rejected rendered spec {text}: {code:?}"));
                    }
                }
            }
        }
    }

    Ok(if problems.is_empty() {
        Outcome {
            passed: true,
            detail: format!("exit codes 0/1/2/3, csv schema and determinism, {round_trips} spec round-trips"),
        }
    } else {
        Outcome::fail(problems.join("; "))
    })
}

fn main() {
    // libtest passes flags such as --list; only run for a plain invocation.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    // (id, name, runtime limit in seconds, check)
    let criteria: [(&str, &str, f64, Criterion); 10] = [
        ("1", "unitarity of W_s", 10.0, c1_unitarity),
        ("2", "decomposability and anchor independence", 30.0, c2_decomposability),
        ("3", "linearized scores vs dense oracle", 60.0, c3_linear_vs_oracle),
        ("4", "permutation power law and orthogonality", 5.0, c4_permutation),
        ("5", "canonical forms vs direct formulas", 5.0, c5_canonical),
        ("6", "complex unitary vs interleaved orthogonal", 5.0, c6_type_correspondence),
        ("7", "theta gradient vs central differences", 5.0, c7_gradient),
        ("8", "linear vs quadratic scaling", 300.0, c8_complexity),
        ("9", "negative controls detected", 10.0, c9_negative_controls),
        ("10", "CLI contract", 5.0, c10_cli_contract),
    ];
    let mut failed = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let mut outcome = run().unwrap_or_else(Outcome::fail);
        let secs = start.elapsed().as_secs_f64();
        if secs >= limit {
            outcome.passed = false;
            outcome.detail.push_str(&format!("; exceeded runtime limit of {limit} s"));
        }
        if !outcome.passed {
            failed += 1;
        }
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{status}] criterion {id}: {name} ({secs:.2} s): {}", outcome.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
