//! Timing tables for the linear LRPE path and the softmax baseline.

use std::io::{Read, Write};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::attention::{lrpe_linear_attention, vanilla_attention, AttentionInput};
use crate::numerics::{random_mat, Rng};
use crate::verify::{fit_scaling_timed, ScalingFit};
use crate::{LrpeError, PositionTransform, Result};

pub const CSV_HEADER: [&str; 6] = ["encoding", "p_matrix", "n", "d", "trial", "wall_ns"];
pub const DEFAULT_SIZES: [usize; 5] = [1024, 2048, 4096, 8192, 16384];
pub const DEFAULT_VANILLA_SIZES: [usize; 5] = [256, 512, 1024, 2048, 4096];
/// Encoding label used for the softmax baseline rows.
pub const VANILLA: &str = "vanilla";

/// One timed trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub encoding: String,
    pub p_matrix: String,
    pub n: usize,
    pub d: usize,
    pub trial: usize,
    pub wall_ns: u128,
}

/// Log-log slope for one `(encoding, p_matrix)` series. Written to CSV as a
/// row with `n = all`, `trial = fit` and the slope in `wall_ns`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchFit {
    pub encoding: String,
    pub p_matrix: String,
    pub d: usize,
    pub slope: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub fits: Vec<BenchFit>,
}

impl BenchReport {
    pub fn to_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let io = |e: csv::Error| LrpeError::Unsupported(format!("csv write failed: {e}"));
        w.write_record(CSV_HEADER).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.encoding.clone(),
                r.p_matrix.clone(),
                r.n.to_string(),
                r.d.to_string(),
                r.trial.to_string(),
                r.wall_ns.to_string(),
            ])
            .map_err(io)?;
        }
        for f in &self.fits {
            w.write_record([
                f.encoding.clone(),
                f.p_matrix.clone(),
                "all".into(),
                f.d.to_string(),
                "fit".into(),
                format!("{:.6}", f.slope),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| LrpeError::Unsupported(format!("csv flush failed: {e}")))?;
        Ok(())
    }

    /// Parses what [`BenchReport::to_csv`] writes. The header is mandatory.
    /// `r2` is not stored in CSV and reads back as NaN.
    pub fn from_csv(input: impl Read) -> Result<Self> {
        let bad = |msg: String| LrpeError::InvalidSpec(format!("bench csv: {msg}"));
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let header = r.headers().map_err(|e| bad(e.to_string()))?;
        if header.iter().ne(CSV_HEADER) {
            return Err(bad(format!("unexpected header {header:?}")));
        }
        let mut report = BenchReport::default();
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let field = |i: usize| rec.get(i).unwrap_or_default();
            let num = |i: usize| field(i).parse::<usize>().map_err(|e| bad(format!("{}: {e}", field(i))));
            if field(4) == "fit" {
                report.fits.push(BenchFit {
                    encoding: field(0).into(),
                    p_matrix: field(1).into(),
                    d: num(3)?,
                    slope: field(5).parse().map_err(|e| bad(format!("slope {}: {e}", field(5))))?,
                    r2: f64::NAN,
                });
            } else {
                report.rows.push(BenchRow {
                    encoding: field(0).into(),
                    p_matrix: field(1).into(),
                    n: num(2)?,
                    d: num(3)?,
                    trial: num(4)?,
                    wall_ns: field(5).parse().map_err(|e| bad(format!("wall_ns {}: {e}", field(5))))?,
                });
            }
        }
        Ok(report)
    }

    fn push_run(&mut self, encoding: &str, p_matrix: &str, d: usize, fit: &ScalingFit, trials: &[Vec<Duration>]) {
        for (&n, runs) in fit.sizes.iter().zip(trials) {
            for (trial, dur) in runs.iter().enumerate() {
                self.rows.push(BenchRow {
                    encoding: encoding.into(),
                    p_matrix: p_matrix.into(),
                    n,
                    d,
                    trial,
                    wall_ns: dur.as_nanos(),
                });
            }
        }
        self.fits.push(BenchFit {
            encoding: encoding.into(),
            p_matrix: p_matrix.into(),
            d,
            slope: fit.slope,
            r2: fit.r2,
        });
    }
}

/// Inputs are drawn from `seed` outside the timed region.
fn inputs(n: usize, d: usize, seed: u64) -> (crate::Mat, crate::Mat, crate::Mat) {
    let mut rng = Rng::new(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (random_mat(&mut rng, n, d), random_mat(&mut rng, n, d), random_mat(&mut rng, n, d))
}

/// Times [`lrpe_linear_attention`] at each size.
pub fn bench_lrpe(
    transform: &PositionTransform,
    sizes: &[usize],
    trials: usize,
    seed: u64,
    causal: bool,
) -> Result<(ScalingFit, Vec<Vec<Duration>>)> {
    let d = transform.dim();
    let run = fit_scaling_timed(sizes, trials, |n| {
        let (q, k, v) = inputs(n, d, seed);
        let inp = AttentionInput::new(&q, &k, &v).causal(causal).with_encoding(transform);
        let start = Instant::now();
        let out = lrpe_linear_attention(&inp)?;
        let elapsed = start.elapsed();
        std::hint::black_box(out);
        Ok(elapsed)
    })?;
    Ok((run.fit, run.trials))
}

/// Times softmax attention at each size.
pub fn bench_vanilla(
    d: usize,
    sizes: &[usize],
    trials: usize,
    seed: u64,
    causal: bool,
) -> Result<(ScalingFit, Vec<Vec<Duration>>)> {
    let run = fit_scaling_timed(sizes, trials, |n| {
        let (q, k, v) = inputs(n, d, seed);
        let inp = AttentionInput::new(&q, &k, &v).causal(causal);
        let start = Instant::now();
        let out = vanilla_attention(&inp)?;
        let elapsed = start.elapsed();
        std::hint::black_box(out);
        Ok(elapsed)
    })?;
    Ok((run.fit, run.trials))
}

/// Options for [`run_bench`].
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    /// Sizes for the softmax baseline; empty skips it.
    pub vanilla_sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub causal: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: DEFAULT_SIZES.to_vec(),
            vanilla_sizes: DEFAULT_VANILLA_SIZES.to_vec(),
            trials: 3,
            seed: 0,
            causal: false,
        }
    }
}

pub fn run_bench(transform: &PositionTransform, cfg: &BenchConfig) -> Result<BenchReport> {
    let spec = transform.spec();
    let mut report = BenchReport::default();
    let (fit, trials) = bench_lrpe(transform, &cfg.sizes, cfg.trials, cfg.seed, cfg.causal)?;
    report.push_run(&spec.lambda.to_string(), &spec.p.to_string(), spec.d, &fit, &trials);
    if !cfg.vanilla_sizes.is_empty() {
        let (fit, trials) = bench_vanilla(spec.d, &cfg.vanilla_sizes, cfg.trials, cfg.seed, cfg.causal)?;
        report.push_run(VANILLA, "identity", spec.d, &fit, &trials);
    }
    Ok(report)
}
