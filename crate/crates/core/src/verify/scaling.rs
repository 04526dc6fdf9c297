use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::{LrpeError, Result};

/// Least-squares fit of `log t = a + slope · log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub sizes: Vec<usize>,
    /// Best-of-trials time per size, seconds.
    pub times: Vec<f64>,
    pub slope: f64,
    pub r2: f64,
}

/// A fit plus every timed trial (warm-up excluded).
#[derive(Debug, Clone)]
pub struct ScalingRun {
    pub fit: ScalingFit,
    pub trials: Vec<Vec<Duration>>,
}

pub fn fit_loglog(sizes: &[usize], times: &[f64]) -> Result<ScalingFit> {
    if sizes.len() != times.len() {
        return Err(LrpeError::Fit(format!("{} sizes but {} times", sizes.len(), times.len())));
    }
    if sizes.len() < 4 {
        return Err(LrpeError::Fit(format!("need at least 4 sizes, got {}", sizes.len())));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(LrpeError::Fit("sizes must be positive and strictly increasing".into()));
    }
    if times.iter().any(|&t| t <= 0.0 || !t.is_finite()) {
        return Err(LrpeError::Fit("times must be positive and finite".into()));
    }
    let x: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let y: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let m = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(ScalingFit { sizes: sizes.to_vec(), times: times.to_vec(), slope, r2 })
}

/// Calls `measure(n)` once as warm-up and then `trials` times per size; each
/// call reports its own duration. Fits on the per-size minimum.
pub fn fit_scaling_timed(
    sizes: &[usize],
    trials: usize,
    mut measure: impl FnMut(usize) -> Result<Duration>,
) -> Result<ScalingRun> {
    if trials == 0 {
        return Err(LrpeError::Fit("need at least one trial".into()));
    }
    let mut all = Vec::with_capacity(sizes.len());
    let mut best = Vec::with_capacity(sizes.len());
    for &n in sizes {
        measure(n)?;
        let runs = (0..trials).map(|_| measure(n)).collect::<Result<Vec<_>>>()?;
        best.push(runs.iter().min().expect("trials > 0").as_secs_f64().max(1e-9));
        all.push(runs);
    }
    Ok(ScalingRun { fit: fit_loglog(sizes, &best)?, trials: all })
}

/// Times `runner(n)` with a wall clock around each call.
pub fn fit_scaling(sizes: &[usize], trials: usize, mut runner: impl FnMut(usize) -> Result<()>) -> Result<ScalingRun> {
    fit_scaling_timed(sizes, trials, |n| {
        let start = Instant::now();
        runner(n)?;
        Ok(start.elapsed())
    })
}
