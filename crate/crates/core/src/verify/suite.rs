use super::checks::*;
use super::gradient::check_gradient;
use super::report::PropertyReport;
use crate::lrpe::{LambdaFamily, PositionTransform};
use crate::Result;

/// Sizes used by [`run_check_suite`].
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub n: usize,
    pub seed: u64,
    pub causal: bool,
    pub unitarity_s_max: usize,
    pub decomposability_s_max: usize,
    pub anchor_max: usize,
    pub canonical_draws: usize,
    pub gradient_draws: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n: 32,
            seed: 0,
            causal: false,
            unitarity_s_max: 64,
            decomposability_s_max: 32,
            anchor_max: 16,
            canonical_draws: 100,
            gradient_draws: 50,
        }
    }
}

/// Every property that applies to `transform`.
pub fn run_check_suite(transform: &PositionTransform, cfg: &SuiteConfig) -> Result<Vec<PropertyReport>> {
    let family = transform.lambda_family();
    let d = transform.dim();
    let mut out = vec![
        check_unitarity(transform, cfg.unitarity_s_max)?,
        check_decomposability(transform, cfg.decomposability_s_max)?,
        check_anchor_independence(transform, cfg.anchor_max, cfg.anchor_max)?,
    ];
    if family == LambdaFamily::Permutation {
        out.push(check_permutation_power_law(transform)?);
        out.push(check_permutation_orthogonality(transform)?);
    }
    out.push(check_linear_vs_oracle(transform, cfg.n, cfg.seed, cfg.causal)?);
    out.push(check_linear_vs_quadratic(transform, cfg.n, cfg.seed, cfg.causal)?);
    out.push(check_row_normalization(transform, cfg.n, cfg.seed, cfg.causal)?);
    out.push(check_left_unitary_invariance(transform, cfg.n.min(16), cfg.seed)?);
    if family.has_theta() {
        out.push(check_gradient(transform, cfg.gradient_draws, cfg.seed)?);
    }
    for m in CanonicalMethod::all() {
        // The multiplicative method uses this encoding as its W.
        let rope = (m == CanonicalMethod::Rope && family != LambdaFamily::None).then_some(transform);
        out.push(check_canonical(m, d, cfg.canonical_draws, cfg.seed, rope)?);
        out.push(check_canonical_stacking(m, d, cfg.canonical_draws, cfg.seed, rope)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lrpe::EncodingSpec;

    #[test]
    fn suite_passes_on_small_specs() {
        let cfg = SuiteConfig { n: 8, canonical_draws: 10, gradient_draws: 5, ..Default::default() };
        for spec in [
            "orthogonal:householder:a:6",
            "none:identity:a:4",
            "permutation:identity:a:5:seed=2",
            "unitary:fourier:a:4",
        ] {
            let t = spec.parse::<EncodingSpec>().unwrap().build().unwrap();
            for r in run_check_suite(&t, &cfg).unwrap() {
                assert!(r.passed, "{}", r.line());
            }
        }
    }
}
