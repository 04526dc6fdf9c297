use std::collections::HashMap;

use super::family::PositionFamily;
use super::oracle::{naive_phi, oracle_attention, oracle_scores};
use super::report::{MaxErr, PropertyReport};
use super::tol;
use crate::attention::{lrpe_linear_attention, lrpe_scores, AttentionInput};
use crate::canonical::{
    additive_form, compose, compose_stacked, cosformer_form, deberta_form, eval_additive, eval_cosformer, eval_deberta,
    eval_rpr, multiplicative_form, rpr_form, AdditiveConfig, CanonicalForm, CosformerConfig, DebertaConfig, RprConfig,
};
use crate::lrpe::{relative_matrix, EncodingSpec, LambdaFamily, PFamily, PMatrix, PositionTransform, ThetaKind};
use crate::numerics::{conj_transpose, fro_norm, inner, matmul, random_mat, Complex, Mat, Rng};
use crate::{LrpeError, Result};

/// Largest offset drawn in the canonical and gradient checks.
const MAX_POSITION: u64 = 32;

/// `max_s ‖W_sᴴW_s − I‖_F` over `s ∈ 0..=s_max`.
pub fn check_unitarity(family: &dyn PositionFamily, s_max: usize) -> Result<PropertyReport> {
    let mut err = MaxErr::default();
    for s in 0..=s_max {
        let w = family.position_matrix(s)?;
        err.push(matmul(&conj_transpose(&w), &w)?.distance_from_identity());
    }
    Ok(err.report(format!("unitarity[{}]", family.name()), tol::UNITARITY))
}

fn relative_from_cache(cache: &[Mat], r: i64) -> Mat {
    if r >= 0 {
        cache[r as usize].clone()
    } else {
        conj_transpose(&cache[r.unsigned_abs() as usize])
    }
}

/// `max ‖W_sᴴW_t − W_{t−s}‖_F` over `s, t ∈ 0..=s_max`, with
/// `W_{−r} := W_rᴴ`.
pub fn check_decomposability(family: &dyn PositionFamily, s_max: usize) -> Result<PropertyReport> {
    let cache = (0..=s_max).map(|s| family.position_matrix(s)).collect::<Result<Vec<_>>>()?;
    let mut err = MaxErr::default();
    for s in 0..=s_max {
        let ws_h = conj_transpose(&cache[s]);
        for t in 0..=s_max {
            let lhs = matmul(&ws_h, &cache[t])?;
            let rhs = relative_from_cache(&cache, t as i64 - s as i64);
            err.push(fro_norm(&lhs.sub(&rhs)?));
        }
    }
    Ok(err.report(format!("decomposability[{}]", family.name()), tol::DECOMPOSABILITY))
}

/// `relative_matrix(r, a) = relative_matrix(r, b)` for all anchors
/// `a, b ∈ 0..=a_max`, `|r| ≤ r_max`.
pub fn check_anchor_independence(transform: &PositionTransform, r_max: usize, a_max: usize) -> Result<PropertyReport> {
    let mut err = MaxErr::default();
    let r_max = r_max as i64;
    for r in -r_max..=r_max {
        let mats = (0..=a_max as i64).map(|a| relative_matrix(transform, r, a)).collect::<Result<Vec<_>>>()?;
        for a in 0..mats.len() {
            for b in a + 1..mats.len() {
                err.push(fro_norm(&mats[a].sub(&mats[b])?));
            }
        }
    }
    Ok(err.report(format!("anchor_independence[{}]", transform.spec()), tol::DECOMPOSABILITY))
}

fn permutation_of(transform: &PositionTransform) -> Result<&crate::lrpe::PermutationSpec> {
    transform
        .permutation()
        .ok_or_else(|| LrpeError::Unsupported(format!("{} family has no permutation", transform.lambda_family())))
}

/// Row `j` of the result is `e_{π(j)}ᵀ`, built from `π` alone.
fn naive_permutation_matrix(pi: &[usize]) -> Mat {
    let d = pi.len();
    let mut m = Mat::zeros(d, d);
    for (j, &p) in pi.iter().enumerate() {
        m.set_re(j, p, 1.0);
    }
    m
}

/// `Λ_k = Λ_1^k` exactly for `k ≤ 2·cycle_order`, comparing three routes:
/// repeated dense products, `π` iterated `k` times, and the transform's own
/// closed form.
pub fn check_permutation_power_law(transform: &PositionTransform) -> Result<PropertyReport> {
    let perm = permutation_of(transform)?;
    let pi = perm.pi().to_vec();
    let d = pi.len();
    let lambda1 = naive_permutation_matrix(&pi);
    let mut power = Mat::identity(d);
    let mut iterated: Vec<usize> = (0..d).collect();
    let mut err = MaxErr::default();
    let k_max = 2 * perm.cycle_order();
    for k in 0..=k_max {
        if k > 0 {
            power = matmul(&power, &lambda1)?;
            iterated = iterated.iter().map(|&j| pi[j]).collect();
        }
        let by_iteration = naive_permutation_matrix(&iterated);
        let closed = transform.lambda_dense(k as usize);
        err.push(power.max_abs_diff(&by_iteration)?.max(power.max_abs_diff(&closed)?));
    }
    Ok(err.report(format!("permutation_power_law[{}]", transform.spec()), tol::EXACT))
}

/// `Λ_kᵀΛ_k = Λ_kΛ_kᵀ = I` exactly for `k ≤ 2·cycle_order`.
pub fn check_permutation_orthogonality(transform: &PositionTransform) -> Result<PropertyReport> {
    let perm = permutation_of(transform)?;
    let mut err = MaxErr::default();
    for k in 0..=2 * perm.cycle_order() {
        let l = transform.lambda_dense(k as usize);
        let lt = conj_transpose(&l);
        let id = Mat::identity(l.rows());
        let a = matmul(&lt, &l)?.max_abs_diff(&id)?;
        let b = matmul(&l, &lt)?.max_abs_diff(&id)?;
        err.push(a.max(b));
    }
    Ok(err.report(format!("permutation_orthogonality[{}]", transform.spec()), tol::EXACT))
}

/// Relative positional encodings that have a canonical decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonicalMethod {
    Additive,
    Rope,
    Deberta,
    Rpr,
    Cosformer,
}

impl CanonicalMethod {
    pub fn all() -> [CanonicalMethod; 5] {
        use CanonicalMethod::*;
        [Additive, Rope, Deberta, Rpr, Cosformer]
    }

    pub fn name(self) -> &'static str {
        match self {
            CanonicalMethod::Additive => "additive",
            CanonicalMethod::Rope => "rope",
            CanonicalMethod::Deberta => "deberta",
            CanonicalMethod::Rpr => "rpr",
            CanonicalMethod::Cosformer => "cosformer",
        }
    }
}

type DirectFn = Box<dyn Fn(&[Complex], &[Complex], i64, i64) -> Result<Complex>>;

/// One random instance of `method`: its direct formula and canonical form.
fn canonical_instance(
    method: CanonicalMethod,
    d: usize,
    rng: &mut Rng,
    rope: Option<&PositionTransform>,
) -> Result<(DirectFn, CanonicalForm)> {
    Ok(match method {
        CanonicalMethod::Additive => {
            let cfg = AdditiveConfig::random(rng, MAX_POSITION as usize);
            let form = additive_form(&cfg, d);
            (Box::new(move |q, k, s, t| eval_additive(q, k, t - s, &cfg)), form)
        }
        CanonicalMethod::Rope => {
            let transform = match rope {
                Some(t) => t.clone(),
                None => {
                    let even = d + d % 2;
                    EncodingSpec::new(LambdaFamily::Orthogonal, PFamily::Identity, ThetaKind::A, even).build()?
                }
            };
            if transform.dim() != d {
                return Err(LrpeError::DimensionMismatch(format!(
                    "encoding of dimension {} for d = {d}",
                    transform.dim()
                )));
            }
            let form = multiplicative_form(&transform);
            (
                Box::new(move |q, k, s, t| {
                    // Direct route: rotate both sides at their absolute positions.
                    Ok(inner(&transform.apply(s as usize, q)?, &transform.apply(t as usize, k)?))
                }),
                form,
            )
        }
        CanonicalMethod::Deberta => {
            let c = 1 + rng.below(8) as usize;
            let cfg = DebertaConfig::random(rng, c, d);
            let form = deberta_form(&cfg, d);
            (Box::new(move |q, k, s, t| eval_deberta(q, k, s, t, &cfg)), form)
        }
        CanonicalMethod::Rpr => {
            let clip_k = 1 + rng.below(8) as usize;
            let cfg = RprConfig::random(rng, clip_k, d);
            let form = rpr_form(&cfg, d);
            (Box::new(move |q, k, s, t| eval_rpr(q, k, t - s, &cfg)), form)
        }
        CanonicalMethod::Cosformer => {
            let cfg = CosformerConfig { alpha: rng.uniform(0.0, std::f64::consts::PI) };
            let form = cosformer_form(&cfg, d);
            (Box::new(move |q, k, s, t| eval_cosformer(q, k, t - s, &cfg)), form)
        }
    })
}

fn random_complex(rng: &mut Rng, d: usize) -> Vec<Complex> {
    (0..d).map(|_| Complex::new(rng.normal(), rng.normal())).collect()
}

fn canonical_draws(
    method: CanonicalMethod,
    d: usize,
    draws: usize,
    seed: u64,
    rope: Option<&PositionTransform>,
    mut measure: impl FnMut(&DirectFn, &CanonicalForm, &[Complex], &[Complex], i64, i64) -> Result<f64>,
) -> Result<MaxErr> {
    let d = match (method, rope) {
        (CanonicalMethod::Rope, Some(t)) => t.dim(),
        (CanonicalMethod::Rope, None) => d + d % 2,
        _ => d,
    };
    let mut rng = Rng::new(seed);
    let mut err = MaxErr::default();
    for _ in 0..draws {
        let (direct, form) = canonical_instance(method, d, &mut rng, rope)?;
        let q = random_complex(&mut rng, d);
        let k = random_complex(&mut rng, d);
        let s = rng.below(MAX_POSITION) as i64;
        let t = rng.below(MAX_POSITION) as i64;
        err.push(measure(&direct, &form, &q, &k, s, t)?);
    }
    Ok(err)
}

/// Direct formula vs canonical composition over `draws` seeded instances.
/// `rope` overrides the encoding used for the multiplicative method.
pub fn check_canonical(
    method: CanonicalMethod,
    d: usize,
    draws: usize,
    seed: u64,
    rope: Option<&PositionTransform>,
) -> Result<PropertyReport> {
    let err = canonical_draws(method, d, draws, seed, rope, |direct, form, q, k, s, t| {
        Ok((direct(q, k, s, t)? - compose(form, q, k, s, t)?).norm())
    })?;
    Ok(err.report(format!("canonical[{}]", method.name()), tol::CANONICAL))
}

/// Stacked block-diagonal evaluation vs the summed composition.
pub fn check_canonical_stacking(
    method: CanonicalMethod,
    d: usize,
    draws: usize,
    seed: u64,
    rope: Option<&PositionTransform>,
) -> Result<PropertyReport> {
    let err = canonical_draws(method, d, draws, seed, rope, |_, form, q, k, s, t| {
        Ok((compose_stacked(form, q, k, s, t)? - compose(form, q, k, s, t)?).norm())
    })?;
    Ok(err.report(format!("canonical_stacking[{}]", method.name()), tol::STACKING))
}

/// `Re[(Λ_s q)ᴴ(Λ_t k)]` for complex-diagonal `Λ` equals the real rotation
/// score on interleaved `[Re, Im]` vectors with the same frequencies.
pub fn check_type_correspondence(d_complex: usize, draws: usize, seed: u64) -> Result<PropertyReport> {
    let mut rng = Rng::new(seed);
    let base_u = EncodingSpec::new(LambdaFamily::Unitary, PFamily::Identity, ThetaKind::A, d_complex).build()?;
    let base_o = EncodingSpec::new(LambdaFamily::Orthogonal, PFamily::Identity, ThetaKind::A, 2 * d_complex)
        .with_q(0)
        .build()?;
    let mut err = MaxErr::default();
    for _ in 0..draws {
        let alpha: Vec<f64> =
            (0..d_complex).map(|_| rng.uniform(-std::f64::consts::PI, std::f64::consts::PI)).collect();
        let u = base_u.clone().with_theta(alpha.clone())?;
        let o = base_o.clone().with_theta(alpha)?;
        let q = random_complex(&mut rng, d_complex);
        let k = random_complex(&mut rng, d_complex);
        let s = rng.below(MAX_POSITION) as usize;
        let t = rng.below(MAX_POSITION) as usize;
        let interleave = |z: &[Complex]| -> Vec<Complex> {
            z.iter().flat_map(|c| [Complex::new(c.re, 0.0), Complex::new(c.im, 0.0)]).collect()
        };
        let complex_score = u.score(s, t, &q, &k)?;
        let real_score = o.score(s, t, &interleave(&q), &interleave(&k))?;
        err.push((complex_score - real_score).abs());
    }
    Ok(err.report(format!("type_correspondence[d_complex={d_complex}]"), tol::TYPE_CORRESPONDENCE))
}

/// Seeded standard-normal `(Q, K, V)` with `v_dim = d`.
pub fn random_qk(n: usize, d: usize, seed: u64) -> (Mat, Mat, Mat) {
    let mut rng = Rng::new(seed);
    let q = random_mat(&mut rng, n, d);
    let k = random_mat(&mut rng, n, d);
    let v = random_mat(&mut rng, n, d);
    (q, k, v)
}

/// Unnormalized linearized scores vs the dense oracle on `φ(Q)`, `φ(K)`,
/// absolute error.
pub fn check_linear_vs_oracle(
    transform: &PositionTransform,
    n: usize,
    seed: u64,
    causal: bool,
) -> Result<PropertyReport> {
    let (q, k, v) = random_qk(n, transform.dim(), seed);
    let inp = AttentionInput::new(&q, &k, &v).causal(causal).with_encoding(transform);
    let fast = lrpe_scores(&inp)?;
    let oracle = oracle_scores(transform, &naive_phi(&q), &naive_phi(&k))?;
    let mut err = MaxErr::default();
    for s in 0..n {
        for t in 0..n {
            let expected = if causal && t > s { 0.0 } else { oracle.re_at(s, t) };
            err.push((fast.re_at(s, t) - expected).abs());
        }
    }
    let mode = if causal { "causal" } else { "bidirectional" };
    Ok(err.report(format!("linear_vs_oracle[{},n={n},{mode}]", transform.spec()), tol::SCORES))
}

/// Linear-order outputs vs quadratic-order outputs, relative Frobenius error.
pub fn check_linear_vs_quadratic(
    transform: &PositionTransform,
    n: usize,
    seed: u64,
    causal: bool,
) -> Result<PropertyReport> {
    let (q, k, v) = random_qk(n, transform.dim(), seed);
    let inp = AttentionInput::new(&q, &k, &v).causal(causal).with_encoding(transform);
    let fast = lrpe_linear_attention(&inp)?.o;
    let slow = oracle_attention(transform, &q, &k, &v, causal)?;
    let rel = fro_norm(&fast.sub(&slow)?) / fro_norm(&slow).max(f64::MIN_POSITIVE);
    let mut err = MaxErr::default();
    err.push(rel);
    let mode = if causal { "causal" } else { "bidirectional" };
    Ok(err.report(format!("linear_vs_quadratic[{},n={n},{mode}]", transform.spec()), tol::OUTPUTS))
}

/// Implied attention rows `Re e_st / Δ_s` sum to one. The error is scaled by
/// the row's absolute mass so rows with a small net normalizer are not
/// penalized for cancellation.
pub fn check_row_normalization(
    transform: &PositionTransform,
    n: usize,
    seed: u64,
    causal: bool,
) -> Result<PropertyReport> {
    let (q, k, v) = random_qk(n, transform.dim(), seed);
    let inp = AttentionInput::new(&q, &k, &v).causal(causal).with_encoding(transform);
    let scores = lrpe_scores(&inp)?;
    let delta = lrpe_linear_attention(&inp)?.delta.expect("linear attention reports normalizers");
    let mut err = MaxErr::default();
    for (s, ds) in delta.iter().enumerate() {
        let total: f64 = (0..n).map(|t| scores.re_at(s, t)).sum();
        let mass: f64 = (0..n).map(|t| scores.re_at(s, t).abs()).sum();
        err.push((total - ds).abs() / mass.max(f64::MIN_POSITIVE));
    }
    Ok(err.report(format!("row_normalization[{},n={n}]", transform.spec()), tol::ROW_SUM))
}

/// A random unitary `U` applied on the left of `M_s = Λ^(s)P` leaves every
/// score `(M_s q)ᴴ(M_t k)` unchanged.
pub fn check_left_unitary_invariance(transform: &PositionTransform, n: usize, seed: u64) -> Result<PropertyReport> {
    let d = transform.dim();
    let mut rng = Rng::new(seed);
    let u = {
        let h = PMatrix::householder(&rng.normal_vec(d))?.to_dense();
        if transform.output_is_complex() {
            // Add a random diagonal phase so U is genuinely complex.
            let mut ph = Mat::complex_zeros(d, d);
            for j in 0..d {
                ph.set(j, j, crate::numerics::cis(rng.uniform(0.0, std::f64::consts::TAU)));
            }
            matmul(&ph, &h)?
        } else {
            h
        }
    };
    let (q, k, _) = random_qk(n, d, seed ^ 0x5EED);
    let mut cache: HashMap<usize, (Mat, Mat)> = HashMap::new();
    for s in 0..n {
        let m = transform.materialize_practical(s)?;
        let um = matmul(&u, &m)?;
        cache.insert(s, (m, um));
    }
    let mut err = MaxErr::default();
    for s in 0..n {
        let (ms, ums) = &cache[&s];
        let qs = Mat::column(&q.row(s));
        let a = matmul(ms, &qs)?.entries();
        let b = matmul(ums, &qs)?.entries();
        for t in 0..n {
            let (mt, umt) = &cache[&t];
            let kt = Mat::column(&k.row(t));
            let e1 = inner(&a, &matmul(mt, &kt)?.entries());
            let e2 = inner(&b, &matmul(umt, &kt)?.entries());
            err.push((e1 - e2).norm());
        }
    }
    Ok(err.report(format!("left_unitary_invariance[{}]", transform.spec()), tol::LEFT_UNITARY))
}
