//! Relative encodings written as sums of primitive triples
//! `Σ_l (q̂^(l))ᴴ W^(l)_{t−s} k̂^(l)`, with five published instances.
//!
//! A side that is the identity `I_d` makes the triple matrix-valued; the
//! scalar is recovered by summing all entries (`1ᵀ (q̂ᴴ W k̂) 1`). That is
//! the contraction under which the `1/d` column-replication decompositions
//! reproduce their direct formulas.

use std::fmt;
use std::sync::Arc;

use crate::lrpe::{relative_matrix, PositionTransform};
use crate::numerics::{conj_transpose, inner, matmul, Complex, Mat, Rng};
use crate::{LrpeError, Result};

/// Offset-indexed relative matrix `r ↦ W_r`.
pub type RelFn = Arc<dyn Fn(i64) -> Result<Mat> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The query vector `q_s` as a `d × 1` column.
    Query,
    /// The key vector `k_t` as a `d × 1` column.
    Key,
    /// The constant `I_d`.
    Identity,
}

#[derive(Clone)]
pub struct Primitive {
    pub q_hat: Side,
    pub k_hat: Side,
    pub w_rel: RelFn,
}

impl Primitive {
    pub fn new(q_hat: Side, k_hat: Side, w_rel: impl Fn(i64) -> Result<Mat> + Send + Sync + 'static) -> Self {
        Self { q_hat, k_hat, w_rel: Arc::new(w_rel) }
    }
}

impl fmt::Debug for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Primitive").field("q_hat", &self.q_hat).field("k_hat", &self.k_hat).finish()
    }
}

#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub name: String,
    pub primitives: Vec<Primitive>,
}

impl CanonicalForm {
    pub fn new(name: impl Into<String>, primitives: Vec<Primitive>) -> Result<Self> {
        if primitives.is_empty() {
            return Err(LrpeError::InvalidSpec("canonical form needs at least one primitive".into()));
        }
        Ok(Self { name: name.into(), primitives })
    }

    pub fn m(&self) -> usize {
        self.primitives.len()
    }
}

fn side_matrix(side: Side, q: &[Complex], k: &[Complex]) -> Mat {
    match side {
        Side::Query => Mat::column(q),
        Side::Key => Mat::column(k),
        Side::Identity => Mat::identity(q.len()),
    }
}

/// Summed evaluation: each triple is contracted on its own, then added.
pub fn compose(form: &CanonicalForm, q_s: &[Complex], k_t: &[Complex], s: i64, t: i64) -> Result<Complex> {
    if q_s.len() != k_t.len() {
        return Err(LrpeError::DimensionMismatch(format!("q has {} entries, k has {}", q_s.len(), k_t.len())));
    }
    let mut total = Complex::new(0.0, 0.0);
    for prim in &form.primitives {
        let qh = side_matrix(prim.q_hat, q_s, k_t);
        let kh = side_matrix(prim.k_hat, q_s, k_t);
        let w = (prim.w_rel)(t - s)?;
        if w.rows() != qh.rows() || w.cols() != kh.rows() {
            return Err(LrpeError::DimensionMismatch(format!(
                "primitive W is {}x{}, sides need {}x{}",
                w.rows(),
                w.cols(),
                qh.rows(),
                kh.rows()
            )));
        }
        let m = matmul(&matmul(&conj_transpose(&qh), &w)?, &kh)?;
        total += m.entries().iter().sum::<Complex>();
    }
    Ok(total)
}

/// Stacked evaluation: sides are concatenated and the relative matrices
/// placed on a block diagonal, giving a single triple `q̂ᴴ Ŵ k̂`.
pub fn compose_stacked(form: &CanonicalForm, q_s: &[Complex], k_t: &[Complex], s: i64, t: i64) -> Result<Complex> {
    if q_s.len() != k_t.len() {
        return Err(LrpeError::DimensionMismatch(format!("q has {} entries, k has {}", q_s.len(), k_t.len())));
    }
    let reduce = |side: Side| -> Vec<Complex> {
        match side {
            Side::Query => q_s.to_vec(),
            Side::Key => k_t.to_vec(),
            Side::Identity => vec![Complex::new(1.0, 0.0); q_s.len()],
        }
    };
    let mut q_hat = Vec::new();
    let mut k_hat = Vec::new();
    let mut blocks = Vec::new();
    for prim in &form.primitives {
        let w = (prim.w_rel)(t - s)?;
        let (a, b) = (reduce(prim.q_hat), reduce(prim.k_hat));
        if w.rows() != a.len() || w.cols() != b.len() {
            return Err(LrpeError::DimensionMismatch(format!(
                "primitive W is {}x{}, sides need {}x{}",
                w.rows(),
                w.cols(),
                a.len(),
                b.len()
            )));
        }
        q_hat.extend(a);
        k_hat.extend(b);
        blocks.push(w);
    }
    let stacked = block_diag(&blocks);
    let wk = matmul(&stacked, &Mat::column(&k_hat))?;
    Ok(inner(&q_hat, &wk.entries()))
}

/// Block-diagonal matrix of possibly rectangular blocks.
pub fn block_diag(blocks: &[Mat]) -> Mat {
    let rows: usize = blocks.iter().map(Mat::rows).sum();
    let cols: usize = blocks.iter().map(Mat::cols).sum();
    let mut out = Mat::complex_zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
        r0 += b.rows();
        c0 += b.cols();
    }
    out.demote_if_real()
}

/// `d × d` matrix with every column equal to `v / d`.
fn replicate_columns(v: &[Complex]) -> Mat {
    let d = v.len();
    let mut m = Mat::complex_zeros(d, d);
    for (i, vi) in v.iter().enumerate() {
        for j in 0..d {
            m.set(i, j, vi / d as f64);
        }
    }
    m
}

/// `d × d` matrix with every row equal to `vᴴ / d`.
fn replicate_rows_adjoint(v: &[Complex]) -> Mat {
    let d = v.len();
    let mut m = Mat::complex_zeros(d, d);
    for i in 0..d {
        for (j, vj) in v.iter().enumerate() {
            m.set(i, j, vj.conj() / d as f64);
        }
    }
    m
}

fn identity_scaled(d: usize, a: Complex) -> Mat {
    let mut m = Mat::complex_zeros(d, d);
    for i in 0..d {
        m.set(i, i, a);
    }
    m.demote_if_real()
}

fn check_dims(q: &[Complex], k: &[Complex]) -> Result<()> {
    if q.len() != k.len() {
        return Err(LrpeError::DimensionMismatch(format!("q has {} entries, k has {}", q.len(), k.len())));
    }
    Ok(())
}

fn random_vecs(rng: &mut Rng, count: usize, d: usize) -> Vec<Vec<Complex>> {
    (0..count).map(|_| (0..d).map(|_| Complex::new(rng.normal(), rng.normal())).collect()).collect()
}

// ---------------------------------------------------------------- additive

/// Scalar bias `w_r` for offsets `min_offset ..= min_offset + len − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveConfig {
    pub min_offset: i64,
    pub bias: Vec<f64>,
}

impl AdditiveConfig {
    /// Standard-normal biases for offsets `-max_offset ..= max_offset`.
    pub fn random(rng: &mut Rng, max_offset: usize) -> Self {
        Self { min_offset: -(max_offset as i64), bias: rng.normal_vec(2 * max_offset + 1) }
    }

    pub fn bias_at(&self, r: i64) -> Result<f64> {
        let max = self.min_offset + self.bias.len() as i64 - 1;
        if r < self.min_offset || r > max {
            return Err(LrpeError::OffsetOutOfRange { offset: r, min: self.min_offset, max });
        }
        Ok(self.bias[(r - self.min_offset) as usize])
    }
}

/// `qᴴk + w_r`.
pub fn eval_additive(q: &[Complex], k: &[Complex], r: i64, cfg: &AdditiveConfig) -> Result<Complex> {
    check_dims(q, k)?;
    Ok(inner(q, k) + cfg.bias_at(r)?)
}

/// m = 2: `(q, k, I)` and `(I, I, (w_r/d) I)`.
pub fn additive_form(cfg: &AdditiveConfig, d: usize) -> CanonicalForm {
    let cfg = cfg.clone();
    CanonicalForm {
        name: "additive".into(),
        primitives: vec![
            Primitive::new(Side::Query, Side::Key, move |_| Ok(Mat::identity(d))),
            Primitive::new(Side::Identity, Side::Identity, move |r| {
                Ok(identity_scaled(d, Complex::new(cfg.bias_at(r)? / d as f64, 0.0)))
            }),
        ],
    }
}

// ---------------------------------------------------------- multiplicative

/// `qᴴ W(r) k`.
pub fn eval_multiplicative(q: &[Complex], k: &[Complex], r: i64, w: &dyn Fn(i64) -> Result<Mat>) -> Result<Complex> {
    check_dims(q, k)?;
    let w = w(r)?;
    if w.rows() != q.len() || w.cols() != k.len() {
        return Err(LrpeError::DimensionMismatch(format!("W is {}x{} for d = {}", w.rows(), w.cols(), q.len())));
    }
    let wk = matmul(&w, &Mat::column(k))?;
    Ok(inner(q, &wk.entries()))
}

/// m = 1 with `W_{t−s}` taken from an encoding (RoPE when the encoding is
/// `orthogonal:identity`).
pub fn multiplicative_form(transform: &PositionTransform) -> CanonicalForm {
    let t = transform.clone();
    CanonicalForm {
        name: format!("multiplicative[{}]", transform.spec()),
        primitives: vec![Primitive::new(Side::Query, Side::Key, move |r| relative_matrix(&t, r, 0))],
    }
}

// ----------------------------------------------------------------- deberta

/// Bucketed relative tables `k̄_g`, `q̄_g` for `g ∈ 0..2c`.
#[derive(Debug, Clone, PartialEq)]
pub struct DebertaConfig {
    pub c: usize,
    pub k_bar: Vec<Vec<Complex>>,
    pub q_bar: Vec<Vec<Complex>>,
}

impl DebertaConfig {
    pub fn random(rng: &mut Rng, c: usize, d: usize) -> Self {
        Self { c, k_bar: random_vecs(rng, 2 * c, d), q_bar: random_vecs(rng, 2 * c, d) }
    }

    pub fn zeros(c: usize, d: usize) -> Self {
        let z = vec![vec![Complex::new(0.0, 0.0); d]; 2 * c];
        Self { c, k_bar: z.clone(), q_bar: z }
    }

    /// `0` for `x ≤ −c`, `2c − 1` for `x ≥ c`, else `x + c`.
    pub fn bucket(&self, x: i64) -> usize {
        let c = self.c as i64;
        if x <= -c {
            0
        } else if x >= c {
            (2 * c - 1) as usize
        } else {
            (x + c) as usize
        }
    }
}

/// `qᴴk + qᴴ k̄_{g(s−t)} + q̄_{g(t−s)}ᴴ k`.
pub fn eval_deberta(q: &[Complex], k: &[Complex], s: i64, t: i64, cfg: &DebertaConfig) -> Result<Complex> {
    check_dims(q, k)?;
    let kb = &cfg.k_bar[cfg.bucket(s - t)];
    let qb = &cfg.q_bar[cfg.bucket(t - s)];
    Ok(inner(q, k) + inner(q, kb) + inner(qb, k))
}

/// m = 3: `(q, k, I)`, `(q, I, [k̄ … k̄]/d)`, `(I, k, [q̄ᴴ; …; q̄ᴴ]/d)`.
pub fn deberta_form(cfg: &DebertaConfig, d: usize) -> CanonicalForm {
    let c2 = cfg.clone();
    let c3 = cfg.clone();
    CanonicalForm {
        name: "deberta".into(),
        primitives: vec![
            Primitive::new(Side::Query, Side::Key, move |_| Ok(Mat::identity(d))),
            Primitive::new(Side::Query, Side::Identity, move |r| Ok(replicate_columns(&c2.k_bar[c2.bucket(-r)]))),
            Primitive::new(Side::Identity, Side::Key, move |r| Ok(replicate_rows_adjoint(&c3.q_bar[c3.bucket(r)]))),
        ],
    }
}

// --------------------------------------------------------------------- rpr

/// Clipped relative vectors `w_r`, `−k ≤ r ≤ k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RprConfig {
    pub k: usize,
    pub w: Vec<Vec<Complex>>,
}

impl RprConfig {
    pub fn random(rng: &mut Rng, k: usize, d: usize) -> Self {
        Self { k, w: random_vecs(rng, 2 * k + 1, d) }
    }

    pub fn zeros(k: usize, d: usize) -> Self {
        Self { k, w: vec![vec![Complex::new(0.0, 0.0); d]; 2 * k + 1] }
    }

    pub fn clipped(&self, r: i64) -> &[Complex] {
        let k = self.k as i64;
        &self.w[(clip(r, k) + k) as usize]
    }
}

/// `max(−k, min(k, x))`.
pub fn clip(x: i64, k: i64) -> i64 {
    (-k).max(k.min(x))
}

/// `qᴴk + qᴴ w_{clip(r, k)}`.
pub fn eval_rpr(q: &[Complex], k: &[Complex], r: i64, cfg: &RprConfig) -> Result<Complex> {
    check_dims(q, k)?;
    Ok(inner(q, k) + inner(q, cfg.clipped(r)))
}

/// m = 2: `(q, k, I)` and `(q, I, [c_r … c_r]/d)`.
pub fn rpr_form(cfg: &RprConfig, d: usize) -> CanonicalForm {
    let cfg = cfg.clone();
    CanonicalForm {
        name: "rpr".into(),
        primitives: vec![
            Primitive::new(Side::Query, Side::Key, move |_| Ok(Mat::identity(d))),
            Primitive::new(Side::Query, Side::Identity, move |r| Ok(replicate_columns(cfg.clipped(r)))),
        ],
    }
}

// --------------------------------------------------------------- cosformer

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosformerConfig {
    pub alpha: f64,
}

/// `qᴴk · cos(α r)`.
pub fn eval_cosformer(q: &[Complex], k: &[Complex], r: i64, cfg: &CosformerConfig) -> Result<Complex> {
    check_dims(q, k)?;
    Ok(inner(q, k) * (cfg.alpha * r as f64).cos())
}

/// m = 1: `(q, k, cos(α r) I)`.
pub fn cosformer_form(cfg: &CosformerConfig, d: usize) -> CanonicalForm {
    let alpha = cfg.alpha;
    CanonicalForm {
        name: "cosformer".into(),
        primitives: vec![Primitive::new(Side::Query, Side::Key, move |r| {
            Ok(identity_scaled(d, Complex::new((alpha * r as f64).cos(), 0.0)))
        })],
    }
}
