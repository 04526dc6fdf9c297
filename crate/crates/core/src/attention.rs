//! Softmax attention, linear attention with the `1 + elu` feature map, and
//! the encoded linear path.

use crate::lrpe::{encode_positions, PositionTransform};
use crate::numerics::Mat;
use crate::{LrpeError, Result};

/// Normalizers with modulus below this are rejected.
pub const DELTA_EPS: f64 = 1e-30;

/// Where the position transform sits relative to the feature map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EncodeOrder {
    /// `encode(φ(x))`.
    #[default]
    AfterFeatureMap,
    /// `φ(encode(x))`; only defined for real encodings.
    BeforeFeatureMap,
}

#[derive(Debug, Clone, Copy)]
pub struct AttentionInput<'a> {
    pub q: &'a Mat,
    pub k: &'a Mat,
    pub v: &'a Mat,
    pub causal: bool,
    pub encoding: Option<&'a PositionTransform>,
    pub order: EncodeOrder,
}

impl<'a> AttentionInput<'a> {
    pub fn new(q: &'a Mat, k: &'a Mat, v: &'a Mat) -> Self {
        Self { q, k, v, causal: false, encoding: None, order: EncodeOrder::default() }
    }

    pub fn causal(mut self, causal: bool) -> Self {
        self.causal = causal;
        self
    }

    pub fn with_encoding(mut self, encoding: &'a PositionTransform) -> Self {
        self.encoding = Some(encoding);
        self
    }

    pub fn with_order(mut self, order: EncodeOrder) -> Self {
        self.order = order;
        self
    }

    pub fn n(&self) -> usize {
        self.q.rows()
    }

    fn validate(&self) -> Result<()> {
        let (n, d) = self.q.shape();
        if self.k.shape() != (n, d) || self.v.rows() != n {
            return Err(LrpeError::DimensionMismatch(format!(
                "Q {:?}, K {:?}, V {:?}",
                self.q.shape(),
                self.k.shape(),
                self.v.shape()
            )));
        }
        if !(self.q.is_real() && self.k.is_real() && self.v.is_real()) {
            return Err(LrpeError::Unsupported("attention inputs must be real".into()));
        }
        if let Some(enc) = self.encoding {
            if enc.dim() != d {
                return Err(LrpeError::DimensionMismatch(format!(
                    "encoding d = {} for inputs with d = {d}",
                    enc.dim()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttentionOutput {
    pub o: Mat,
    /// Per-row normalizers `Δ_s`; linear paths only.
    pub delta: Option<Vec<f64>>,
}

/// `1 + elu(x)`: `x + 1` for `x ≥ 0`, `exp(x)` otherwise.
pub fn phi(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| phi_scalar(v)).collect()
}

#[inline]
fn phi_scalar(v: f64) -> f64 {
    if v >= 0.0 {
        v + 1.0
    } else {
        v.exp()
    }
}

/// Applies [`phi`] to every entry of a real matrix.
pub fn phi_mat(x: &Mat) -> Result<Mat> {
    if !x.is_real() {
        return Err(LrpeError::Unsupported("feature map needs real input".into()));
    }
    Mat::from_real(x.rows(), x.cols(), phi(x.re()))
}

/// `Softmax(QKᵀ/√d) V`, with `t > s` masked out when causal. O(n²d).
pub fn vanilla_attention(inp: &AttentionInput<'_>) -> Result<AttentionOutput> {
    inp.validate()?;
    let (n, d) = inp.q.shape();
    let dv = inp.v.cols();
    let scale = 1.0 / (d as f64).sqrt();
    let mut out = vec![0.0; n * dv];
    let mut logits = vec![0.0; n];
    for s in 0..n {
        let visible = if inp.causal { s + 1 } else { n };
        let qs = inp.q.row_re(s);
        let mut max = f64::NEG_INFINITY;
        for (t, l) in logits[..visible].iter_mut().enumerate() {
            *l = qs.iter().zip(inp.k.row_re(t)).map(|(a, b)| a * b).sum::<f64>() * scale;
            max = max.max(*l);
        }
        let mut total = 0.0;
        for l in &mut logits[..visible] {
            *l = (*l - max).exp();
            total += *l;
        }
        let row = &mut out[s * dv..(s + 1) * dv];
        for (t, &w) in logits[..visible].iter().enumerate() {
            let w = w / total;
            for (o, &v) in row.iter_mut().zip(inp.v.row_re(t)) {
                *o += w * v;
            }
        }
    }
    Ok(AttentionOutput { o: Mat::from_real(n, dv, out)?, delta: None })
}

/// Non-causal linear attention: `S = φ(K)ᵀV` and `z = φ(K)ᵀ1` first, then
/// `o_s = φ(q_s)ᵀS / φ(q_s)ᵀz`. O(n·d²).
pub fn linear_attention(inp: &AttentionInput<'_>) -> Result<AttentionOutput> {
    inp.validate()?;
    let fq = phi_mat(inp.q)?;
    let fk = phi_mat(inp.k)?;
    if inp.causal {
        causal_from_features(&fq, &fk, inp.v)
    } else {
        linear_from_features(&fq, &fk, inp.v)
    }
}

/// Prefix-sum linear attention: running `S_s = Σ_{t≤s} φ(k_t)v_tᵀ` and
/// `z_s = Σ_{t≤s} φ(k_t)`. O(n·d²) time, O(d²) state.
pub fn causal_linear_attention(inp: &AttentionInput<'_>) -> Result<AttentionOutput> {
    inp.validate()?;
    causal_from_features(&phi_mat(inp.q)?, &phi_mat(inp.k)?, inp.v)
}

/// Linear attention on encoded features. The encoding is applied to `φ(Q)`
/// and `φ(K)`; complex encodings contribute the real part of their scores.
pub fn lrpe_linear_attention(inp: &AttentionInput<'_>) -> Result<AttentionOutput> {
    inp.validate()?;
    let (fq, fk) = encoded_features(inp)?;
    if inp.causal {
        causal_from_features(&fq, &fk, inp.v)
    } else {
        linear_from_features(&fq, &fk, inp.v)
    }
}

/// The unnormalized score matrix `Re[q̃_sᴴ k̃_t]` of the encoded linear path,
/// zero above the diagonal when causal. O(n²d); for verification only.
pub fn lrpe_scores(inp: &AttentionInput<'_>) -> Result<Mat> {
    inp.validate()?;
    let (fq, fk) = encoded_features(inp)?;
    let n = inp.n();
    let mut out = Mat::zeros(n, n);
    for s in 0..n {
        let visible = if inp.causal { s + 1 } else { n };
        for t in 0..visible {
            let e = fq.row_re(s).iter().zip(fk.row_re(t)).map(|(a, b)| a * b).sum();
            out.set_re(s, t, e);
        }
    }
    Ok(out)
}

/// Real feature rows whose dot products equal the real parts of the encoded
/// scores: complex rows `a + ib` become `[a | b]`.
fn encoded_features(inp: &AttentionInput<'_>) -> Result<(Mat, Mat)> {
    let Some(enc) = inp.encoding else {
        return Ok((phi_mat(inp.q)?, phi_mat(inp.k)?));
    };
    let (eq, ek) = match inp.order {
        EncodeOrder::AfterFeatureMap => {
            (encode_positions(enc, &phi_mat(inp.q)?)?, encode_positions(enc, &phi_mat(inp.k)?)?)
        }
        EncodeOrder::BeforeFeatureMap => {
            (phi_mat(&encode_positions(enc, inp.q)?)?, phi_mat(&encode_positions(enc, inp.k)?)?)
        }
    };
    Ok((realify(&eq), realify(&ek)))
}

fn realify(m: &Mat) -> Mat {
    let Some(im) = m.im() else {
        return m.clone();
    };
    let (n, d) = m.shape();
    let mut out = Vec::with_capacity(2 * n * d);
    for s in 0..n {
        out.extend_from_slice(m.row_re(s));
        out.extend_from_slice(&im[s * d..(s + 1) * d]);
    }
    Mat::from_real(n, 2 * d, out).expect("sizes match")
}

fn check_delta(row: usize, delta: f64) -> Result<()> {
    if delta.is_nan() || delta.abs() < DELTA_EPS {
        return Err(LrpeError::DegenerateNormalizer { row, value: delta });
    }
    Ok(())
}

fn linear_from_features(fq: &Mat, fk: &Mat, v: &Mat) -> Result<AttentionOutput> {
    let (n, f) = fq.shape();
    let dv = v.cols();
    let mut state = vec![0.0; f * dv];
    let mut z = vec![0.0; f];
    for t in 0..n {
        accumulate(&mut state, &mut z, fk.row_re(t), v.row_re(t));
    }
    let mut out = vec![0.0; n * dv];
    let mut delta = Vec::with_capacity(n);
    for s in 0..n {
        let ds = readout(&state, &z, fq.row_re(s), &mut out[s * dv..(s + 1) * dv]);
        check_delta(s, ds)?;
        delta.push(ds);
    }
    Ok(AttentionOutput { o: Mat::from_real(n, dv, out)?, delta: Some(delta) })
}

fn causal_from_features(fq: &Mat, fk: &Mat, v: &Mat) -> Result<AttentionOutput> {
    let (n, f) = fq.shape();
    let dv = v.cols();
    let mut state = vec![0.0; f * dv];
    let mut z = vec![0.0; f];
    let mut out = vec![0.0; n * dv];
    let mut delta = Vec::with_capacity(n);
    for s in 0..n {
        accumulate(&mut state, &mut z, fk.row_re(s), v.row_re(s));
        let ds = readout(&state, &z, fq.row_re(s), &mut out[s * dv..(s + 1) * dv]);
        check_delta(s, ds)?;
        delta.push(ds);
    }
    Ok(AttentionOutput { o: Mat::from_real(n, dv, out)?, delta: Some(delta) })
}

#[inline]
fn accumulate(state: &mut [f64], z: &mut [f64], k: &[f64], v: &[f64]) {
    let dv = v.len();
    for (i, &ki) in k.iter().enumerate() {
        z[i] += ki;
        for (sij, &vj) in state[i * dv..(i + 1) * dv].iter_mut().zip(v) {
            *sij += ki * vj;
        }
    }
}

/// Writes `qᵀS / qᵀz` into `out` and returns `qᵀz`.
#[inline]
fn readout(state: &[f64], z: &[f64], q: &[f64], out: &mut [f64]) -> f64 {
    let dv = out.len();
    out.fill(0.0);
    let mut delta = 0.0;
    for (i, &qi) in q.iter().enumerate() {
        delta += qi * z[i];
        for (o, &sij) in out.iter_mut().zip(&state[i * dv..(i + 1) * dv]) {
            *o += qi * sij;
        }
    }
    let inv = 1.0 / delta;
    for o in out.iter_mut() {
        *o *= inv;
    }
    delta
}
