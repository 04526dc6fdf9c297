use super::lambda::{permute_in_place, phase_rotate, rotate_pairs};
use super::{build_p, make_theta, EncodingSpec, LambdaFamily, PMatrix, PermutationSpec};
use crate::numerics::{cis, conj_transpose, inner, matmul, Complex, Mat, Rng};
use crate::{LrpeError, Result};

/// RNG sub-stream used to draw the permutation.
pub const PERMUTATION_STREAM: u64 = 2;

/// A realised encoding: the map `s ↦ W_s = Pᴴ Λ^(s) P`.
///
/// Vectors are transformed matrix-free through [`PositionTransform::apply`]
/// and [`encode_positions`]; the `materialize*` methods build dense matrices
/// from the closed forms instead.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionTransform {
    spec: EncodingSpec,
    p: PMatrix,
    theta: Vec<f64>,
    perm: Option<PermutationSpec>,
}

impl PositionTransform {
    pub fn new(spec: EncodingSpec) -> Result<Self> {
        spec.validate()?;
        let d = spec.d;
        let p = build_p(spec.p, d, spec.seed)?;
        let theta = match spec.lambda {
            LambdaFamily::Unitary => make_theta(spec.theta_kind, d, spec.l, d)?.values,
            LambdaFamily::Orthogonal | LambdaFamily::Mixed => {
                let e = spec.rotated_dim();
                if e == 0 {
                    Vec::new()
                } else {
                    make_theta(spec.theta_kind, e, spec.l, e / 2)?.values
                }
            }
            _ => Vec::new(),
        };
        let perm = (spec.lambda == LambdaFamily::Permutation)
            .then(|| PermutationSpec::random(d, &mut Rng::stream(spec.seed, PERMUTATION_STREAM)));
        Ok(Self { spec, p, theta, perm })
    }

    /// Replaces the frequencies (e.g. trained or perturbed values).
    pub fn with_theta(mut self, theta: Vec<f64>) -> Result<Self> {
        if !self.spec.lambda.has_theta() {
            return Err(LrpeError::Unsupported(format!("{} family has no theta", self.spec.lambda)));
        }
        if theta.len() != self.theta.len() {
            return Err(LrpeError::DimensionMismatch(format!(
                "expected {} frequencies, got {}",
                self.theta.len(),
                theta.len()
            )));
        }
        self.theta = theta;
        Ok(self)
    }

    pub fn with_permutation(mut self, perm: PermutationSpec) -> Result<Self> {
        if self.spec.lambda != LambdaFamily::Permutation {
            return Err(LrpeError::Unsupported(format!("{} family has no permutation", self.spec.lambda)));
        }
        if perm.d() != self.spec.d {
            return Err(LrpeError::DimensionMismatch(format!(
                "permutation on {} elements for d = {}",
                perm.d(),
                self.spec.d
            )));
        }
        self.perm = Some(perm);
        Ok(self)
    }

    /// Replaces `P`. A complex `P` is only accepted for the unitary family.
    pub fn with_p(mut self, p: PMatrix) -> Result<Self> {
        if p.dim() != self.spec.d {
            return Err(LrpeError::DimensionMismatch(format!("P of size {} for d = {}", p.dim(), self.spec.d)));
        }
        if p.is_complex() && self.spec.lambda != LambdaFamily::Unitary {
            return Err(LrpeError::InvalidSpec("complex P requires the unitary family".into()));
        }
        self.spec.p = p.family();
        self.p = p;
        Ok(self)
    }

    pub fn spec(&self) -> &EncodingSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.d
    }

    pub fn lambda_family(&self) -> LambdaFamily {
        self.spec.lambda
    }

    pub fn p(&self) -> &PMatrix {
        &self.p
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn permutation(&self) -> Option<&PermutationSpec> {
        self.perm.as_ref()
    }

    pub fn identity_block(&self) -> usize {
        self.spec.identity_block()
    }

    /// Whether encoded vectors are complex (unitary family).
    pub fn output_is_complex(&self) -> bool {
        self.spec.lambda == LambdaFamily::Unitary
    }

    fn perm_ref(&self) -> &PermutationSpec {
        self.perm.as_ref().expect("permutation family always carries a permutation")
    }

    /// `Λ^(s) P x`.
    pub fn apply(&self, s: usize, x: &[Complex]) -> Result<Vec<Complex>> {
        if x.len() != self.dim() {
            return Err(LrpeError::DimensionMismatch(format!("vector of length {} for d = {}", x.len(), self.dim())));
        }
        let mut re: Vec<f64> = x.iter().map(|z| z.re).collect();
        let mut im: Vec<f64> = x.iter().map(|z| z.im).collect();
        self.encode_row(s, &mut re, Some(&mut im), &mut Vec::new())?;
        Ok(re.into_iter().zip(im).map(|(a, b)| Complex::new(a, b)).collect())
    }

    /// In-place row kernel. `im = None` is only valid for real families.
    pub(crate) fn encode_row(
        &self,
        s: usize,
        re: &mut [f64],
        im: Option<&mut [f64]>,
        scratch: &mut Vec<f64>,
    ) -> Result<()> {
        let lambda = self.spec.lambda;
        if lambda == LambdaFamily::None {
            return Ok(());
        }
        let q = self.identity_block();
        match im {
            Some(im) => {
                self.p.apply_complex(re, im, scratch)?;
                match lambda {
                    LambdaFamily::Unitary => phase_rotate(s, &self.theta, re, im),
                    LambdaFamily::Orthogonal | LambdaFamily::Mixed => {
                        rotate_pairs(s, &self.theta, q, re)?;
                        rotate_pairs(s, &self.theta, q, im)?;
                    }
                    LambdaFamily::Permutation => {
                        permute_in_place(s as u64, self.perm_ref(), re, scratch);
                        permute_in_place(s as u64, self.perm_ref(), im, scratch);
                    }
                    LambdaFamily::None => unreachable!(),
                }
            }
            None => {
                self.p.apply_real(re, scratch)?;
                match lambda {
                    LambdaFamily::Unitary => {
                        return Err(LrpeError::Unsupported("unitary family needs a complex buffer".into()))
                    }
                    LambdaFamily::Orthogonal | LambdaFamily::Mixed => rotate_pairs(s, &self.theta, q, re)?,
                    LambdaFamily::Permutation => permute_in_place(s as u64, self.perm_ref(), re, scratch),
                    LambdaFamily::None => unreachable!(),
                }
            }
        }
        Ok(())
    }

    /// Dense `Λ^(s)` from its closed form.
    pub fn lambda_dense(&self, s: usize) -> Mat {
        let d = self.dim();
        let pos = s as f64;
        match self.spec.lambda {
            LambdaFamily::None => Mat::identity(d),
            LambdaFamily::Unitary => {
                let mut m = Mat::complex_zeros(d, d);
                for (k, &a) in self.theta.iter().enumerate() {
                    m.set(k, k, cis(pos * a));
                }
                m
            }
            LambdaFamily::Orthogonal | LambdaFamily::Mixed => {
                let mut m = Mat::identity(d);
                for (k, &a) in self.theta.iter().enumerate() {
                    let (sin, cos) = (pos * a).sin_cos();
                    let i = 2 * k;
                    m.set_re(i, i, cos);
                    m.set_re(i, i + 1, -sin);
                    m.set_re(i + 1, i, sin);
                    m.set_re(i + 1, i + 1, cos);
                }
                m
            }
            LambdaFamily::Permutation => self.perm_ref().dense_power(s as u64),
        }
    }

    /// Dense `W_s = Pᴴ Λ^(s) P`; the identity for the `none` family.
    pub fn materialize(&self, s: usize) -> Result<Mat> {
        if self.spec.lambda == LambdaFamily::None {
            return Ok(Mat::identity(self.dim()));
        }
        let p = self.p.to_dense();
        matmul(&conj_transpose(&p), &matmul(&self.lambda_dense(s), &p)?)
    }

    /// Dense `Λ^(s) P`, the matrix actually applied by [`encode_positions`].
    pub fn materialize_practical(&self, s: usize) -> Result<Mat> {
        if self.spec.lambda == LambdaFamily::None {
            return Ok(Mat::identity(self.dim()));
        }
        matmul(&self.lambda_dense(s), &self.p.to_dense())
    }

    /// `(Λ^(s) P q)ᴴ (Λ^(t) P k)`.
    pub fn inner_score(&self, s: usize, t: usize, q: &[Complex], k: &[Complex]) -> Result<Complex> {
        Ok(inner(&self.apply(s, q)?, &self.apply(t, k)?))
    }

    /// Real part of [`PositionTransform::inner_score`]; what attention consumes.
    pub fn score(&self, s: usize, t: usize, q: &[Complex], k: &[Complex]) -> Result<f64> {
        Ok(self.inner_score(s, t, q, k)?.re)
    }
}

/// Encodes every row: row `s` becomes `Λ^(s) P x_s`. O(n·d) plus one `P`
/// application per row.
pub fn encode_positions(transform: &PositionTransform, x: &Mat) -> Result<Mat> {
    if x.cols() != transform.dim() {
        return Err(LrpeError::DimensionMismatch(format!(
            "sequence has {} columns, encoding expects {}",
            x.cols(),
            transform.dim()
        )));
    }
    if transform.lambda_family() == LambdaFamily::None {
        return Ok(x.clone());
    }
    let mut out = x.clone();
    if transform.output_is_complex() {
        out.promote();
    }
    let mut scratch = Vec::with_capacity(2 * x.cols());
    for s in 0..out.rows() {
        let (re, im) = out.row_mut(s);
        transform.encode_row(s, re, im, &mut scratch)?;
    }
    Ok(out)
}

/// `W_{r}` evaluated as `W_aᴴ W_{a+r}` (or `W_{a+|r|}ᴴ W_a` for `r < 0`).
/// Decomposability means the result does not depend on the anchor `a`.
pub fn relative_matrix(transform: &PositionTransform, r: i64, anchor: i64) -> Result<Mat> {
    if anchor < 0 {
        return Err(LrpeError::NegativePosition(anchor));
    }
    let a = anchor as usize;
    let (s, t) = if r >= 0 { (a, a + r as usize) } else { (a + r.unsigned_abs() as usize, a) };
    matmul(&conj_transpose(&transform.materialize(s)?), &transform.materialize(t)?)
}

/// Analytic `∂/∂α_j` of `Re[(Λ^(s)Pq)ᴴ(Λ^(t)Pk)]`.
pub fn theta_grad_score(
    transform: &PositionTransform,
    s: usize,
    t: usize,
    q: &[Complex],
    k: &[Complex],
) -> Result<Vec<f64>> {
    let family = transform.lambda_family();
    if !family.has_theta() {
        return Err(LrpeError::Unsupported(format!("{family} family has no theta to differentiate")));
    }
    if q.len() != transform.dim() || k.len() != transform.dim() {
        return Err(LrpeError::DimensionMismatch(format!(
            "q/k of length {}/{} for d = {}",
            q.len(),
            k.len(),
            transform.dim()
        )));
    }
    let u = transform.p().apply(q)?;
    let w = transform.p().apply(k)?;
    let r = t as f64 - s as f64;
    let theta = transform.theta();
    let grad = match family {
        LambdaFamily::Unitary => {
            theta.iter().enumerate().map(|(j, &a)| -r * (u[j].conj() * w[j] * cis(r * a)).im).collect()
        }
        _ => theta
            .iter()
            .enumerate()
            .map(|(j, &a)| {
                let (u0, u1, w0, w1) = (u[2 * j], u[2 * j + 1], w[2 * j], w[2 * j + 1]);
                let even = (u0.conj() * w0 + u1.conj() * w1).re;
                let odd = (u1.conj() * w0 - u0.conj() * w1).re;
                let (sin, cos) = (r * a).sin_cos();
                r * (-sin * even + cos * odd)
            })
            .collect(),
    };
    Ok(grad)
}
