use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::numerics::{Complex, Mat, Rng};
use crate::{LrpeError, Result};

/// RNG sub-stream used for the Householder vector.
pub const HOUSEHOLDER_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PFamily {
    Identity,
    Householder,
    OddEven,
    Fourier,
}

impl fmt::Display for PFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PFamily::Identity => "identity",
            PFamily::Householder => "householder",
            PFamily::OddEven => "odd_even",
            PFamily::Fourier => "fourier",
        })
    }
}

impl FromStr for PFamily {
    type Err = LrpeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(PFamily::Identity),
            "householder" => Ok(PFamily::Householder),
            "odd_even" => Ok(PFamily::OddEven),
            "fourier" => Ok(PFamily::Fourier),
            other => Err(LrpeError::InvalidSpec(format!("unknown p family `{other}`"))),
        }
    }
}

/// The fixed change of basis `P`, kept matrix-free.
#[derive(Debug, Clone, PartialEq)]
pub enum PMatrix {
    Identity {
        d: usize,
    },
    /// `x ↦ x − (2/denom)(vᵀx) v`.
    Householder {
        v: Vec<f64>,
        denom: f64,
    },
    /// `out[i] = in[gather[i]]`.
    OddEven {
        gather: Vec<usize>,
    },
    /// Orthonormal DFT; `twiddle[m] = exp(-2πi m / d)`.
    Fourier {
        d: usize,
        twiddle: Vec<Complex>,
    },
}

/// Builds `P` for the family. The Householder vector is drawn from the
/// pinned RNG and normalised once.
pub fn build_p(family: PFamily, d: usize, seed: u64) -> Result<PMatrix> {
    if d == 0 {
        return Err(LrpeError::InvalidSpec("dimension must be at least 1".into()));
    }
    Ok(match family {
        PFamily::Identity => PMatrix::Identity { d },
        PFamily::Householder => {
            let v = Rng::stream(seed, HOUSEHOLDER_STREAM).normal_vec(d);
            PMatrix::householder(&v)?
        }
        PFamily::OddEven => PMatrix::OddEven { gather: odd_even_gather(d) },
        PFamily::Fourier => PMatrix::Fourier {
            d,
            twiddle: (0..d).map(|m| Complex::from_polar(1.0, -TAU * m as f64 / d as f64)).collect(),
        },
    })
}

/// `g[2k] = k`, `g[2k+1] = k + ⌈d/2⌉`.
pub fn odd_even_gather(d: usize) -> Vec<usize> {
    let half = d - d / 2;
    (0..d).map(|i| if i % 2 == 0 { i / 2 } else { (i - 1) / 2 + half }).collect()
}

impl PMatrix {
    /// Frozen reflection through the hyperplane orthogonal to `v`.
    pub fn householder(v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(LrpeError::InvalidSpec("householder vector must be nonzero".into()));
        }
        let v: Vec<f64> = v.iter().map(|x| x / norm).collect();
        let denom = v.iter().map(|x| x * x).sum();
        Ok(PMatrix::Householder { v, denom })
    }

    /// Trainable-vector variant: `v / (‖v‖ + eps)` with `eps = 1e-6` and no
    /// further division, so the result is only approximately orthogonal.
    pub fn householder_learnable(raw: &[f64]) -> Self {
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v = raw.iter().map(|x| x / (norm + 1e-6)).collect();
        PMatrix::Householder { v, denom: 1.0 }
    }

    pub fn family(&self) -> PFamily {
        match self {
            PMatrix::Identity { .. } => PFamily::Identity,
            PMatrix::Householder { .. } => PFamily::Householder,
            PMatrix::OddEven { .. } => PFamily::OddEven,
            PMatrix::Fourier { .. } => PFamily::Fourier,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            PMatrix::Identity { d } | PMatrix::Fourier { d, .. } => *d,
            PMatrix::Householder { v, .. } => v.len(),
            PMatrix::OddEven { gather } => gather.len(),
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, PMatrix::Fourier { .. })
    }

    /// Applies `P` in place to a real vector. Errors for the Fourier family.
    pub fn apply_real(&self, x: &mut [f64], scratch: &mut Vec<f64>) -> Result<()> {
        self.check_len(x.len())?;
        match self {
            PMatrix::Identity { .. } => {}
            PMatrix::Householder { v, denom } => {
                let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                let c = 2.0 * dot / denom;
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi -= c * vi;
                }
            }
            PMatrix::OddEven { gather } => {
                scratch.clear();
                scratch.extend_from_slice(x);
                for (xi, &g) in x.iter_mut().zip(gather) {
                    *xi = scratch[g];
                }
            }
            PMatrix::Fourier { .. } => {
                return Err(LrpeError::Unsupported("fourier P produces complex output; use the complex path".into()))
            }
        }
        Ok(())
    }

    /// Applies `P` in place to a complex vector given as split parts.
    pub fn apply_complex(&self, re: &mut [f64], im: &mut [f64], scratch: &mut Vec<f64>) -> Result<()> {
        self.check_len(re.len())?;
        self.check_len(im.len())?;
        match self {
            PMatrix::Fourier { d, twiddle } => {
                let d = *d;
                scratch.clear();
                scratch.extend_from_slice(re);
                scratch.extend_from_slice(im);
                let (src_re, src_im) = scratch.split_at(d);
                let scale = 1.0 / (d as f64).sqrt();
                for k in 0..d {
                    let (mut acc_re, mut acc_im) = (0.0, 0.0);
                    for j in 0..d {
                        let w = twiddle[(k * j) % d];
                        acc_re += w.re * src_re[j] - w.im * src_im[j];
                        acc_im += w.re * src_im[j] + w.im * src_re[j];
                    }
                    re[k] = acc_re * scale;
                    im[k] = acc_im * scale;
                }
                Ok(())
            }
            // Real P acts on both parts independently.
            _ => {
                self.apply_real(re, scratch)?;
                self.apply_real(im, scratch)
            }
        }
    }

    pub fn apply(&self, x: &[Complex]) -> Result<Vec<Complex>> {
        let mut re: Vec<f64> = x.iter().map(|z| z.re).collect();
        let mut im: Vec<f64> = x.iter().map(|z| z.im).collect();
        self.apply_complex(&mut re, &mut im, &mut Vec::new())?;
        Ok(re.into_iter().zip(im).map(|(a, b)| Complex::new(a, b)).collect())
    }

    /// Dense `P`, built entry by entry from the closed forms.
    pub fn to_dense(&self) -> Mat {
        let d = self.dim();
        match self {
            PMatrix::Identity { .. } => Mat::identity(d),
            PMatrix::Householder { v, denom } => {
                let mut m = Mat::identity(d);
                for i in 0..d {
                    for j in 0..d {
                        let e = m.re_at(i, j) - 2.0 * v[i] * v[j] / denom;
                        m.set_re(i, j, e);
                    }
                }
                m
            }
            PMatrix::OddEven { gather } => {
                let mut m = Mat::zeros(d, d);
                for (i, &g) in gather.iter().enumerate() {
                    m.set_re(i, g, 1.0);
                }
                m
            }
            PMatrix::Fourier { .. } => {
                let mut m = Mat::complex_zeros(d, d);
                let scale = 1.0 / (d as f64).sqrt();
                for k in 0..d {
                    for j in 0..d {
                        let angle = -TAU * (k * j) as f64 / d as f64;
                        m.set(k, j, Complex::from_polar(scale, angle));
                    }
                }
                m
            }
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(LrpeError::DimensionMismatch(format!("P is {0}x{0}, vector has length {len}", self.dim())));
        }
        Ok(())
    }
}
