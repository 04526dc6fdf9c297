//! The position-dependent core transforms `Λ^(s)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PermutationSpec;
use crate::numerics::{cis, Complex};
use crate::{LrpeError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LambdaFamily {
    /// Complex phases `diag(exp(i s α_k))`.
    Unitary,
    /// 2×2 rotation blocks on a prefix, identity on the trailing `q` entries.
    Orthogonal,
    /// Orthogonal with the rotated prefix fixed at `d/2` rounded up to even.
    Mixed,
    /// Powers of a fixed permutation.
    Permutation,
    /// No positional transform.
    None,
}

impl LambdaFamily {
    pub fn has_theta(self) -> bool {
        matches!(self, LambdaFamily::Unitary | LambdaFamily::Orthogonal | LambdaFamily::Mixed)
    }

    pub fn all() -> [LambdaFamily; 5] {
        [
            LambdaFamily::Unitary,
            LambdaFamily::Orthogonal,
            LambdaFamily::Mixed,
            LambdaFamily::Permutation,
            LambdaFamily::None,
        ]
    }
}

impl fmt::Display for LambdaFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LambdaFamily::Unitary => "unitary",
            LambdaFamily::Orthogonal => "orthogonal",
            LambdaFamily::Mixed => "mixed",
            LambdaFamily::Permutation => "permutation",
            LambdaFamily::None => "none",
        })
    }
}

impl FromStr for LambdaFamily {
    type Err = LrpeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unitary" => Ok(LambdaFamily::Unitary),
            "orthogonal" => Ok(LambdaFamily::Orthogonal),
            "mixed" => Ok(LambdaFamily::Mixed),
            "permutation" => Ok(LambdaFamily::Permutation),
            "none" => Ok(LambdaFamily::None),
            other => Err(LrpeError::InvalidSpec(format!("unknown lambda family `{other}`"))),
        }
    }
}

/// Multiplies component `k` by `exp(i s α_k)`.
pub fn lambda_unitary(s: usize, theta: &[f64], x: &[Complex]) -> Result<Vec<Complex>> {
    if theta.len() != x.len() {
        return Err(LrpeError::DimensionMismatch(format!(
            "{} frequencies for a vector of length {}",
            theta.len(),
            x.len()
        )));
    }
    Ok(x.iter().zip(theta).map(|(z, a)| z * cis(s as f64 * a)).collect())
}

/// Rotates pairs `(x_{2k}, x_{2k+1})` by `s α_k` and leaves the trailing
/// `q_identity` components alone.
pub fn lambda_orthogonal(s: usize, theta: &[f64], q_identity: usize, x: &[f64]) -> Result<Vec<f64>> {
    let mut out = x.to_vec();
    rotate_pairs(s, theta, q_identity, &mut out)?;
    Ok(out)
}

/// `out_j = x_{π^s(j)}`.
pub fn lambda_permutation<T: Copy>(s: u64, perm: &PermutationSpec, x: &[T]) -> Result<Vec<T>> {
    if perm.d() != x.len() {
        return Err(LrpeError::DimensionMismatch(format!(
            "permutation on {} elements, vector of length {}",
            perm.d(),
            x.len()
        )));
    }
    Ok((0..x.len()).map(|j| x[perm.power_index(s, j)]).collect())
}

/// In-place pair rotation shared by [`lambda_orthogonal`] and the row kernels.
pub(crate) fn rotate_pairs(s: usize, theta: &[f64], q_identity: usize, x: &mut [f64]) -> Result<()> {
    let rotated = x.len().checked_sub(q_identity).ok_or_else(|| {
        LrpeError::DimensionMismatch(format!("identity block {q_identity} exceeds length {}", x.len()))
    })?;
    if rotated % 2 != 0 {
        return Err(LrpeError::DimensionMismatch(format!("rotated sub-dimension {rotated} is odd")));
    }
    if theta.len() != rotated / 2 {
        return Err(LrpeError::DimensionMismatch(format!(
            "{} frequencies for {} rotation pairs",
            theta.len(),
            rotated / 2
        )));
    }
    let pos = s as f64;
    for (pair, &alpha) in x[..rotated].chunks_exact_mut(2).zip(theta) {
        let (sin, cos) = (pos * alpha).sin_cos();
        let (a, b) = (pair[0], pair[1]);
        pair[0] = a * cos - b * sin;
        pair[1] = a * sin + b * cos;
    }
    Ok(())
}

/// In-place phase multiplication on split complex parts.
pub(crate) fn phase_rotate(s: usize, theta: &[f64], re: &mut [f64], im: &mut [f64]) {
    let pos = s as f64;
    for ((r, i), &alpha) in re.iter_mut().zip(im.iter_mut()).zip(theta) {
        let (sin, cos) = (pos * alpha).sin_cos();
        let (a, b) = (*r, *i);
        *r = a * cos - b * sin;
        *i = a * sin + b * cos;
    }
}

pub(crate) fn permute_in_place(s: u64, perm: &PermutationSpec, x: &mut [f64], scratch: &mut Vec<f64>) {
    scratch.clear();
    scratch.extend_from_slice(x);
    for (j, xj) in x.iter_mut().enumerate() {
        *xj = scratch[perm.power_index(s, j)];
    }
}
