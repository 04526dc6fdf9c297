//! Dense linear algebra over real and complex doubles, plus the pinned RNG.

mod mat;
mod rng;

pub use mat::{conj_transpose, fro_norm, matmul, random_mat, Mat};
pub use rng::{Rng, SplitMix64};

/// Complex scalar stored as an explicit `(re, im)` pair of doubles.
pub type Complex = num_complex::Complex64;

/// An `n × d` matrix whose rows are per-position vectors.
pub type SequenceTensor = Mat;

/// `exp(iθ)` as a unit-modulus complex number.
#[inline]
pub fn cis(theta: f64) -> Complex {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

/// `Σ conj(a_i) b_i`.
pub fn inner(a: &[Complex], b: &[Complex]) -> Complex {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
