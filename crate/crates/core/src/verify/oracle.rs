use std::collections::hash_map::Entry;
use std::collections::HashMap;

use crate::lrpe::{relative_matrix, PositionTransform};
use crate::numerics::{Complex, Mat};
use crate::{LrpeError, Result};

/// Largest sequence length the dense oracles accept.
pub const ORACLE_MAX_N: usize = 256;

/// `1 + elu`, written out independently of the attention module.
pub fn naive_phi(m: &Mat) -> Mat {
    let mut out = Mat::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let x = m.re_at(i, j);
            out.set_re(i, j, if x < 0.0 { x.exp() } else { 1.0 + x });
        }
    }
    out
}

/// `e_st = q_sᴴ W_{t−s} k_t` with every `W_{t−s}` materialized densely.
/// O(n²d²) on purpose.
pub fn oracle_scores(transform: &PositionTransform, q: &Mat, k: &Mat) -> Result<Mat> {
    let n = q.rows();
    let d = transform.dim();
    if n > ORACLE_MAX_N {
        return Err(LrpeError::Unsupported(format!("dense oracle limited to n <= {ORACLE_MAX_N}, got {n}")));
    }
    if q.cols() != d || k.cols() != d || k.rows() != n {
        return Err(LrpeError::DimensionMismatch(format!("Q {:?}, K {:?} for d = {d}", q.shape(), k.shape())));
    }
    let mut rel: HashMap<i64, Mat> = HashMap::new();
    let mut out = Mat::complex_zeros(n, n);
    for s in 0..n {
        for t in 0..n {
            let r = t as i64 - s as i64;
            let w = match rel.entry(r) {
                Entry::Occupied(e) => e.into_mut(),
                Entry::Vacant(e) => e.insert(relative_matrix(transform, r, 0)?),
            };
            let mut e = Complex::new(0.0, 0.0);
            for i in 0..d {
                let qi = q.get(s, i).conj();
                for j in 0..d {
                    e += qi * w.get(i, j) * k.get(t, j);
                }
            }
            out.set(s, t, e);
        }
    }
    Ok(out.demote_if_real())
}

/// Quadratic-order attention from oracle scores on `φ(Q)`, `φ(K)`:
/// `A_st = Re e_st / Σ_t' Re e_st'`, `O = A V`.
pub fn oracle_attention(transform: &PositionTransform, q: &Mat, k: &Mat, v: &Mat, causal: bool) -> Result<Mat> {
    let scores = oracle_scores(transform, &naive_phi(q), &naive_phi(k))?;
    let n = q.rows();
    let mut out = Mat::zeros(n, v.cols());
    for s in 0..n {
        let visible = if causal { s + 1 } else { n };
        let total: f64 = (0..visible).map(|t| scores.re_at(s, t)).sum();
        for j in 0..v.cols() {
            let mut acc = 0.0;
            for t in 0..visible {
                acc += scores.re_at(s, t) / total * v.re_at(t, j);
            }
            out.set_re(s, j, acc);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lrpe::{EncodingSpec, LambdaFamily, PFamily, ThetaKind};
    use crate::numerics::{conj_transpose, matmul, random_mat, Rng};

    #[test]
    fn none_gives_gram_matrix() {
        let t = EncodingSpec::new(LambdaFamily::None, PFamily::Identity, ThetaKind::A, 4).build().unwrap();
        let mut rng = Rng::new(1);
        let (q, k) = (random_mat(&mut rng, 6, 4), random_mat(&mut rng, 6, 4));
        let gram = matmul(&q, &conj_transpose(&k)).unwrap();
        assert!(oracle_scores(&t, &q, &k).unwrap().max_abs_diff(&gram).unwrap() < 1e-12);
    }

    #[test]
    fn toeplitz_for_repeated_vectors() {
        let t = EncodingSpec::new(LambdaFamily::Unitary, PFamily::Householder, ThetaKind::A, 4)
            .with_seed(2)
            .build()
            .unwrap();
        let mut rng = Rng::new(2);
        let qv = rng.normal_vec(4);
        let kv = rng.normal_vec(4);
        let n = 10;
        let q = Mat::from_real(n, 4, qv.repeat(n)).unwrap();
        let k = Mat::from_real(n, 4, kv.repeat(n)).unwrap();
        let e = oracle_scores(&t, &q, &k).unwrap();
        for s in 1..n {
            for tt in 1..n {
                assert!((e.get(s, tt) - e.get(s - 1, tt - 1)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_large_n() {
        let t = EncodingSpec::new(LambdaFamily::None, PFamily::Identity, ThetaKind::A, 2).build().unwrap();
        let m = Mat::zeros(300, 2);
        assert!(oracle_scores(&t, &m, &m).is_err());
    }
}
