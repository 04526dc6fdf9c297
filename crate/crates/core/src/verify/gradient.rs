use super::report::{MaxErr, PropertyReport};
use super::tol;
use crate::lrpe::{theta_grad_score, PositionTransform};
use crate::numerics::{Complex, Rng};
use crate::{LrpeError, Result};

/// Central differences of `Re[(Λ^(s)Pq)ᴴ(Λ^(t)Pk)]` in each frequency.
/// `h` must lie in `[1e-7, 1e-3]`.
pub fn fd_gradient(
    transform: &PositionTransform,
    s: usize,
    t: usize,
    q: &[Complex],
    k: &[Complex],
    h: f64,
) -> Result<Vec<f64>> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(LrpeError::Unsupported(format!("finite-difference step {h} outside [1e-7, 1e-3]")));
    }
    let theta = transform.theta().to_vec();
    (0..theta.len())
        .map(|j| {
            let shifted = |delta: f64| -> Result<f64> {
                let mut th = theta.clone();
                th[j] += delta;
                transform.clone().with_theta(th)?.score(s, t, q, k)
            };
            Ok((shifted(h)? - shifted(-h)?) / (2.0 * h))
        })
        .collect()
}

type GradFn<'a> = dyn Fn(&PositionTransform, usize, usize, &[Complex], &[Complex]) -> Result<Vec<f64>> + 'a;

/// [`check_gradient`] against an arbitrary gradient routine.
pub fn check_gradient_with(
    transform: &PositionTransform,
    draws: usize,
    seed: u64,
    grad: &GradFn<'_>,
) -> Result<PropertyReport> {
    let d = transform.dim();
    let mut rng = Rng::new(seed);
    let mut err = MaxErr::default();
    for _ in 0..draws {
        let q: Vec<Complex> = (0..d).map(|_| Complex::new(rng.normal(), 0.0)).collect();
        let k: Vec<Complex> = (0..d).map(|_| Complex::new(rng.normal(), 0.0)).collect();
        let s = rng.below(32) as usize;
        let mut t = rng.below(31) as usize;
        if t >= s {
            t += 1;
        }
        let g = grad(transform, s, t, &q, &k)?;
        let fd = fd_gradient(transform, s, t, &q, &k, tol::FD_STEP)?;
        let diff: f64 = g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale: f64 = fd.iter().map(|x| x * x).sum::<f64>().sqrt().max(g.iter().map(|x| x * x).sum::<f64>().sqrt());
        err.push(if scale > 1e-12 { diff / scale } else { diff });
    }
    Ok(err.report(format!("theta_gradient[{}]", transform.spec()), tol::GRADIENT))
}

/// Analytic theta gradient vs central differences (`h = 1e-5`), relative
/// 2-norm error, `s ≠ t` drawn from `0..32`.
pub fn check_gradient(transform: &PositionTransform, draws: usize, seed: u64) -> Result<PropertyReport> {
    check_gradient_with(transform, draws, seed, &|tr, s, t, q, k| theta_grad_score(tr, s, t, q, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lrpe::EncodingSpec;

    fn t(s: &str) -> PositionTransform {
        s.parse::<EncodingSpec>().unwrap().build().unwrap()
    }

    #[test]
    fn analytic_matches_fd() {
        for s in
            ["unitary:householder:a:4", "orthogonal:odd_even:a:6", "mixed:householder:a:7", "unitary:fourier:b:4:l=16"]
        {
            let r = check_gradient(&t(s), 10, 1).unwrap();
            assert!(r.passed, "{s}: {}", r.max_error);
        }
    }

    fn abs_err(tr: &PositionTransform, s: usize, t: usize, q: &[Complex], k: &[Complex], h: f64) -> f64 {
        let g = theta_grad_score(tr, s, t, q, k).unwrap();
        let fd = fd_gradient(tr, s, t, q, k, h).unwrap();
        g.iter().zip(&fd).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn same_position_gives_zero() {
        let tr = t("orthogonal:householder:a:6");
        let mut rng = Rng::new(2);
        let q: Vec<Complex> = (0..6).map(|_| Complex::new(rng.normal(), 0.0)).collect();
        let k: Vec<Complex> = (0..6).map(|_| Complex::new(rng.normal(), 0.0)).collect();
        assert!(fd_gradient(&tr, 9, 9, &q, &k, 1e-5).unwrap().iter().all(|g| g.abs() < 1e-9));
    }

    #[test]
    fn step_sweep_is_v_shaped() {
        // Truncation error shrinks with h, rounding error grows as 1/h.
        for spec in ["unitary:householder:a:8", "orthogonal:householder:a:8", "mixed:identity:a:8"] {
            let tr = t(spec);
            let mut rng = Rng::new(5);
            let q: Vec<Complex> = (0..8).map(|_| Complex::new(rng.normal(), 0.0)).collect();
            let k: Vec<Complex> = (0..8).map(|_| Complex::new(rng.normal(), 0.0)).collect();
            let e: Vec<f64> = [1e-4, 1e-5, 1e-6].iter().map(|&h| abs_err(&tr, 10, 11, &q, &k, h)).collect();
            assert!(e[1] < e[0] && e[1] < e[2], "{spec}: {e:?}");
        }
    }

    #[test]
    fn step_bounds_enforced() {
        let tr = t("unitary:identity:a:2");
        let z = vec![Complex::new(1.0, 0.0); 2];
        assert!(fd_gradient(&tr, 0, 1, &z, &z, 1e-2).is_err());
        assert!(fd_gradient(&tr, 0, 1, &z, &z, 1e-8).is_err());
        assert!(fd_gradient(&tr, 0, 1, &z, &z, 1e-5).is_ok());
    }

    #[test]
    fn thetaless_family_rejected() {
        assert!(check_gradient(&t("permutation:identity:a:4"), 1, 0).is_err());
    }
}
