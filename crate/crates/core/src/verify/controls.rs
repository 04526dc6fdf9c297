use super::checks::{check_decomposability, check_unitarity, random_qk};
use super::family::PositionFamily;
use super::gradient::check_gradient_with;
use super::oracle::{naive_phi, oracle_scores};
use super::report::{MaxErr, PropertyReport};
use super::tol;
use crate::lrpe::{encode_positions, theta_grad_score, EncodingSpec, PermutationSpec, PositionTransform};
use crate::numerics::Mat;
use crate::Result;

/// A 2×2-block rotation whose first block uses a mismatched angle in its
/// second row, so `W_s` is not orthogonal for `s ≥ 1`.
#[derive(Debug, Clone)]
pub struct CorruptedRotation {
    pub theta: Vec<f64>,
    pub factor: f64,
}

impl PositionFamily for CorruptedRotation {
    fn name(&self) -> String {
        "corrupted_rotation".into()
    }

    fn dim(&self) -> usize {
        2 * self.theta.len()
    }

    fn position_matrix(&self, s: usize) -> Result<Mat> {
        let mut m = Mat::identity(self.dim());
        for (k, &a) in self.theta.iter().enumerate() {
            let angle = s as f64 * a;
            let bent = if k == 0 { angle * self.factor } else { angle };
            let i = 2 * k;
            m.set_re(i, i, angle.cos());
            m.set_re(i, i + 1, -angle.sin());
            m.set_re(i + 1, i, bent.sin());
            m.set_re(i + 1, i + 1, angle.cos());
        }
        Ok(m)
    }
}

/// `diag(1, s + 1)`: not unitary and not decomposable.
#[derive(Debug, Clone, Copy, Default)]
pub struct NonUnitaryDiagonal;

impl PositionFamily for NonUnitaryDiagonal {
    fn name(&self) -> String {
        "non_unitary_diagonal".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn position_matrix(&self, s: usize) -> Result<Mat> {
        let mut m = Mat::identity(2);
        m.set_re(1, 1, s as f64 + 1.0);
        Ok(m)
    }
}

/// A deliberately broken input and whether the suite caught it.
#[derive(Debug, Clone)]
pub struct ControlOutcome {
    pub name: String,
    pub detected: bool,
    pub report: Option<PropertyReport>,
}

impl ControlOutcome {
    fn from_report(name: &str, report: PropertyReport) -> Self {
        Self { name: name.into(), detected: !report.passed, report: Some(report) }
    }
}

/// Linear scores with every key encoded one position late.
fn shifted_key_error(transform: &PositionTransform, n: usize, seed: u64) -> Result<PropertyReport> {
    let d = transform.dim();
    let (q, k, _) = random_qk(n, d, seed);
    let (fq, fk) = (naive_phi(&q), naive_phi(&k));
    let mut padded = Mat::zeros(n + 1, d);
    for t in 0..n {
        for j in 0..d {
            padded.set_re(t + 1, j, fk.re_at(t, j));
        }
    }
    let eq = encode_positions(transform, &fq)?;
    let ek = encode_positions(transform, &padded)?;
    let oracle = oracle_scores(transform, &fq, &fk)?;
    let mut err = MaxErr::default();
    for s in 0..n {
        for t in 0..n {
            let e: f64 = (0..d).map(|j| (eq.get(s, j).conj() * ek.get(t + 1, j)).re).sum();
            err.push((e - oracle.re_at(s, t)).abs());
        }
    }
    Ok(err.report("linear_vs_oracle[shifted_keys]", tol::SCORES))
}

/// Runs every negative control. Each one must come back `detected`.
pub fn run_negative_controls(seed: u64) -> Result<Vec<ControlOutcome>> {
    let rope: PositionTransform = "orthogonal:identity:a:4".parse::<EncodingSpec>()?.build()?;
    let corrupted = CorruptedRotation { theta: rope.theta().to_vec(), factor: 1.5 };
    let mut out = vec![
        ControlOutcome::from_report("corrupted_rotation_unitarity", check_unitarity(&corrupted, 64)?),
        ControlOutcome::from_report(
            "non_unitary_diagonal_decomposability",
            check_decomposability(&NonUnitaryDiagonal, 32)?,
        ),
    ];

    let householder: PositionTransform =
        format!("orthogonal:householder:a:8:seed={seed}").parse::<EncodingSpec>()?.build()?;
    let flipped = check_gradient_with(&householder, 20, seed, &|tr, s, t, q, k| {
        Ok(theta_grad_score(tr, s, t, q, k)?.into_iter().map(|g| -g).collect())
    })?;
    out.push(ControlOutcome::from_report("flipped_gradient_sign", flipped));
    out.push(ControlOutcome::from_report("shifted_key_positions", shifted_key_error(&householder, 32, seed)?));

    let rejected = PermutationSpec::new(vec![0, 0, 1]).is_err();
    out.push(ControlOutcome { name: "non_bijective_permutation".into(), detected: rejected, report: None });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_control_detected() {
        for c in run_negative_controls(3).unwrap() {
            assert!(c.detected, "{} slipped through: {:?}", c.name, c.report);
        }
    }

    #[test]
    fn controls_are_sane_at_origin() {
        let c = CorruptedRotation { theta: vec![0.3, 0.1], factor: 1.5 };
        assert_eq!(c.position_matrix(0).unwrap().distance_from_identity(), 0.0);
        assert!(check_unitarity(&NonUnitaryDiagonal, 0).unwrap().passed);
    }
}
