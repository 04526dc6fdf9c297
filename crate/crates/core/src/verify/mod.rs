//! Independent oracles and property checks.
//!
//! Oracles here are written in plain loop order over dense matrices and do
//! not reuse the matrix-free kernels they are checking.

mod checks;
mod controls;
mod family;
mod gradient;
mod oracle;
mod report;
mod scaling;
mod suite;

pub use checks::{
    check_anchor_independence, check_canonical, check_canonical_stacking, check_decomposability,
    check_left_unitary_invariance, check_linear_vs_oracle, check_linear_vs_quadratic, check_permutation_orthogonality,
    check_permutation_power_law, check_row_normalization, check_type_correspondence, check_unitarity, random_qk,
    CanonicalMethod,
};
pub use controls::{run_negative_controls, ControlOutcome, CorruptedRotation, NonUnitaryDiagonal};
pub use family::PositionFamily;
pub use gradient::{check_gradient, check_gradient_with, fd_gradient};
pub use oracle::{naive_phi, oracle_attention, oracle_scores};
pub use report::PropertyReport;
pub use scaling::{fit_loglog, fit_scaling, fit_scaling_timed, ScalingFit, ScalingRun};
pub use suite::{run_check_suite, SuiteConfig};

/// Tolerances pinned for the property suite.
pub mod tol {
    /// `‖W_sᴴW_s − I‖_F`.
    pub const UNITARITY: f64 = 1e-10;
    /// `‖W_sᴴW_t − W_{t−s}‖_F` and anchor independence.
    pub const DECOMPOSABILITY: f64 = 1e-8;
    /// Linearized vs dense-oracle scores, absolute.
    pub const SCORES: f64 = 1e-8;
    /// Linear vs quadratic evaluation order, relative Frobenius.
    pub const OUTPUTS: f64 = 1e-8;
    /// Implied attention rows sum to one.
    pub const ROW_SUM: f64 = 1e-8;
    /// Direct formula vs canonical composition.
    pub const CANONICAL: f64 = 1e-10;
    /// Stacked vs summed canonical evaluation.
    pub const STACKING: f64 = 1e-12;
    /// Complex unitary vs interleaved orthogonal scores.
    pub const TYPE_CORRESPONDENCE: f64 = 1e-10;
    /// Scores under a left-multiplied unitary.
    pub const LEFT_UNITARY: f64 = 1e-10;
    /// Analytic vs central-difference theta gradient, relative.
    pub const GRADIENT: f64 = 1e-4;
    /// Central-difference step.
    pub const FD_STEP: f64 = 1e-5;
    /// Permutation identities hold exactly.
    pub const EXACT: f64 = 0.0;
}
