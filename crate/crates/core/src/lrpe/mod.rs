//! The encoding family: `W_s = Pᴴ Λ^(s) P` with a fixed unitary `P` and a
//! position-indexed unitary `Λ^(s)`, so that `W_sᴴ W_t` depends on `t − s` only.

mod lambda;
mod permutation;
mod pmatrix;
mod spec;
mod theta;
mod transform;

pub use lambda::{lambda_orthogonal, lambda_permutation, lambda_unitary, LambdaFamily};
pub use permutation::PermutationSpec;
pub use pmatrix::{build_p, odd_even_gather, PFamily, PMatrix, HOUSEHOLDER_STREAM};
pub use spec::EncodingSpec;
pub use theta::{make_theta, ThetaKind, ThetaSchedule};
pub use transform::{encode_positions, relative_matrix, theta_grad_score, PositionTransform, PERMUTATION_STREAM};
