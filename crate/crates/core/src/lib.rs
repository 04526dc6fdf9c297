//! Linearized relative positional encodings (LRPE) for linear attention.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: dense real/complex matrices and the pinned RNG.
//! - [`lrpe`]: theta schedules, `P` and `Λ^(s)` families, position transforms.
//! - [`canonical`]: the primitive-triple form of relative encodings and five
//!   published instances of it.
//! - [`attention`]: softmax attention, linear attention and the LRPE-wired path.
//! - [`verify`]: naive oracles, identity checks, gradient checks, scaling fits.
//! - [`bench`] and [`cli`]: benchmark tables and the `lrpe` command line.

pub mod attention;
pub mod bench;
pub mod canonical;
pub mod cli;
mod error;
pub mod lrpe;
pub mod numerics;
pub mod verify;

pub use error::{LrpeError, Result};
pub use lrpe::{EncodingSpec, LambdaFamily, PFamily, PositionTransform, ThetaKind};
pub use numerics::{Complex, Mat, Rng, SequenceTensor};
