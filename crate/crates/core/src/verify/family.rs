use crate::lrpe::PositionTransform;
use crate::numerics::Mat;
use crate::Result;

/// Anything that yields a dense `W_s` per absolute position. Lets the
/// checks run against deliberately broken families as well.
pub trait PositionFamily {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn position_matrix(&self, s: usize) -> Result<Mat>;
}

impl PositionFamily for PositionTransform {
    fn name(&self) -> String {
        self.spec().to_string()
    }

    fn dim(&self) -> usize {
        PositionTransform::dim(self)
    }

    fn position_matrix(&self, s: usize) -> Result<Mat> {
        self.materialize(s)
    }
}
