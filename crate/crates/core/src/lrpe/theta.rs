use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{LrpeError, Result};

/// How rotation frequencies are initialised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThetaKind {
    /// `α_t = 10000^(-2t/d)`, `t = 0, 1, …`
    A,
    /// `α_t = π / (2 l (d/2)) · t`, `t = 1, 2, …`
    B,
    /// `α_t = π / (2 l) / t`, `t = 1, 2, …`
    C,
    /// Same values as [`ThetaKind::A`], flagged as trainable.
    LearnedInitA,
}

impl ThetaKind {
    pub fn needs_length(self) -> bool {
        matches!(self, ThetaKind::B | ThetaKind::C)
    }

    pub fn is_learnable(self) -> bool {
        self == ThetaKind::LearnedInitA
    }
}

impl fmt::Display for ThetaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThetaKind::A => "a",
            ThetaKind::B => "b",
            ThetaKind::C => "c",
            ThetaKind::LearnedInitA => "learned",
        })
    }
}

impl FromStr for ThetaKind {
    type Err = LrpeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" => Ok(ThetaKind::A),
            "b" => Ok(ThetaKind::B),
            "c" => Ok(ThetaKind::C),
            "learned" => Ok(ThetaKind::LearnedInitA),
            other => Err(LrpeError::InvalidSpec(format!("unknown theta kind `{other}`"))),
        }
    }
}

/// A realised set of frequencies `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSchedule {
    pub kind: ThetaKind,
    /// Dimension entering the formula (the rotated sub-dimension).
    pub d: usize,
    /// Reference sequence length, kinds `b` and `c` only.
    pub l: Option<usize>,
    pub values: Vec<f64>,
}

/// Builds `count` frequencies of the given kind.
pub fn make_theta(kind: ThetaKind, d: usize, l: Option<usize>, count: usize) -> Result<ThetaSchedule> {
    if d == 0 {
        return Err(LrpeError::InvalidSpec("theta dimension must be at least 1".into()));
    }
    let values = match kind {
        ThetaKind::A | ThetaKind::LearnedInitA => {
            (0..count).map(|t| 10000f64.powf(-2.0 * t as f64 / d as f64)).collect()
        }
        ThetaKind::B | ThetaKind::C => {
            let l = match l {
                Some(l) if l >= 1 => l as f64,
                _ => {
                    return Err(LrpeError::InvalidSpec(format!("theta kind {kind} requires a reference length l >= 1")))
                }
            };
            if kind == ThetaKind::B {
                let half = d as f64 / 2.0;
                (1..=count).map(|t| PI / (2.0 * l * half) * t as f64).collect()
            } else {
                (1..=count).map(|t| PI / (2.0 * l) / t as f64).collect()
            }
        }
    };
    Ok(ThetaSchedule { kind, d, l, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_a_examples() {
        let t = make_theta(ThetaKind::A, 4, None, 2).unwrap();
        assert_eq!(t.values[0], 1.0);
        assert!((t.values[1] - 0.01).abs() < 1e-15);
        assert_eq!(make_theta(ThetaKind::A, 2, None, 1).unwrap().values, vec![1.0]);
    }

    #[test]
    fn kind_a_strictly_decreasing_in_unit_interval() {
        let t = make_theta(ThetaKind::A, 64, None, 32).unwrap();
        assert!(t.values.windows(2).all(|w| w[1] < w[0]));
        assert!(t.values.iter().all(|&v| v > 0.0 && v <= 1.0));
    }

    #[test]
    fn kind_c_example() {
        let t = make_theta(ThetaKind::C, 4, Some(8), 2).unwrap();
        assert!((t.values[0] - PI / 16.0).abs() < 1e-15);
        assert!((t.values[1] - PI / 32.0).abs() < 1e-15);
    }

    #[test]
    fn kind_b_is_linear_in_t() {
        // e = 4, l = 8: π/(2·8·2)·t
        let t = make_theta(ThetaKind::B, 4, Some(8), 2).unwrap();
        assert!((t.values[0] - PI / 32.0).abs() < 1e-15);
        assert!((t.values[1] - PI / 16.0).abs() < 1e-15);
    }

    #[test]
    fn b_and_c_need_length() {
        assert!(make_theta(ThetaKind::B, 4, None, 2).is_err());
        assert!(make_theta(ThetaKind::C, 4, Some(0), 2).is_err());
    }

    #[test]
    fn learned_matches_a() {
        let a = make_theta(ThetaKind::A, 8, None, 4).unwrap();
        let l = make_theta(ThetaKind::LearnedInitA, 8, None, 4).unwrap();
        assert_eq!(a.values, l.values);
        assert!(ThetaKind::LearnedInitA.is_learnable());
    }
}
