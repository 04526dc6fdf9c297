use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LambdaFamily, PFamily, PositionTransform, ThetaKind};
use crate::{LrpeError, Result};

/// Declarative description of one encoding instance.
///
/// Text form: `<lambda>:<p>:<theta_kind>:<d>[:q=<q>][:l=<l>][:seed=<seed>]`,
/// e.g. `orthogonal:householder:a:64:q=0:seed=7`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub lambda: LambdaFamily,
    pub p: PFamily,
    pub theta_kind: ThetaKind,
    pub d: usize,
    /// Identity block size; orthogonal and mixed only.
    pub q: Option<usize>,
    /// Reference length for theta kinds `b` and `c`.
    pub l: Option<usize>,
    pub seed: u64,
}

impl EncodingSpec {
    pub fn new(lambda: LambdaFamily, p: PFamily, theta_kind: ThetaKind, d: usize) -> Self {
        Self { lambda, p, theta_kind, d, q: None, l: None, seed: 0 }
    }

    pub fn with_q(mut self, q: usize) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_l(mut self, l: usize) -> Self {
        self.l = Some(l);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Size of the rotated prefix for the mixed family: `d/2` rounded up to even.
    pub fn mixed_rotated_dim(d: usize) -> usize {
        let e = d / 2;
        e + e % 2
    }

    /// Effective identity block size. Orthogonal defaults to `d mod 2`.
    pub fn identity_block(&self) -> usize {
        match self.lambda {
            LambdaFamily::Orthogonal => self.q.unwrap_or(self.d % 2),
            LambdaFamily::Mixed => self.d - Self::mixed_rotated_dim(self.d).min(self.d),
            _ => 0,
        }
    }

    /// Number of components touched by rotations or phases.
    pub fn rotated_dim(&self) -> usize {
        match self.lambda {
            LambdaFamily::Orthogonal | LambdaFamily::Mixed => self.d - self.identity_block().min(self.d),
            LambdaFamily::Unitary => self.d,
            _ => 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LrpeError::InvalidSpec(msg));
        if self.d == 0 {
            return bad("d must be at least 1".into());
        }
        if self.p == PFamily::Fourier && self.lambda != LambdaFamily::Unitary {
            return bad(format!("fourier P requires the unitary family, got {}", self.lambda));
        }
        match self.lambda {
            LambdaFamily::Orthogonal => {
                let q = self.identity_block();
                if q > self.d {
                    return bad(format!("identity block {q} exceeds d = {}", self.d));
                }
                if !(self.d - q).is_multiple_of(2) {
                    return bad(format!("orthogonal rotated sub-dimension d - q = {} must be even", self.d - q));
                }
            }
            LambdaFamily::Mixed => {
                if self.d < 3 {
                    return bad(format!("mixed family needs d >= 3, got {}", self.d));
                }
                let q = self.identity_block();
                if let Some(given) = self.q {
                    if given != q {
                        return bad(format!("mixed family with d = {} fixes q = {q}, got {given}", self.d));
                    }
                }
            }
            _ => {
                if self.q.is_some() {
                    return bad(format!("q is only meaningful for orthogonal/mixed, not {}", self.lambda));
                }
            }
        }
        if self.lambda.has_theta() && self.theta_kind.needs_length() && !self.l.is_some_and(|l| l >= 1) {
            return bad(format!("theta kind {} requires l >= 1", self.theta_kind));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<PositionTransform> {
        PositionTransform::new(self.clone())
    }

    /// Every `(lambda, p)` pair that passes validation at dimension `d`,
    /// with theta kind `a` and the given seed.
    pub fn valid_combinations(d: usize, seed: u64) -> Vec<EncodingSpec> {
        let ps = [PFamily::Identity, PFamily::Householder, PFamily::OddEven, PFamily::Fourier];
        LambdaFamily::all()
            .into_iter()
            .flat_map(|lambda| {
                ps.into_iter().map(move |p| EncodingSpec::new(lambda, p, ThetaKind::A, d).with_seed(seed))
            })
            .filter(|s| s.validate().is_ok())
            .collect()
    }
}

impl fmt::Display for EncodingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.lambda, self.p, self.theta_kind, self.d)?;
        if let Some(q) = self.q {
            write!(f, ":q={q}")?;
        }
        if let Some(l) = self.l {
            write!(f, ":l={l}")?;
        }
        write!(f, ":seed={}", self.seed)
    }
}

impl FromStr for EncodingSpec {
    type Err = LrpeError;

    /// Parses and validates.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() < 4 {
            return Err(LrpeError::InvalidSpec(format!(
                "`{s}`: expected <lambda>:<p>:<theta_kind>:<d>[:q=..][:l=..][:seed=..]"
            )));
        }
        let d = parts[3].parse().map_err(|_| LrpeError::InvalidSpec(format!("bad dimension `{}`", parts[3])))?;
        let mut spec = EncodingSpec::new(parts[0].parse()?, parts[1].parse()?, parts[2].parse()?, d);
        let mut seen_seed = false;
        for opt in &parts[4..] {
            let (key, value) = opt
                .split_once('=')
                .ok_or_else(|| LrpeError::InvalidSpec(format!("option `{opt}` is not key=value")))?;
            let num = |v: &str| -> Result<u64> {
                v.parse().map_err(|_| LrpeError::InvalidSpec(format!("bad value `{v}` for {key}")))
            };
            let dup = || LrpeError::InvalidSpec(format!("duplicate option `{key}`"));
            match key {
                "q" if spec.q.is_none() => spec.q = Some(num(value)? as usize),
                "l" if spec.l.is_none() => spec.l = Some(num(value)? as usize),
                "seed" if !seen_seed => {
                    spec.seed = num(value)?;
                    seen_seed = true;
                }
                "q" | "l" | "seed" => return Err(dup()),
                other => return Err(LrpeError::InvalidSpec(format!("unknown option `{other}`"))),
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}
