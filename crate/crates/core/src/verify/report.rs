use serde::{Deserialize, Serialize};

/// Outcome of one property check. `passed` iff `max_error <= tolerance`
/// (a NaN error never passes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub cases: usize,
}

impl PropertyReport {
    pub fn new(name: impl Into<String>, max_error: f64, tolerance: f64, cases: usize) -> Self {
        Self { name: name.into(), max_error, tolerance, passed: max_error <= tolerance, cases }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} max_error={:.3e} tol={:.1e} cases={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_error,
            self.tolerance,
            self.cases
        )
    }
}

/// Running maximum that lets NaN win, so a NaN error is never hidden.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct MaxErr {
    pub value: f64,
    pub cases: usize,
}

impl MaxErr {
    pub fn push(&mut self, e: f64) {
        self.cases += 1;
        if e.is_nan() || self.value.is_nan() {
            self.value = f64::NAN;
        } else if e > self.value {
            self.value = e;
        }
    }

    pub fn report(self, name: impl Into<String>, tolerance: f64) -> PropertyReport {
        PropertyReport::new(name, self.value, tolerance, self.cases)
    }
}
