//! Outcome of a verification suite.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    pub detail: String,
}

/// Accumulated result of running one identity or property over many trials.
///
/// In exact mode `exact` is `Some(true)` iff every recorded residual was
/// identically zero; float mode leaves it `None` and tracks `max_residual`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub attempted: usize,
    pub passed: usize,
    pub skipped: usize,
    pub max_residual: f64,
    pub exact: Option<bool>,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(suite: impl Into<String>, exact_mode: bool) -> Self {
        Self {
            suite: suite.into(),
            attempted: 0,
            passed: 0,
            skipped: 0,
            max_residual: 0.0,
            exact: exact_mode.then_some(true),
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn for_scalar<T: Scalar>(suite: impl Into<String>) -> Self {
        Self::new(suite, T::EXACT)
    }

    /// Records a residual; `scale` makes float residuals relative
    /// (`|dev| / max(1, |scale|)`). Exact mode passes only on a zero residual.
    pub fn record<T: Scalar>(
        &mut self,
        trial: usize,
        deviation: &T,
        scale: &T,
        tol: f64,
        detail: impl FnOnce() -> String,
    ) -> bool {
        self.attempted += 1;
        let (residual, ok) = if T::EXACT {
            (deviation.to_f64().abs(), deviation.is_zero())
        } else {
            let r = deviation.to_f64().abs() / scale.to_f64().abs().max(1.0);
            (r, r <= tol)
        };
        if residual.is_nan() || residual > self.max_residual {
            self.max_residual = residual;
        }
        if ok {
            self.passed += 1;
        } else {
            if T::EXACT {
                self.exact = Some(false);
            }
            self.failures.push(Failure {
                trial,
                detail: detail(),
            });
        }
        ok
    }

    /// Records a plain float residual against an absolute tolerance.
    pub fn record_abs(
        &mut self,
        trial: usize,
        residual: f64,
        tol: f64,
        detail: impl FnOnce() -> String,
    ) -> bool {
        self.attempted += 1;
        if residual.is_nan() || residual > self.max_residual {
            self.max_residual = residual;
        }
        let ok = residual <= tol;
        if ok {
            self.passed += 1;
        } else {
            if self.exact.is_some() {
                self.exact = Some(false);
            }
            self.failures.push(Failure {
                trial,
                detail: detail(),
            });
        }
        ok
    }

    /// Records a boolean condition (exact structural facts).
    pub fn record_bool(&mut self, trial: usize, ok: bool, detail: impl FnOnce() -> String) -> bool {
        self.attempted += 1;
        if ok {
            self.passed += 1;
        } else {
            if self.exact.is_some() {
                self.exact = Some(false);
            }
            self.max_residual = self.max_residual.max(1.0);
            self.failures.push(Failure {
                trial,
                detail: detail(),
            });
        }
        ok
    }

    /// Records a trial whose computation errored outright.
    pub fn record_error(&mut self, trial: usize, detail: impl Into<String>) {
        self.attempted += 1;
        if self.exact.is_some() {
            self.exact = Some(false);
        }
        self.max_residual = f64::INFINITY;
        self.failures.push(Failure {
            trial,
            detail: detail.into(),
        });
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.attempted += other.attempted;
        self.passed += other.passed;
        self.skipped += other.skipped;
        if other.max_residual.is_nan() || other.max_residual > self.max_residual {
            self.max_residual = other.max_residual;
        }
        self.exact = match (self.exact, other.exact) {
            (Some(a), Some(b)) => Some(a && b),
            (a, None) => a,
            (None, b) => b,
        };
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }

    /// Pass iff nothing failed and at least one trial was evaluated.
    pub fn passed_all(&self) -> bool {
        self.failures.is_empty() && self.passed > 0
    }

    pub fn summary(&self) -> String {
        let verdict = if self.passed_all() { "PASS" } else { "FAIL" };
        let exact = match self.exact {
            Some(true) => " exact-zero",
            Some(false) => " exact: NONZERO",
            None => "",
        };
        format!(
            "{verdict} {}: {}/{} passed ({} skipped), max residual {:.3e}{exact}",
            self.suite, self.passed, self.attempted, self.skipped, self.max_residual
        )
    }
}
