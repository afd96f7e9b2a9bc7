//! Structured record of a single identity or inequality check.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// One verified comparison: inputs, both sides, pass/fail at a tolerance.
///
/// `pass` holds exactly when the stated comparison holds: for identity
/// checks `|lhs - rhs| <= tolerance`, for bound checks `lhs <= rhs +
/// tolerance`. Elapsed time is informational and excluded from the
/// deterministic CSV surfaces.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_id: String,
    pub inputs: BTreeMap<String, String>,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
    pub tolerance: f64,
    /// Seconds spent producing the check, when measured.
    pub elapsed: f64,
}

impl VerificationReport {
    /// `lhs` must equal `rhs` within `tolerance`.
    pub fn identity(
        check_id: &str,
        inputs: BTreeMap<String, String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        VerificationReport {
            check_id: check_id.to_string(),
            inputs,
            lhs,
            rhs,
            pass: (lhs - rhs).abs() <= tolerance,
            tolerance,
            elapsed: 0.0,
        }
    }

    /// `lhs` must not exceed `rhs` by more than `tolerance`.
    pub fn bound(
        check_id: &str,
        inputs: BTreeMap<String, String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        VerificationReport {
            check_id: check_id.to_string(),
            inputs,
            lhs,
            rhs,
            pass: lhs <= rhs + tolerance,
            tolerance,
            elapsed: 0.0,
        }
    }

    pub fn timed(mut self, started: Instant) -> Self {
        self.elapsed = started.elapsed().as_secs_f64();
        self
    }
}

/// Convenience constructor for the `inputs` map.
pub fn inputs<const K: usize>(pairs: [(&str, String); K]) -> BTreeMap<String, String> {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}
