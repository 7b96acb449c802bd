use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Outcome of one check on one instance.
///
/// For non-skipped reports, `status` is `Pass` exactly when
/// `max_violation <= tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub max_violation: f64,
    pub tolerance: f64,
    pub instance_digest: String,
    pub grid_provenance: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

impl VerificationReport {
    pub fn judged(check: &str, max_violation: f64, tolerance: f64) -> Self {
        let status = if max_violation <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        // JSON has no NaN or infinity
        let max_violation = if max_violation.is_finite() {
            max_violation
        } else {
            f64::MAX
        };
        Self {
            check: check.to_string(),
            status,
            reason: None,
            max_violation,
            tolerance,
            instance_digest: String::new(),
            grid_provenance: String::new(),
            details: Vec::new(),
        }
    }

    pub fn skipped(check: &str, reason: impl Into<String>, tolerance: f64) -> Self {
        Self {
            check: check.to_string(),
            status: Status::Skipped,
            reason: Some(reason.into()),
            max_violation: 0.0,
            tolerance,
            instance_digest: String::new(),
            grid_provenance: String::new(),
            details: Vec::new(),
        }
    }

    pub fn with_digest(mut self, digest: String) -> Self {
        self.instance_digest = digest;
        self
    }

    pub fn with_grid(mut self, grid: impl Into<String>) -> Self {
        self.grid_provenance = grid.into();
        self
    }

    pub fn with_details(mut self, details: Vec<String>) -> Self {
        self.details = details;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    /// Recomputes the status from the stored numbers.
    pub fn is_consistent(&self) -> bool {
        match self.status {
            Status::Skipped => true,
            Status::Pass => self.max_violation <= self.tolerance,
            Status::Fail => !(self.max_violation <= self.tolerance),
        }
    }
}

/// `params;sha256=<first 16 hex digits of the instance JSON hash>`.
pub fn instance_digest(params: &str, instance_json: &str) -> String {
    let hash = Sha256::digest(instance_json.as_bytes());
    let hex: String = hash.iter().take(8).map(|b| format!("{b:02x}")).collect();
    if params.is_empty() {
        format!("sha256={hex}")
    } else {
        format!("{params};sha256={hex}")
    }
}
