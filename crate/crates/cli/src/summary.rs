//! `summary.json`, schema version 1:
//!
//! ```text
//! {
//!   "schema_version": 1,
//!   "command": "liouville",
//!   "config_hash": "<sha256 hex of the resolved config>",
//!   "status": "pass" | "fail" | "error",
//!   "error": "<message>",            (only when status is "error")
//!   "checks": [
//!     { "check": "...", "status": "pass" | "fail",
//!       "residual": <number or null>, "tolerance": <number>,
//!       "bound": "upper" | "lower" }
//!   ]
//! }
//! ```
//!
//! An upper-bound check passes when residual ≤ tolerance, a lower-bound check
//! when residual > tolerance. Non-finite residuals are written as null and
//! always fail.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub status: CheckStatus,
    pub residual: f64,
    pub tolerance: f64,
    pub bound: Bound,
}

impl Check {
    pub fn upper(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let ok = residual.is_finite() && residual <= tolerance;
        Self::new(name, residual, tolerance, Bound::Upper, ok)
    }

    pub fn lower(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        let ok = residual.is_finite() && residual > tolerance;
        Self::new(name, residual, tolerance, Bound::Lower, ok)
    }

    fn new(name: impl Into<String>, residual: f64, tolerance: f64, bound: Bound, ok: bool) -> Self {
        Self {
            check: name.into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            residual,
            tolerance,
            bound,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub command: String,
    pub config_hash: String,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn from_checks(command: &str, config_hash: &str, checks: Vec<Check>) -> Self {
        let ok = !checks.is_empty() && checks.iter().all(Check::passed);
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config_hash: config_hash.into(),
            status: if ok { RunStatus::Pass } else { RunStatus::Fail },
            error: None,
            checks,
        }
    }

    pub fn from_error(command: &str, config_hash: &str, error: String) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            config_hash: config_hash.into(),
            status: RunStatus::Error,
            error: Some(error),
            checks: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serialises");
        s.push('\n');
        s
    }

    /// 0 when every check passed, 1 on a failed check, 2 on error.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            RunStatus::Pass => 0,
            RunStatus::Fail => 1,
            RunStatus::Error => 2,
        }
    }
}
