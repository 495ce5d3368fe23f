// SPDX-License-Identifier: Apache-2.0

//! The report a `run` emits.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::config::{Switch, WorkloadConfig};
use crate::oracle::first_divergence;
use crate::workload::{execute, Outcome};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleStatus {
    Pass,
    Fail,
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divergence {
    /// JSON pointer into the result.
    pub path: String,
    pub expected: Value,
    pub actual: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub status: OracleStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_divergence: Option<Divergence>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub workload: String,
    pub params: Value,
    /// SHA-256 of the compact JSON result.
    pub result_digest: String,
    pub macro_cycles: u64,
    pub micro_cycles: u64,
    pub exclusive_ops: u64,
    pub oracle: OracleReport,
    /// Only measured on request; `null` keeps reruns byte-identical.
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.oracle.status != OracleStatus::Fail
    }
}

pub fn digest(result: &Value) -> String {
    let bytes = serde_json::to_vec(result).expect("results serialize");
    hex::encode(Sha256::digest(bytes))
}

/// Runs `cfg` and assembles its report; the outcome is returned alongside
/// for callers that want the result itself.
pub fn run(cfg: &WorkloadConfig, timing: bool) -> Result<(Report, Outcome), CliError> {
    let start = std::time::Instant::now();
    let out = execute(cfg)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let oracle = match (&out.check, cfg.oracle) {
        (_, Switch::Off) | (None, _) => OracleReport {
            status: OracleStatus::Off,
            first_divergence: None,
        },
        (Some((expected, actual)), Switch::On) => match first_divergence(expected, actual) {
            None => OracleReport {
                status: OracleStatus::Pass,
                first_divergence: None,
            },
            Some((path, expected, actual)) => OracleReport {
                status: OracleStatus::Fail,
                first_divergence: Some(Divergence {
                    path,
                    expected,
                    actual,
                }),
            },
        },
    };
    let mut params = cfg.to_value();
    if let Some(obj) = params.as_object_mut() {
        obj.remove("workload");
    }
    let report = Report {
        workload: cfg.to_value()["workload"]
            .as_str()
            .unwrap_or_default()
            .to_string(),
        params,
        result_digest: digest(&out.result),
        macro_cycles: out.ledger.macro_cycles,
        micro_cycles: out.ledger.micro_cycles,
        exclusive_ops: out.ledger.exclusive_ops,
        oracle,
        wall_time_ms: timing.then_some(elapsed),
    };
    Ok((report, out))
}
