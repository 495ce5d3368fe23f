// SPDX-License-Identifier: Apache-2.0

//! Declarative workloads for the memory simulators: config parsing, serial
//! oracles, reports, sweeps and the routing-delay estimate behind the `cpm`
//! binary.

pub mod config;
pub mod feasibility;
pub mod oracle;
pub mod report;
pub mod sweep;
pub mod workload;

pub use config::WorkloadConfig;
pub use report::{run, OracleStatus, Report};
pub use sweep::{fit_loglog, sweep, Fit, SweepSpec, SweepTable};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const ORACLE_FAIL: i32 = 1;
    pub const CONFIG: i32 = 2;
}
