// SPDX-License-Identifier: Apache-2.0

//! Algorithms built from word-level broadcasts on computable memory.
//!
//! Each entry point loads its input over the exclusive bus, snapshots the
//! ledger, runs, and reports the cycles spent after loading. Results are
//! read back on the host without charge unless the algorithm itself needs a
//! value mid-run, in which case the read is an exclusive op.

use std::collections::BTreeMap;

use cpm_computable::{ComputableConfig, ComputableMemory, Dest, ExecMode};
use cpm_core::{CycleLedger, Result, Topology};
use serde::Serialize;

pub mod kernel;
pub mod lines;
pub mod local;
pub mod sort;
pub mod sum;
pub mod template;
pub mod threshold;

pub use kernel::{Kernel1D, Kernel2D, LocalPlan};
pub use lines::{
    build_slope_set, detect_all_lines, detect_line_segment, messenger_path, with_sign_variants,
    LineMap, PathCell,
};
pub use local::{run_local_op_1d, run_local_op_2d};
pub use sort::{
    hybrid_sort, Defect, DefectKind, GlobalMoveStats, SortArray, SortOrder, SortOutcome,
};
pub use sum::{global_limit, sum_1d, sum_2d, Limit, LimitResult};
pub use template::{template_search_1d, template_search_2d, TemplateMatch1D, TemplateMatch2D};
pub use threshold::{threshold, ThresholdResult};

/// Word width and execution mode for the memories an algorithm allocates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgoConfig {
    pub width: u8,
    pub mode: ExecMode,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        AlgoConfig {
            width: 32,
            mode: ExecMode::Word,
        }
    }
}

impl AlgoConfig {
    pub(crate) fn memory(&self, topology: Topology, data_regs: u8) -> Result<ComputableMemory> {
        ComputableMemory::new(
            topology,
            ComputableConfig {
                width: self.width,
                data_regs,
                fill: 0,
                mode: self.mode,
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmReport<T> {
    pub result: T,
    pub params: BTreeMap<String, i64>,
    /// Cycles spent after the input was loaded.
    pub ledger: CycleLedger,
}

impl<T> AlgorithmReport<T> {
    pub(crate) fn new(result: T, params: &[(&str, i64)], ledger: CycleLedger) -> Self {
        AlgorithmReport {
            result,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            ledger,
        }
    }
}

/// Loads `values` into the neighboring register from address 0.
pub(crate) fn load_nb(mem: &mut ComputableMemory, values: &[u64]) -> Result<()> {
    mem.load_register(Dest::Neighbor, values)
}

/// Two's complement reading of a `width`-bit word.
pub fn signed(v: u64, width: u8) -> i64 {
    if width == 64 {
        return v as i64;
    }
    let shift = 64 - width as u32;
    ((v << shift) as i64) >> shift
}
