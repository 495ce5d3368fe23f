// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;
use std::ops::{Add, Sub};

/// Instruction-cycle counters.
///
/// `macro_cycles` counts every word-level concurrent step, activations
/// included; `activations` is the subset spent on the general decoder, so
/// schedules can be quoted with or without them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct CycleLedger {
    pub macro_cycles: u64,
    pub micro_cycles: u64,
    pub exclusive_ops: u64,
    pub activations: u64,
}

impl CycleLedger {
    /// Macro cycles spent on broadcasts, match enumeration and counting.
    pub fn broadcast_cycles(&self) -> u64 {
        self.macro_cycles - self.activations
    }
}

impl Add for CycleLedger {
    type Output = CycleLedger;
    fn add(self, o: CycleLedger) -> CycleLedger {
        CycleLedger {
            macro_cycles: self.macro_cycles + o.macro_cycles,
            micro_cycles: self.micro_cycles + o.micro_cycles,
            exclusive_ops: self.exclusive_ops + o.exclusive_ops,
            activations: self.activations + o.activations,
        }
    }
}

impl Sub for CycleLedger {
    type Output = CycleLedger;
    /// Difference of two snapshots of the same monotone ledger.
    fn sub(self, o: CycleLedger) -> CycleLedger {
        CycleLedger {
            macro_cycles: self.macro_cycles - o.macro_cycles,
            micro_cycles: self.micro_cycles - o.micro_cycles,
            exclusive_ops: self.exclusive_ops - o.exclusive_ops,
            activations: self.activations - o.activations,
        }
    }
}
