// SPDX-License-Identifier: Apache-2.0

//! Content computable memory.
//!
//! Each PE holds `k` data registers, a neighboring register readable by
//! adjacent PEs, an operation register, and the M, S and C flag bits, all
//! driven through a one-bit ALU. Word-level operations are expanded into
//! bit-serial micro programs; the memory can either run those programs or
//! evaluate the word result directly, with identical cycle accounting.

mod alu;
mod macros;
mod memory;
mod micro;

pub use alu::alu_eval;
pub use macros::{expand, CmpOp, Dest, MacroOp, Operand};
pub use memory::{ComputableConfig, ComputableMemory, ExecMode, PeState, MAX_DATA_REGS};
pub use micro::{micro_eval, BitState, Cond, MicroInstruction, RegSel, Writeback};
