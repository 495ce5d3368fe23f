// SPDX-License-Identifier: Apache-2.0

//! Prints the micro steps of `op += d0` at a 2-bit word width.

use cpm_computable::{ComputableConfig, ComputableMemory, Dest, MacroOp, Operand};

fn main() {
    let cfg = ComputableConfig {
        width: 2,
        ..Default::default()
    };
    let mut mem = ComputableMemory::line(1, cfg).expect("one PE");
    let add = MacroOp::Add {
        src: Operand::Data(0),
        dst: Dest::Op,
    };
    print!("{}", mem.trace(&add).expect("valid macro"));
}
