// SPDX-License-Identifier: Apache-2.0

//! Word-level operations and their bit-serial expansions.
//!
//! Per-bit kernels are short micro programs over five bits: the op bit `A`,
//! the operand bit `B` (or a writable register bit `R`), and the M, S and C
//! flags. Each was found by exhaustive search and is checked below against
//! every initial flag state, so no kernel depends on what a previous
//! operation left in M, S or C.

use cpm_core::{CpmError, Direction, Result};

use crate::micro::{Cond, MicroInstruction, RegSel, Writeback};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operand {
    Op,
    Neighbor,
    Data(u8),
    Adj(Direction),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dest {
    Op,
    Neighbor,
    Data(u8),
}

impl From<Dest> for Operand {
    fn from(d: Dest) -> Operand {
        match d {
            Dest::Op => Operand::Op,
            Dest::Neighbor => Operand::Neighbor,
            Dest::Data(i) => Operand::Data(i),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [
        CmpOp::Lt,
        CmpOp::Gt,
        CmpOp::Le,
        CmpOp::Ge,
        CmpOp::Eq,
        CmpOp::Ne,
    ];

    pub fn eval(self, a: u64, b: u64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Gt => a > b,
            CmpOp::Le => a <= b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }

    /// The predicate with its operands swapped.
    pub fn mirrored(self) -> CmpOp {
        match self {
            CmpOp::Lt => CmpOp::Gt,
            CmpOp::Gt => CmpOp::Lt,
            CmpOp::Le => CmpOp::Ge,
            CmpOp::Ge => CmpOp::Le,
            c => c,
        }
    }
}

/// Word-level instruction. Unless noted, the result goes to `op` and
/// comparisons are unsigned. Flag-producing operations leave the flag in S
/// and on the match lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MacroOp {
    Copy {
        src: Operand,
        dst: Dest,
    },
    /// Swap `op` with a register.
    Exchange {
        reg: Dest,
    },
    /// `dst += src`, wrapping.
    Add {
        src: Operand,
        dst: Dest,
    },
    /// `dst -= src`, wrapping.
    Sub {
        src: Operand,
        dst: Dest,
    },
    AbsDiff {
        src: Operand,
    },
    /// Flag `op <cmp> src`.
    Compare {
        src: Operand,
        cmp: CmpOp,
    },
    /// Flag `src <cmp> value`; `op` is preserved.
    Threshold {
        src: Operand,
        value: u64,
        cmp: CmpOp,
    },
    /// `op = S ? src : op`.
    SelectIf {
        src: Operand,
    },
    LoadImmediate {
        value: u64,
        dst: Dest,
    },
    /// `op = S ? value : op`.
    LoadImmediateIf {
        value: u64,
    },
    AddImm {
        value: u64,
    },
    MinImm {
        value: u64,
    },
    MaxImm {
        value: u64,
    },
    /// `dst = min(dst, src)`.
    Min {
        src: Operand,
        dst: Dest,
    },
    /// `dst = max(dst, src)`.
    Max {
        src: Operand,
        dst: Dest,
    },
    /// Absolute value of `op` read as two's complement.
    AbsSigned,
    /// `dst = S as word`.
    FlagToWord {
        dst: Dest,
    },
    /// `op *= src`, wrapping, with `temp` receiving the original `op`.
    Mul {
        src: Operand,
        temp: u8,
    },
}

impl MacroOp {
    /// Whether S holds a defined value after this operation, assuming it did
    /// before.
    pub fn preserves_s(&self) -> bool {
        matches!(
            self,
            MacroOp::Copy { .. }
                | MacroOp::Exchange { .. }
                | MacroOp::SelectIf { .. }
                | MacroOp::LoadImmediate { .. }
                | MacroOp::LoadImmediateIf { .. }
                | MacroOp::FlagToWord { .. }
        )
    }

    pub fn sets_flag(&self) -> bool {
        matches!(self, MacroOp::Compare { .. } | MacroOp::Threshold { .. })
    }

    /// Whether any operand is an adjacent PE's neighboring register.
    pub fn reads_adjacent(&self) -> bool {
        operands(self).iter().any(|o| matches!(o, Operand::Adj(_)))
    }
}

#[derive(Clone, Copy)]
enum Src {
    A,
    B,
    S,
    C,
}

const SAVE: Writeback = Writeback::SAVE_M;
const TO_S: Writeback = Writeback::M_TO_S;
const TO_C: Writeback = Writeback::M_TO_C;
const TO_OP: Writeback = Writeback::M_TO_OP;
const TO_REG: Writeback = Writeback::OP_TO_REG;

type Step = (bool, Src, bool, Writeback);

/// A := a^b^c, C := maj(a,b,c).
const ADD: [Step; 9] = [
    (true, Src::S, false, TO_S),
    (true, Src::A, true, SAVE),
    (false, Src::C, true, Writeback(TO_S.bits() | TO_OP.bits())),
    (true, Src::A, true, SAVE),
    (false, Src::C, true, Writeback(TO_S.bits() | TO_C.bits())),
    (true, Src::S, false, TO_OP),
    (false, Src::B, false, TO_S),
    (false, Src::S, false, Writeback(SAVE.bits() | TO_C.bits())),
    (false, Src::B, true, TO_OP),
];

/// C := maj(!a,b,c); A unchanged.
const LT: [Step; 6] = [
    (true, Src::A, false, SAVE),
    (false, Src::A, true, TO_S),
    (true, Src::B, true, SAVE),
    (false, Src::C, false, TO_S),
    (true, Src::S, true, SAVE),
    (false, Src::A, false, TO_C),
];

/// S |= a^b; A unchanged.
const NE: [Step; 7] = [
    (true, Src::C, false, TO_C),
    (true, Src::A, true, SAVE),
    (false, Src::B, true, Writeback(TO_C.bits() | TO_OP.bits())),
    (true, Src::A, true, SAVE),
    (false, Src::B, true, Writeback(TO_C.bits() | TO_OP.bits())),
    (false, Src::C, false, Writeback(SAVE.bits() | TO_OP.bits())),
    (false, Src::S, true, TO_S),
];

/// A := S ? b : a; S unchanged.
const SELECT: [Step; 5] = [
    (true, Src::A, false, TO_C),
    (false, Src::S, false, SAVE),
    (false, Src::A, true, Writeback(TO_C.bits() | TO_OP.bits())),
    (true, Src::B, false, TO_C),
    (false, Src::C, false, TO_OP),
];

/// A := a^c, C := a&c.
const INC: [Step; 5] = [
    (true, Src::A, false, SAVE),
    (false, Src::C, false, Writeback(SAVE.bits() | TO_S.bits())),
    (false, Src::A, false, TO_OP),
    (true, Src::S, true, TO_C),
    (false, Src::C, false, TO_OP),
];

/// A := a^S; S unchanged.
const XORS: [Step; 5] = [
    (true, Src::C, false, TO_C),
    (true, Src::A, true, SAVE),
    (false, Src::S, false, Writeback(TO_C.bits() | TO_OP.bits())),
    (true, Src::S, false, TO_C),
    (false, Src::C, false, TO_OP),
];

/// A <-> R; S and C unchanged.
const XCHG: [Step; 2] = [
    (true, Src::B, false, SAVE),
    (
        false,
        Src::A,
        false,
        Writeback(TO_OP.bits() | TO_REG.bits()),
    ),
];

/// Accumulates a micro program for one word width.
pub(crate) struct Program {
    w: u8,
    scratch: u8,
    pub(crate) steps: Vec<MicroInstruction>,
}

impl Program {
    fn new(w: u8, scratch: u8) -> Program {
        Program {
            w,
            scratch,
            steps: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn emit(
        &mut self,
        clear_m: bool,
        cond: Cond,
        negate: bool,
        wb: Writeback,
        op_bit: u8,
        reg: RegSel,
        reg_bit: u8,
    ) {
        self.steps.push(MicroInstruction {
            clear_m,
            cond,
            negate,
            compare: false,
            datum: false,
            op_bit,
            reg,
            reg_bit,
            writeback: wb,
        });
    }

    fn flag(&mut self, clear_m: bool, cond: Cond, negate: bool, wb: Writeback) {
        self.emit(clear_m, cond, negate, wb, 0, RegSel::Data(0), 0);
    }

    #[allow(clippy::too_many_arguments)]
    fn kernel(&mut self, k: &[Step], i: u8, reg: RegSel, j: u8, flip_a: bool, flip_b: bool) {
        for &(clear_m, src, neg, wb) in k {
            let (cond, neg) = match src {
                Src::A => (Cond::OpBit, neg ^ flip_a),
                Src::B => (Cond::RegBit, neg ^ flip_b),
                Src::S => (Cond::S, neg),
                Src::C => (Cond::C, neg),
            };
            self.emit(clear_m, cond, neg, wb, i, reg, j);
        }
    }

    fn each_bit(&mut self, k: &[Step], reg: RegSel) {
        for i in 0..self.w {
            self.kernel(k, i, reg, i, false, false);
        }
    }

    fn clear_c(&mut self) {
        self.flag(true, Cond::C, false, TO_C);
    }

    fn clear_s(&mut self) {
        self.flag(true, Cond::S, false, TO_S);
    }

    fn m_one(&mut self) {
        self.flag(true, Cond::OpBit, false, SAVE);
        self.flag(false, Cond::OpBit, true, SAVE);
    }

    fn set_c(&mut self) {
        self.m_one();
        self.flag(false, Cond::OpBit, false, TO_C);
    }

    /// S := M := B := (source bit ^ negate). Drives the match line.
    fn flag_to_s(&mut self, cond: Cond, op_bit: u8, reg: RegSel, reg_bit: u8, negate: bool) {
        self.clear_s();
        self.emit(true, cond, negate, SAVE, op_bit, reg, reg_bit);
        self.flag(false, Cond::S, false, TO_S);
    }

    fn finish_from_c(&mut self, negate: bool) {
        self.flag_to_s(Cond::C, 0, RegSel::Data(0), 0, negate);
    }

    fn s_to_c(&mut self) {
        self.clear_c();
        self.flag(true, Cond::S, false, SAVE);
        self.flag(false, Cond::S, true, TO_C);
    }

    fn copy_to_op(&mut self, src: RegSel) {
        for i in 0..self.w {
            self.emit(true, Cond::RegBit, false, SAVE, i, src, i);
            self.emit(false, Cond::OpBit, false, TO_OP, i, src, i);
        }
    }

    fn store(&mut self, dst: RegSel) {
        self.m_one();
        for i in 0..self.w {
            self.emit(false, Cond::OpBit, false, TO_REG, i, dst, i);
        }
    }

    fn xchg(&mut self, reg: RegSel) {
        self.each_bit(&XCHG, reg);
    }

    fn load_imm(&mut self, value: u64) {
        let bit = |i: u8| value >> i & 1 == 1;
        for i in (0..self.w).filter(|&i| !bit(i)) {
            self.emit(true, Cond::OpBit, false, TO_OP, i, RegSel::Data(0), 0);
        }
        self.m_one();
        for i in (0..self.w).filter(|&i| bit(i)) {
            self.emit(false, Cond::OpBit, false, TO_OP, i, RegSel::Data(0), 0);
        }
    }

    fn load_imm_if(&mut self, value: u64) {
        let bit = |i: u8| value >> i & 1 == 1;
        self.flag(true, Cond::S, false, SAVE);
        for i in (0..self.w).filter(|&i| bit(i)) {
            self.emit(false, Cond::S, false, TO_OP, i, RegSel::Data(0), 0);
        }
        for i in (0..self.w).filter(|&i| !bit(i)) {
            self.emit(true, Cond::S, false, TO_OP, i, RegSel::Data(0), 0);
        }
    }

    fn materialize(&mut self, value: u64) -> RegSel {
        let scr = RegSel::Data(self.scratch);
        self.xchg(scr);
        self.load_imm(value);
        self.xchg(scr);
        scr
    }

    fn add_core(&mut self, src: RegSel, sub: bool) {
        if sub {
            self.set_c();
        } else {
            self.clear_c();
        }
        for i in 0..self.w {
            self.kernel(&ADD, i, src, i, false, sub);
        }
    }

    /// Leaves `op <cmp> src` in C, or its complement when the returned flag
    /// is set.
    fn compare_core(&mut self, src: RegSel, cmp: CmpOp) -> bool {
        match cmp {
            CmpOp::Lt | CmpOp::Ge | CmpOp::Gt | CmpOp::Le => {
                let gt = matches!(cmp, CmpOp::Gt | CmpOp::Le);
                self.clear_c();
                for i in 0..self.w {
                    self.kernel(&LT, i, src, i, gt, gt);
                }
                matches!(cmp, CmpOp::Ge | CmpOp::Le)
            }
            CmpOp::Ne | CmpOp::Eq => {
                self.clear_s();
                self.each_bit(&NE, src);
                self.s_to_c();
                cmp == CmpOp::Eq
            }
        }
    }

    fn select(&mut self, src: RegSel) {
        self.each_bit(&SELECT, src);
    }

    /// `op := |op|` given S = sign: conditional one's complement, then +S.
    fn negate_if_s(&mut self) {
        self.each_bit(&XORS, RegSel::Data(0));
        self.s_to_c();
        self.each_bit(&INC, RegSel::Data(0));
    }

    fn min_max(&mut self, src: RegSel, max: bool) {
        self.clear_c();
        for i in 0..self.w {
            self.kernel(&LT, i, src, i, !max, !max);
        }
        self.finish_from_c(false);
        self.select(src);
    }

    fn flag_to_word_op(&mut self) {
        for i in 1..self.w {
            self.emit(true, Cond::OpBit, false, TO_OP, i, RegSel::Data(0), 0);
        }
        self.flag(true, Cond::S, false, SAVE);
        self.flag(false, Cond::S, true, TO_OP);
    }

    /// Runs `body` on `op` loaded from `dst`, then stores back, keeping the
    /// caller's `op` in scratch meanwhile.
    fn via_op(&mut self, dst: RegSel, body: impl FnOnce(&mut Program)) {
        let scr = RegSel::Data(self.scratch);
        self.xchg(scr);
        self.copy_to_op(dst);
        body(self);
        self.store(dst);
        self.xchg(scr);
    }
}

/// Expands a macro for word width `w` on PEs with `k` data registers; the
/// last data register is reserved as scratch.
pub fn expand(op: &MacroOp, w: u8, k: u8) -> Result<Vec<MicroInstruction>> {
    if !(1..=64).contains(&w) {
        return Err(CpmError::Config(format!("word width {w} outside 1..=64")));
    }
    if k < 2 {
        return Err(CpmError::Config(
            "at least two data registers are required".into(),
        ));
    }
    let scratch = k - 1;
    let bad = |what: &str| Err(CpmError::Instruction(format!("{op:?}: {what}")));
    let data_ok = |i: u8| i < scratch;
    let operand = |o: Operand| -> Option<RegSel> {
        match o {
            Operand::Op => None,
            Operand::Neighbor => Some(RegSel::Neighbor),
            Operand::Data(i) if data_ok(i) => Some(RegSel::Data(i)),
            Operand::Data(_) => None,
            Operand::Adj(d) => Some(RegSel::Adj(d)),
        }
    };
    let dest = |d: Dest| -> Option<RegSel> {
        match d {
            Dest::Op => None,
            Dest::Neighbor => Some(RegSel::Neighbor),
            Dest::Data(i) if data_ok(i) => Some(RegSel::Data(i)),
            Dest::Data(_) => None,
        }
    };
    for o in operands(op) {
        if let Operand::Data(i) = o {
            if !data_ok(i) {
                return bad("data register out of range or reserved");
            }
        }
    }
    let mut p = Program::new(w, scratch);
    match *op {
        MacroOp::Copy { src, dst } => match (operand(src), dest(dst)) {
            (None, None) => {}
            (Some(s), None) => p.copy_to_op(s),
            (None, Some(d)) => p.store(d),
            (Some(s), Some(d)) => {
                let scr = RegSel::Data(scratch);
                p.xchg(scr);
                p.copy_to_op(s);
                p.store(d);
                p.xchg(scr);
            }
        },
        MacroOp::Exchange { reg } => match dest(reg) {
            Some(r) => p.xchg(r),
            None => return bad("exchange needs a register other than op"),
        },
        MacroOp::Add { src, dst } | MacroOp::Sub { src, dst } => {
            let sub = matches!(op, MacroOp::Sub { .. });
            let Some(s) = operand(src) else {
                return bad("source must not be op");
            };
            match dest(dst) {
                None => p.add_core(s, sub),
                Some(d) => p.via_op(d, |p| p.add_core(s, sub)),
            }
        }
        MacroOp::AbsDiff { src } => {
            let Some(s) = operand(src) else {
                return bad("source must not be op");
            };
            p.add_core(s, true);
            p.finish_from_c(true);
            p.negate_if_s();
        }
        MacroOp::Compare { src, cmp } => {
            let Some(s) = operand(src) else {
                return bad("source must not be op");
            };
            let neg = p.compare_core(s, cmp);
            p.finish_from_c(neg);
        }
        MacroOp::Threshold { src, value, cmp } => {
            let scr = RegSel::Data(scratch);
            let s = operand(src).unwrap_or(scr);
            p.xchg(scr);
            p.load_imm(value);
            let neg = p.compare_core(s, cmp.mirrored());
            p.xchg(scr);
            p.finish_from_c(neg);
        }
        MacroOp::SelectIf { src } => {
            let Some(s) = operand(src) else {
                return bad("source must not be op");
            };
            p.select(s);
        }
        MacroOp::LoadImmediate { value, dst } => match dest(dst) {
            None => p.load_imm(value),
            Some(d) => {
                p.xchg(d);
                p.load_imm(value);
                p.xchg(d);
            }
        },
        MacroOp::LoadImmediateIf { value } => p.load_imm_if(value),
        MacroOp::AddImm { value } => {
            let s = p.materialize(value);
            p.add_core(s, false);
        }
        MacroOp::MinImm { value } | MacroOp::MaxImm { value } => {
            let s = p.materialize(value);
            p.min_max(s, matches!(op, MacroOp::MaxImm { .. }));
        }
        MacroOp::Min { src, dst } | MacroOp::Max { src, dst } => {
            let Some(s) = operand(src) else {
                return bad("source must not be op");
            };
            let max = matches!(op, MacroOp::Max { .. });
            match dest(dst) {
                None => p.min_max(s, max),
                Some(d) => p.via_op(d, |p| p.min_max(s, max)),
            }
        }
        MacroOp::AbsSigned => {
            p.flag_to_s(Cond::OpBit, w - 1, RegSel::Data(0), 0, false);
            p.negate_if_s();
        }
        MacroOp::FlagToWord { dst } => match dest(dst) {
            None => p.flag_to_word_op(),
            Some(d) => {
                p.xchg(d);
                p.flag_to_word_op();
                p.xchg(d);
            }
        },
        MacroOp::Mul { src, temp } => {
            let Some(s) = operand(src) else {
                return bad("source must not be op");
            };
            if !data_ok(temp) || src == Operand::Data(temp) {
                return bad("temp must be a free data register distinct from the source");
            }
            let t = RegSel::Data(temp);
            let scr = RegSel::Data(scratch);
            p.store(t);
            p.load_imm(0);
            for i in 0..w {
                p.store(scr);
                p.clear_c();
                for j in i..w {
                    p.kernel(&ADD, j, t, j - i, false, false);
                }
                p.flag_to_s(Cond::RegBit, 0, s, i, true);
                p.select(scr);
            }
        }
    }
    Ok(p.steps)
}

fn operands(op: &MacroOp) -> Vec<Operand> {
    match *op {
        MacroOp::Copy { src, dst }
        | MacroOp::Add { src, dst }
        | MacroOp::Sub { src, dst }
        | MacroOp::Min { src, dst }
        | MacroOp::Max { src, dst } => vec![src, dst.into()],
        MacroOp::Exchange { reg } => vec![reg.into()],
        MacroOp::LoadImmediate { dst, .. } | MacroOp::FlagToWord { dst } => vec![dst.into()],
        MacroOp::AbsDiff { src }
        | MacroOp::Compare { src, .. }
        | MacroOp::Threshold { src, .. }
        | MacroOp::SelectIf { src }
        | MacroOp::Mul { src, .. } => vec![src],
        _ => vec![],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::micro::{micro_eval, BitState};

    /// Runs a kernel on one PE's bits; `b` is the operand bit, written back
    /// only through `OP_TO_REG`.
    fn run(k: &[Step], st: BitState, flip_a: bool, flip_b: bool) -> BitState {
        let mut p = Program::new(1, 1);
        p.kernel(k, 0, RegSel::Data(0), 0, flip_a, flip_b);
        p.steps.iter().fold(st, |s, i| micro_eval(i, s).0)
    }

    fn all_states() -> impl Iterator<Item = BitState> {
        (0..32u8).map(|x| BitState {
            m: x & 1 != 0,
            s: x & 2 != 0,
            c: x & 4 != 0,
            op: x & 8 != 0,
            reg: x & 16 != 0,
        })
    }

    fn maj(a: bool, b: bool, c: bool) -> bool {
        (a && b) || (a && c) || (b && c)
    }

    #[test]
    fn kernels_hold_from_any_flag_state() {
        for st in all_states() {
            let (a, b, c, s) = (st.op, st.reg, st.c, st.s);
            let r = run(&ADD, st, false, false);
            assert_eq!((r.op, r.c), (a ^ b ^ c, maj(a, b, c)), "add {st:?}");
            let r = run(&ADD, st, false, true);
            assert_eq!((r.op, r.c), (a ^ !b ^ c, maj(a, !b, c)), "sub {st:?}");
            let r = run(&LT, st, false, false);
            assert_eq!((r.op, r.c), (a, maj(!a, b, c)), "lt {st:?}");
            let r = run(&LT, st, true, true);
            assert_eq!((r.op, r.c), (a, maj(a, !b, c)), "gt {st:?}");
            let r = run(&NE, st, false, false);
            assert_eq!((r.op, r.s), (a, s || a != b), "ne {st:?}");
            let r = run(&SELECT, st, false, false);
            assert_eq!((r.op, r.s), (if s { b } else { a }, s), "select {st:?}");
            let r = run(&INC, st, false, false);
            assert_eq!((r.op, r.c), (a ^ c, a && c), "inc {st:?}");
            let r = run(&XORS, st, false, false);
            assert_eq!((r.op, r.s), (a ^ s, s), "xors {st:?}");
            let r = run(&XCHG, st, false, false);
            assert_eq!((r.op, r.reg, r.s, r.c), (b, a, s, c), "xchg {st:?}");
        }
    }

    #[test]
    fn expansion_lengths_are_linear_in_width() {
        for w in [8u8, 16, 32] {
            let wl = w as usize;
            let len = |op: MacroOp| expand(&op, w, 4).unwrap().len();
            let add = MacroOp::Add {
                src: Operand::Data(0),
                dst: Dest::Op,
            };
            assert_eq!(len(add), 9 * wl + 1);
            assert_eq!(
                len(MacroOp::Copy {
                    src: Operand::Adj(Direction::Left),
                    dst: Dest::Op
                }),
                2 * wl
            );
            assert_eq!(
                len(MacroOp::LoadImmediate {
                    value: 5,
                    dst: Dest::Op
                }),
                wl + 2
            );
            for cmp in CmpOp::ALL {
                let n = len(MacroOp::Compare {
                    src: Operand::Data(0),
                    cmp,
                });
                assert!(n <= 7 * wl + 10, "{cmp:?} {n}");
            }
        }
    }

    #[test]
    fn rejects_malformed_operands() {
        let scratch = MacroOp::Add {
            src: Operand::Data(3),
            dst: Dest::Op,
        };
        assert!(matches!(
            expand(&scratch, 8, 4),
            Err(CpmError::Instruction(_))
        ));
        let from_op = MacroOp::Sub {
            src: Operand::Op,
            dst: Dest::Neighbor,
        };
        assert!(matches!(
            expand(&from_op, 8, 4),
            Err(CpmError::Instruction(_))
        ));
        let xop = MacroOp::Exchange { reg: Dest::Op };
        assert!(matches!(expand(&xop, 8, 4), Err(CpmError::Instruction(_))));
        let mul = MacroOp::Mul {
            src: Operand::Data(1),
            temp: 1,
        };
        assert!(matches!(expand(&mul, 8, 4), Err(CpmError::Instruction(_))));
        assert!(matches!(expand(&xop, 0, 4), Err(CpmError::Config(_))));
    }
}
