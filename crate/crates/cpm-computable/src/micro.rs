// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use cpm_core::Direction;

/// Register addressed by the `reg` field of a micro instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegSel {
    Data(u8),
    Neighbor,
    /// The neighboring register of an adjacent PE. Read only.
    Adj(Direction),
}

impl RegSel {
    pub fn writable(self) -> bool {
        !matches!(self, RegSel::Adj(_))
    }
}

impl fmt::Display for RegSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegSel::Data(i) => write!(f, "d{i}"),
            RegSel::Neighbor => write!(f, "nb"),
            RegSel::Adj(Direction::Left) => write!(f, "nb<L>"),
            RegSel::Adj(Direction::Right) => write!(f, "nb<R>"),
            RegSel::Adj(Direction::Top) => write!(f, "nb<T>"),
            RegSel::Adj(Direction::Bottom) => write!(f, "nb<B>"),
        }
    }
}

/// Condition multiplexer source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cond {
    OpBit,
    RegBit,
    S,
    C,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Writeback(pub(crate) u8);

impl Writeback {
    pub const NONE: Writeback = Writeback(0);
    pub const SAVE_M: Writeback = Writeback(1);
    pub const M_TO_S: Writeback = Writeback(2);
    pub const M_TO_C: Writeback = Writeback(4);
    pub const M_TO_OP: Writeback = Writeback(8);
    pub const OP_TO_REG: Writeback = Writeback(16);

    pub fn contains(self, other: Writeback) -> bool {
        self.0 & other.0 == other.0
    }

    pub const fn bits(self) -> u8 {
        self.0
    }
}

impl std::ops::BitOr for Writeback {
    type Output = Writeback;
    fn bitor(self, rhs: Writeback) -> Writeback {
        Writeback(self.0 | rhs.0)
    }
}

/// One bit-serial broadcast step.
///
/// Every active PE selects `V` from `cond`, inverts it when `negate` is set,
/// and computes `B = alu_eval(M', compare, V, datum)` where `M'` is the match
/// bit, or zero when `clear_m` is set. Then, reading only pre-step values:
/// `SAVE_M` stores `B` into M (otherwise M becomes `M'`); `M_TO_S`, `M_TO_C`
/// and `M_TO_OP` copy `M'` into S, C or `op[op_bit]` where `B` is high;
/// `OP_TO_REG` copies `op[op_bit]` into `reg[reg_bit]` where `B` is high.
/// The match line latches `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MicroInstruction {
    pub clear_m: bool,
    pub cond: Cond,
    pub negate: bool,
    pub compare: bool,
    pub datum: bool,
    pub op_bit: u8,
    pub reg: RegSel,
    pub reg_bit: u8,
    pub writeback: Writeback,
}

impl MicroInstruction {
    pub fn new(cond: Cond, writeback: Writeback) -> MicroInstruction {
        MicroInstruction {
            clear_m: false,
            cond,
            negate: false,
            compare: false,
            datum: false,
            op_bit: 0,
            reg: RegSel::Data(0),
            reg_bit: 0,
            writeback,
        }
    }
}

impl fmt::Display for MicroInstruction {
    /// `[clr] [!]<source> C=<c> D=<d> wb=<list>`, where the source is `op[i]`,
    /// `<reg>[i]`, `S` or `C`, and writebacks are listed as `M`, `S`, `C`,
    /// `op[i]` and `<reg>[i]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clear_m {
            write!(f, "clr ")?;
        }
        if self.negate {
            write!(f, "!")?;
        }
        match self.cond {
            Cond::OpBit => write!(f, "op[{}]", self.op_bit)?,
            Cond::RegBit => write!(f, "{}[{}]", self.reg, self.reg_bit)?,
            Cond::S => write!(f, "S")?,
            Cond::C => write!(f, "C")?,
        }
        write!(f, " C={} D={} wb=", self.compare as u8, self.datum as u8)?;
        let wb = self.writeback;
        let mut parts = Vec::new();
        if wb.contains(Writeback::SAVE_M) {
            parts.push("M".to_string());
        }
        if wb.contains(Writeback::M_TO_S) {
            parts.push("S".to_string());
        }
        if wb.contains(Writeback::M_TO_C) {
            parts.push("C".to_string());
        }
        if wb.contains(Writeback::M_TO_OP) {
            parts.push(format!("op[{}]", self.op_bit));
        }
        if wb.contains(Writeback::OP_TO_REG) {
            parts.push(format!("{}[{}]", self.reg, self.reg_bit));
        }
        if parts.is_empty() {
            write!(f, "-")
        } else {
            write!(f, "{}", parts.join(","))
        }
    }
}

/// Bits one PE sees and may change in a micro step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BitState {
    pub m: bool,
    pub s: bool,
    pub c: bool,
    pub op: bool,
    /// Value of `reg[reg_bit]` as read; for an adjacent register this is the
    /// neighbor's bit.
    pub reg: bool,
}

/// Applies one micro instruction to one PE's bits. Returns the new bits and
/// `B`. `reg` in the result is meaningful only when the register is writable.
#[inline]
pub fn micro_eval(i: &MicroInstruction, st: BitState) -> (BitState, bool) {
    let v = match i.cond {
        Cond::OpBit => st.op,
        Cond::RegBit => st.reg,
        Cond::S => st.s,
        Cond::C => st.c,
    } ^ i.negate;
    let mp = !i.clear_m && st.m;
    let b = crate::alu::alu_eval(mp, i.compare, v, i.datum);
    let wb = i.writeback;
    let gate = |on: Writeback, x: bool| if wb.contains(on) && b { mp } else { x };
    let next = BitState {
        m: if wb.contains(Writeback::SAVE_M) {
            b
        } else {
            mp
        },
        s: gate(Writeback::M_TO_S, st.s),
        c: gate(Writeback::M_TO_C, st.c),
        op: gate(Writeback::M_TO_OP, st.op),
        reg: if wb.contains(Writeback::OP_TO_REG) && b {
            st.op
        } else {
            st.reg
        },
    };
    (next, b)
}
