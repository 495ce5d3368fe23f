// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::sync::Arc;

use cpm_core::{
    Axis, BitVector, Controller, CpmError, CycleLedger, Direction, ElementAddress, MatchReport,
    Result, Topology,
};

use crate::macros::{expand, MacroOp, Operand};
use crate::micro::{micro_eval, BitState, MicroInstruction, RegSel, Writeback};
use crate::Dest;

pub const MAX_DATA_REGS: u8 = 8;

/// How macros are executed on the host. Both charge the same ledger and
/// leave registers in the same state.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ExecMode {
    /// Evaluate each macro as word arithmetic per PE.
    #[default]
    Word,
    /// Run every micro instruction of the expansion.
    BitSerial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComputableConfig {
    pub width: u8,
    /// Data registers per PE, the last of which is reserved as scratch.
    pub data_regs: u8,
    /// Value read from a neighboring register past the array edge.
    pub fill: u64,
    pub mode: ExecMode,
}

impl Default for ComputableConfig {
    fn default() -> Self {
        ComputableConfig {
            width: 32,
            data_regs: 4,
            fill: 0,
            mode: ExecMode::Word,
        }
    }
}

/// Host-side copy of one PE's registers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeState {
    pub data: Vec<u64>,
    pub nb: u64,
    pub op: u64,
    pub m: bool,
    pub s: bool,
    pub c: bool,
}

#[derive(Clone, Copy)]
struct Local {
    data: [u64; MAX_DATA_REGS as usize],
    nb: u64,
    op: u64,
    s: bool,
    matched: bool,
}

#[derive(Debug, Clone)]
pub struct ComputableMemory {
    ctl: Controller,
    cfg: ComputableConfig,
    wmask: u64,
    data: Vec<Vec<u64>>,
    nb: Vec<u64>,
    op: Vec<u64>,
    m: Vec<bool>,
    s: Vec<bool>,
    c: Vec<bool>,
    matched: Vec<bool>,
    edge: Vec<bool>,
    cache: HashMap<MacroOp, Arc<Vec<MicroInstruction>>>,
}

impl ComputableMemory {
    pub fn new(topology: Topology, cfg: ComputableConfig) -> Result<Self> {
        if !(1..=64).contains(&cfg.width) {
            return Err(CpmError::Config(format!(
                "word width {} outside 1..=64",
                cfg.width
            )));
        }
        if !(2..=MAX_DATA_REGS).contains(&cfg.data_regs) {
            return Err(CpmError::Config(format!(
                "{} data registers; 2..={MAX_DATA_REGS} supported",
                cfg.data_regs
            )));
        }
        let ctl = Controller::new(topology)?;
        let n = topology.len();
        let wmask = if cfg.width == 64 {
            u64::MAX
        } else {
            (1u64 << cfg.width) - 1
        };
        Ok(ComputableMemory {
            ctl,
            cfg: ComputableConfig {
                fill: cfg.fill & wmask,
                ..cfg
            },
            wmask,
            data: vec![vec![0; n]; cfg.data_regs as usize],
            nb: vec![0; n],
            op: vec![0; n],
            m: vec![false; n],
            s: vec![false; n],
            c: vec![false; n],
            matched: vec![false; n],
            edge: vec![false; n],
            cache: HashMap::new(),
        })
    }

    pub fn line(n: usize, cfg: ComputableConfig) -> Result<Self> {
        Self::new(Topology::line(n), cfg)
    }

    pub fn lattice(nx: usize, ny: usize, cfg: ComputableConfig) -> Result<Self> {
        Self::new(Topology::lattice(nx, ny), cfg)
    }

    pub fn len(&self) -> usize {
        self.op.len()
    }

    pub fn is_empty(&self) -> bool {
        self.op.is_empty()
    }

    pub fn topology(&self) -> Topology {
        self.ctl.topology()
    }

    pub fn config(&self) -> ComputableConfig {
        self.cfg
    }

    pub fn width(&self) -> u8 {
        self.cfg.width
    }

    pub fn word_mask(&self) -> u64 {
        self.wmask
    }

    pub fn scratch(&self) -> u8 {
        self.cfg.data_regs - 1
    }

    pub fn set_mode(&mut self, mode: ExecMode) {
        self.cfg.mode = mode;
    }

    pub fn set_fill(&mut self, fill: u64) {
        self.cfg.fill = fill & self.wmask;
    }

    pub fn ledger(&self) -> CycleLedger {
        self.ctl.ledger()
    }

    pub fn controller(&self) -> &Controller {
        &self.ctl
    }

    pub fn mask(&self) -> &BitVector {
        self.ctl.mask()
    }

    pub fn activate(&mut self, start: usize, end: usize, carry: usize) -> Result<()> {
        self.ctl.activate(start, end, carry).map(|_| ())
    }

    pub fn activate_2d(&mut self, x: Axis, y: Axis) -> Result<()> {
        self.ctl.activate_2d(x, y).map(|_| ())
    }

    pub fn activate_all(&mut self) -> Result<()> {
        self.ctl.activate_all().map(|_| ())
    }

    fn check_dest(&self, reg: Dest) -> Result<()> {
        match reg {
            Dest::Data(i) if i >= self.cfg.data_regs => Err(CpmError::Instruction(format!(
                "data register {i} does not exist"
            ))),
            _ => Ok(()),
        }
    }

    fn reg_ref(&self, reg: Dest) -> &Vec<u64> {
        match reg {
            Dest::Op => &self.op,
            Dest::Neighbor => &self.nb,
            Dest::Data(i) => &self.data[i as usize],
        }
    }

    fn reg_mut(&mut self, reg: Dest) -> &mut Vec<u64> {
        match reg {
            Dest::Op => &mut self.op,
            Dest::Neighbor => &mut self.nb,
            Dest::Data(i) => &mut self.data[i as usize],
        }
    }

    /// Exclusive read of one register. Costs one exclusive op.
    pub fn read_reg(&mut self, addr: usize, reg: Dest) -> Result<u64> {
        self.check_dest(reg)?;
        self.ctl.check_addr(addr)?;
        self.ctl.charge_exclusive();
        Ok(self.reg_ref(reg)[addr])
    }

    /// Exclusive write of one register. Costs one exclusive op.
    pub fn write_reg(&mut self, addr: usize, reg: Dest, value: u64) -> Result<()> {
        self.check_dest(reg)?;
        self.ctl.check_addr(addr)?;
        self.ctl.charge_exclusive();
        let v = value & self.wmask;
        self.reg_mut(reg)[addr] = v;
        Ok(())
    }

    /// Writes `values` into `reg` from address 0, one exclusive op each.
    pub fn load_register(&mut self, reg: Dest, values: &[u64]) -> Result<()> {
        if values.len() > self.len() {
            return Err(CpmError::Argument(format!(
                "{} values for {} PEs",
                values.len(),
                self.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            self.write_reg(i, reg, v)?;
        }
        Ok(())
    }

    /// Host-side view of a whole register, for oracles. Costs nothing.
    pub fn register(&self, reg: Dest) -> &[u64] {
        self.reg_ref(reg)
    }

    /// Host-side view of one PE, for oracles. Costs nothing.
    pub fn peek(&self, addr: usize) -> PeState {
        PeState {
            data: self.data.iter().map(|d| d[addr]).collect(),
            nb: self.nb[addr],
            op: self.op[addr],
            m: self.m[addr],
            s: self.s[addr],
            c: self.c[addr],
        }
    }

    pub fn s_bits(&self) -> &[bool] {
        &self.s
    }

    /// Whether the last step read a neighboring register past an edge.
    pub fn edge_flags(&self) -> &[bool] {
        &self.edge
    }

    pub fn match_lines(&self) -> BitVector {
        &BitVector::from_bools(&self.matched) & self.ctl.mask()
    }

    pub fn enumerate_matches(&mut self) -> MatchReport {
        let lines = self.match_lines();
        self.ctl.enumerate(&lines)
    }

    pub fn count_matches(&mut self) -> usize {
        let lines = self.match_lines();
        self.ctl.count(&lines)
    }

    pub fn first_match(&mut self) -> Option<ElementAddress> {
        let lines = self.match_lines();
        self.ctl.first(&lines)
    }

    /// The bit-serial program a macro expands to on this memory.
    pub fn expansion(&mut self, op: &MacroOp) -> Result<Arc<Vec<MicroInstruction>>> {
        if let Some(p) = self.cache.get(op) {
            return Ok(p.clone());
        }
        let p = Arc::new(expand(op, self.cfg.width, self.cfg.data_regs)?);
        if self.cache.len() >= 1024 {
            self.cache.clear();
        }
        self.cache.insert(*op, p.clone());
        Ok(p)
    }

    /// One line per micro step of the expansion.
    pub fn trace(&mut self, op: &MacroOp) -> Result<String> {
        let p = self.expansion(op)?;
        Ok(p.iter().map(|i| format!("{i}\n")).collect())
    }

    /// One word-level broadcast over the active PEs. Costs one macro cycle
    /// and the expansion length in micro cycles.
    pub fn run(&mut self, op: MacroOp) -> Result<()> {
        let prog = self.expansion(&op)?;
        self.ctl.charge_macro(1);
        self.ctl.charge_micro(prog.len() as u64);
        self.edge.iter_mut().for_each(|e| *e = false);
        match self.cfg.mode {
            ExecMode::Word => self.exec_word(&op),
            ExecMode::BitSerial => {
                for i in prog.iter() {
                    self.exec_micro(i);
                }
            }
        }
        Ok(())
    }

    pub fn run_all(&mut self, ops: &[MacroOp]) -> Result<()> {
        ops.iter().try_for_each(|op| self.run(*op))
    }

    /// A single micro instruction. Costs one micro cycle.
    pub fn micro_step(&mut self, i: &MicroInstruction) -> Result<()> {
        let w = self.cfg.width;
        if i.op_bit >= w || i.reg_bit >= w {
            return Err(CpmError::Instruction(format!("bit index beyond width {w}")));
        }
        if let RegSel::Data(d) = i.reg {
            if d >= self.cfg.data_regs {
                return Err(CpmError::Instruction(format!(
                    "data register {d} does not exist"
                )));
            }
        }
        if i.writeback.contains(Writeback::OP_TO_REG) && !i.reg.writable() {
            return Err(CpmError::Instruction(
                "an adjacent PE's register cannot be written".into(),
            ));
        }
        self.ctl.charge_micro(1);
        self.edge.iter_mut().for_each(|e| *e = false);
        self.exec_micro(i);
        Ok(())
    }

    /// Register value as PE `i` sees it, and whether the read fell past an
    /// edge.
    fn read_sel(&self, i: usize, reg: RegSel) -> (u64, bool) {
        match reg {
            RegSel::Data(d) => (self.data[d as usize][i], false),
            RegSel::Neighbor => (self.nb[i], false),
            RegSel::Adj(dir) => match self.ctl.topology().neighbor(i, dir) {
                Some(j) => (self.nb[j], false),
                None => (self.cfg.fill, true),
            },
        }
    }

    fn exec_micro(&mut self, ins: &MicroInstruction) {
        let active: Vec<usize> = self.ctl.mask().iter_ones().collect();
        let (ob, rb) = (ins.op_bit, ins.reg_bit);
        let staged: Vec<(usize, BitState, bool, bool)> = active
            .into_iter()
            .map(|i| {
                let (r, edge) = self.read_sel(i, ins.reg);
                let st = BitState {
                    m: self.m[i],
                    s: self.s[i],
                    c: self.c[i],
                    op: self.op[i] >> ob & 1 == 1,
                    reg: r >> rb & 1 == 1,
                };
                let (next, b) = micro_eval(ins, st);
                (i, next, b, edge)
            })
            .collect();
        self.matched.iter_mut().for_each(|x| *x = false);
        let write_reg = ins.writeback.contains(Writeback::OP_TO_REG);
        for (i, st, b, edge) in staged {
            self.edge[i] |= edge;
            self.m[i] = st.m;
            self.s[i] = st.s;
            self.c[i] = st.c;
            self.matched[i] = b;
            set_bit(&mut self.op[i], ob, st.op);
            if write_reg {
                match ins.reg {
                    RegSel::Data(d) => set_bit(&mut self.data[d as usize][i], rb, st.reg),
                    RegSel::Neighbor => set_bit(&mut self.nb[i], rb, st.reg),
                    RegSel::Adj(_) => unreachable!("validated by the expander"),
                }
            }
        }
    }

    fn exec_word(&mut self, op: &MacroOp) {
        let wm = self.wmask;
        let width = self.cfg.width;
        let fill = self.cfg.fill;
        let k = self.cfg.data_regs as usize;
        let topo = self.ctl.topology();
        let mask = self.ctl.mask().clone();
        // Each PE writes only its own registers, so a snapshot of the
        // neighboring registers is all the staging adjacent reads need.
        let nb_pre = op.reads_adjacent().then(|| self.nb.clone());
        let flag = op.sets_flag();
        self.matched.iter_mut().for_each(|x| *x = false);
        if self.exec_word_fast(op, &mask, nb_pre.as_deref()) {
            return;
        }
        for i in mask.iter_ones() {
            let mut edge = false;
            let mut l = Local {
                data: [0; MAX_DATA_REGS as usize],
                nb: self.nb[i],
                op: self.op[i],
                s: self.s[i],
                matched: false,
            };
            for d in 0..k {
                l.data[d] = self.data[d][i];
            }
            let mut rd = |o: Operand, l: &Local| match o {
                Operand::Op => l.op,
                Operand::Neighbor => l.nb,
                Operand::Data(d) => l.data[d as usize],
                Operand::Adj(dir) => match topo.neighbor(i, dir) {
                    Some(j) => nb_pre.as_ref().map_or(0, |nb| nb[j]),
                    None => {
                        edge = true;
                        fill
                    }
                },
            };
            word_eval(op, &mut l, &mut rd, wm, width);
            self.edge[i] = edge;
            for d in 0..k {
                self.data[d][i] = l.data[d];
            }
            self.nb[i] = l.nb;
            self.op[i] = l.op;
            if flag {
                self.s[i] = l.s;
                self.m[i] = l.s;
                self.matched[i] = l.matched;
            }
        }
    }
}

/// Where a single-source macro takes its second operand from.
#[derive(Clone, Copy)]
enum Fetch {
    Nothing,
    Reg(Dest),
    Adj(Direction),
}

impl Fetch {
    fn of(src: Option<Operand>) -> Fetch {
        match src {
            None => Fetch::Nothing,
            Some(Operand::Adj(d)) => Fetch::Adj(d),
            Some(Operand::Op) => Fetch::Reg(Dest::Op),
            Some(Operand::Neighbor) => Fetch::Reg(Dest::Neighbor),
            Some(Operand::Data(d)) => Fetch::Reg(Dest::Data(d)),
        }
    }
}

impl ComputableMemory {
    /// Register-at-a-time evaluation of the macros that write at most one
    /// register. Returns false for the rest.
    fn exec_word_fast(&mut self, op: &MacroOp, mask: &BitVector, nb: Option<&[u64]>) -> bool {
        use MacroOp as M;
        let wm = self.wmask;
        match *op {
            M::Copy { src, dst } => self.sweep(mask, nb, Some(src), dst, |_, b, _| b),
            M::Add { src, dst } => {
                self.sweep(mask, nb, Some(src), dst, |a, b, _| a.wrapping_add(b) & wm)
            }
            M::Sub { src, dst } => {
                self.sweep(mask, nb, Some(src), dst, |a, b, _| a.wrapping_sub(b) & wm)
            }
            M::Min { src, dst } => self.sweep(mask, nb, Some(src), dst, |a, b, _| a.min(b)),
            M::Max { src, dst } => self.sweep(mask, nb, Some(src), dst, |a, b, _| a.max(b)),
            M::AbsDiff { src } => {
                self.sweep(mask, nb, Some(src), Dest::Op, |a, b, _| a.abs_diff(b))
            }
            M::SelectIf { src } => self.sweep(
                mask,
                nb,
                Some(src),
                Dest::Op,
                |a, b, s| if s { b } else { a },
            ),
            M::LoadImmediate { value, dst } => {
                self.sweep(mask, nb, None, dst, |_, _, _| value & wm)
            }
            M::FlagToWord { dst } => self.sweep(mask, nb, None, dst, |_, _, s| s as u64),
            M::LoadImmediateIf { value } => {
                self.sweep(
                    mask,
                    nb,
                    None,
                    Dest::Op,
                    |a, _, s| if s { value & wm } else { a },
                )
            }
            M::AddImm { value } => self.sweep(mask, nb, None, Dest::Op, |a, _, _| {
                a.wrapping_add(value) & wm
            }),
            M::MinImm { value } => {
                self.sweep(mask, nb, None, Dest::Op, |a, _, _| a.min(value & wm))
            }
            M::MaxImm { value } => {
                self.sweep(mask, nb, None, Dest::Op, |a, _, _| a.max(value & wm))
            }
            M::Compare { src, cmp } => self.flag_sweep(mask, nb, src, |a, b| cmp.eval(a, b)),
            M::Threshold { src, value, cmp } => {
                self.flag_sweep(mask, nb, src, |_, b| cmp.eval(b, value & wm))
            }
            _ => return false,
        }
        true
    }

    /// `dst := f(dst, src, s)` on every active PE.
    fn sweep(
        &mut self,
        mask: &BitVector,
        nb: Option<&[u64]>,
        src: Option<Operand>,
        dst: Dest,
        f: impl Fn(u64, u64, bool) -> u64,
    ) {
        let mut out = std::mem::take(self.reg_mut(dst));
        let mut edge = std::mem::take(&mut self.edge);
        let fetch = Fetch::of(src);
        let same = matches!(fetch, Fetch::Reg(r) if r == dst);
        let (topo, fill) = (self.ctl.topology(), self.cfg.fill);
        let sv: &[u64] = match fetch {
            Fetch::Reg(r) if !same => self.reg_ref(r),
            _ => &[],
        };
        for i in mask.iter_ones() {
            let b = match fetch {
                Fetch::Nothing => 0,
                Fetch::Reg(_) if same => out[i],
                Fetch::Reg(_) => sv[i],
                Fetch::Adj(dir) => match topo.neighbor(i, dir) {
                    Some(j) => nb.map_or(0, |nb| nb[j]),
                    None => {
                        edge[i] = true;
                        fill
                    }
                },
            };
            out[i] = f(out[i], b, self.s[i]);
        }
        *self.reg_mut(dst) = out;
        self.edge = edge;
    }

    /// Sets S, M and the match line from `g(op, src)` on every active PE.
    fn flag_sweep(
        &mut self,
        mask: &BitVector,
        nb: Option<&[u64]>,
        src: Operand,
        g: impl Fn(u64, u64) -> bool,
    ) {
        let (topo, fill) = (self.ctl.topology(), self.cfg.fill);
        let mut edge = std::mem::take(&mut self.edge);
        let mut flags = std::mem::take(&mut self.s);
        let sv: &[u64] = match Fetch::of(Some(src)) {
            Fetch::Reg(r) => self.reg_ref(r),
            _ => &[],
        };
        for i in mask.iter_ones() {
            let b = match src {
                Operand::Adj(dir) => match topo.neighbor(i, dir) {
                    Some(j) => nb.map_or(0, |nb| nb[j]),
                    None => {
                        edge[i] = true;
                        fill
                    }
                },
                _ => sv[i],
            };
            let v = g(self.op[i], b);
            flags[i] = v;
        }
        for i in mask.iter_ones() {
            self.m[i] = flags[i];
            self.matched[i] = flags[i];
        }
        self.edge = edge;
        self.s = flags;
    }
}

#[inline]
fn set_bit(word: &mut u64, bit: u8, v: bool) {
    if v {
        *word |= 1 << bit;
    } else {
        *word &= !(1 << bit);
    }
}

#[inline(always)]
fn word_eval(
    op: &MacroOp,
    l: &mut Local,
    rd: &mut impl FnMut(Operand, &Local) -> u64,
    wm: u64,
    width: u8,
) {
    fn put(l: &mut Local, d: Dest, v: u64) {
        match d {
            Dest::Op => l.op = v,
            Dest::Neighbor => l.nb = v,
            Dest::Data(i) => l.data[i as usize] = v,
        }
    }
    match *op {
        MacroOp::Copy { src, dst } => {
            let v = rd(src, l);
            put(l, dst, v);
        }
        MacroOp::Exchange { reg } => {
            let v = rd(reg.into(), l);
            put(l, reg, l.op);
            l.op = v;
        }
        MacroOp::Add { src, dst } | MacroOp::Sub { src, dst } => {
            let (a, b) = (rd(dst.into(), l), rd(src, l));
            let v = if matches!(op, MacroOp::Add { .. }) {
                a.wrapping_add(b)
            } else {
                a.wrapping_sub(b)
            };
            put(l, dst, v & wm);
        }
        MacroOp::AbsDiff { src } => {
            let b = rd(src, l);
            l.op = l.op.abs_diff(b);
        }
        MacroOp::Compare { src, cmp } => {
            let b = rd(src, l);
            l.s = cmp.eval(l.op, b);
            l.matched = l.s;
        }
        MacroOp::Threshold { src, value, cmp } => {
            let a = rd(src, l);
            l.s = cmp.eval(a, value & wm);
            l.matched = l.s;
        }
        MacroOp::SelectIf { src } => {
            let v = rd(src, l);
            if l.s {
                l.op = v;
            }
        }
        MacroOp::LoadImmediate { value, dst } => put(l, dst, value & wm),
        MacroOp::LoadImmediateIf { value } => {
            if l.s {
                l.op = value & wm;
            }
        }
        MacroOp::AddImm { value } => l.op = l.op.wrapping_add(value) & wm,
        MacroOp::MinImm { value } => l.op = l.op.min(value & wm),
        MacroOp::MaxImm { value } => l.op = l.op.max(value & wm),
        MacroOp::Min { src, dst } | MacroOp::Max { src, dst } => {
            let (a, b) = (rd(dst.into(), l), rd(src, l));
            let v = if matches!(op, MacroOp::Max { .. }) {
                a.max(b)
            } else {
                a.min(b)
            };
            put(l, dst, v);
        }
        MacroOp::AbsSigned => {
            if l.op >> (width - 1) & 1 == 1 {
                l.op = l.op.wrapping_neg() & wm;
            }
        }
        MacroOp::FlagToWord { dst } => put(l, dst, l.s as u64),
        MacroOp::Mul { src, temp } => {
            let b = rd(src, l);
            l.data[temp as usize] = l.op;
            l.op = l.op.wrapping_mul(b) & wm;
        }
    }
}
