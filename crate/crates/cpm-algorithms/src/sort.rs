// SPDX-License-Identifier: Apache-2.0

//! Sorting in place along a line.
//!
//! Local rounds compare-exchange adjacent pairs concurrently. The global
//! moving phase then repairs what is left one defect at a time: it finds
//! the lowest adjacent inversion, decides from its four-item neighborhood
//! whether the left item is a peak that should travel right or the right
//! item should drop back into the sorted prefix, locates the destination
//! with one concurrent threshold, and shifts the block in between by one.

use cpm_computable::{CmpOp, ComputableMemory, Dest, MacroOp, Operand};
use cpm_core::{CpmError, Direction, Result, Topology};
use serde::Serialize;

use crate::{load_nb, AlgoConfig, AlgorithmReport};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SortOrder {
    #[default]
    Ascending,
    Descending,
}

impl SortOrder {
    /// Predicate `a <cmp> b` that holds when `a` must come after `b`.
    fn after(self) -> CmpOp {
        match self {
            SortOrder::Ascending => CmpOp::Gt,
            SortOrder::Descending => CmpOp::Lt,
        }
    }

    pub fn is_sorted(self, v: &[u64]) -> bool {
        v.windows(2).all(|w| !self.after().eval(w[0], w[1]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectKind {
    /// An item too large for its place, at `at`.
    Peak,
    /// An item too small for its place, at `at`.
    Valley,
    /// Two adjacent items swapped, at `at` and `at + 1`.
    Fault,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Defect {
    pub kind: DefectKind,
    pub at: usize,
    /// False when the neighborhood fits more than one kind, or another
    /// defect is closer than four positions.
    pub reliable: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GlobalMoveStats {
    pub iterations: usize,
    pub peaks: usize,
    pub valleys: usize,
    pub faults: usize,
}

fn copy(src: Operand, dst: Dest) -> MacroOp {
    MacroOp::Copy { src, dst }
}

/// A line of items held in the neighboring registers.
#[derive(Debug, Clone)]
pub struct SortArray {
    mem: ComputableMemory,
}

impl SortArray {
    /// Needs at least one item.
    pub fn new(values: &[u64], cfg: AlgoConfig) -> Result<SortArray> {
        if values.is_empty() {
            return Err(CpmError::Argument("nothing to sort".into()));
        }
        let mut mem = cfg.memory(Topology::line(values.len()), 4)?;
        load_nb(&mut mem, values)?;
        Ok(SortArray { mem })
    }

    pub fn len(&self) -> usize {
        self.mem.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mem.is_empty()
    }

    pub fn values(&self) -> Vec<u64> {
        self.mem.register(Dest::Neighbor).to_vec()
    }

    pub fn memory(&self) -> &ComputableMemory {
        &self.mem
    }

    pub fn ledger(&self) -> cpm_core::CycleLedger {
        self.mem.ledger()
    }

    /// Flags adjacent inversions over `[from, n-2]` on the match lines.
    fn flag_inversions(&mut self, from: usize, order: SortOrder) -> Result<()> {
        let n = self.len();
        self.mem.activate(from, n - 2, 1)?;
        self.mem.run_all(&[
            copy(Operand::Neighbor, Dest::Op),
            MacroOp::Compare {
                src: Operand::Adj(Direction::Right),
                cmp: order.after(),
            },
        ])
    }

    /// Adjacent pairs out of `order`. Four cycles.
    pub fn count_disorder(&mut self, order: SortOrder) -> Result<usize> {
        if self.len() < 2 {
            return Ok(0);
        }
        self.flag_inversions(0, order)?;
        Ok(self.mem.count_matches())
    }

    /// Compare-exchange of pairs `(i, i+1)` with `i` of the given parity.
    /// Eight cycles.
    pub fn local_exchange_round(&mut self, parity: usize, order: SortOrder) -> Result<()> {
        let n = self.len();
        let first = parity % 2;
        if first + 1 >= n {
            return Ok(());
        }
        let last_right = first + 1 + (n - 2 - first) / 2 * 2;
        let (lo, hi) = match order {
            SortOrder::Ascending => (true, false),
            SortOrder::Descending => (false, true),
        };
        let pick = |keep_min: bool, dir| {
            let src = Operand::Adj(dir);
            if keep_min {
                MacroOp::Min { src, dst: Dest::Op }
            } else {
                MacroOp::Max { src, dst: Dest::Op }
            }
        };
        self.mem.activate(first, n - 2, 2)?;
        self.mem.run_all(&[
            copy(Operand::Neighbor, Dest::Op),
            pick(lo, Direction::Right),
        ])?;
        self.mem.activate(first + 1, n - 1, 2)?;
        self.mem
            .run_all(&[copy(Operand::Neighbor, Dest::Op), pick(hi, Direction::Left)])?;
        self.mem.activate(first, last_right, 1)?;
        self.mem.run(copy(Operand::Op, Dest::Neighbor))
    }

    /// Concurrent classification of every adjacent inversion from its
    /// neighborhood, for arrays sorted but for isolated point defects.
    pub fn classify_defects(&mut self, order: SortOrder) -> Result<Vec<Defect>> {
        let n = self.len();
        if n < 2 {
            return Ok(vec![]);
        }
        let after = order.after();
        let top = self.mem.word_mask();
        // Stand-ins for the missing items past either end, chosen so the
        // missing item never vetoes a classification.
        let (right_edge, left_edge) = match order {
            SortOrder::Ascending => (0, top),
            SortOrder::Descending => (top, 0),
        };
        let load = |value, dst| MacroOp::LoadImmediate { value, dst };
        let m = &mut self.mem;
        m.activate_all()?;
        m.run_all(&[
            copy(Operand::Neighbor, Dest::Data(0)),
            copy(Operand::Adj(Direction::Right), Dest::Neighbor),
            copy(Operand::Adj(Direction::Right), Dest::Op),
        ])?;
        m.activate(n.saturating_sub(2), n - 1, 1)?;
        m.run(load(right_edge, Dest::Op))?;
        m.activate_all()?;
        // Peak at i: x[i] must come after x[i+2].
        m.run_all(&[
            MacroOp::Compare {
                src: Operand::Data(0),
                cmp: after.mirrored(),
            },
            MacroOp::FlagToWord { dst: Dest::Data(1) },
            copy(Operand::Data(0), Dest::Neighbor),
            copy(Operand::Adj(Direction::Left), Dest::Data(2)),
        ])?;
        m.activate(0, 0, 1)?;
        m.run(load(left_edge, Dest::Data(2)))?;
        m.activate_all()?;
        // Valley at i+1: x[i-1] must come after x[i+1].
        m.run_all(&[
            copy(Operand::Adj(Direction::Right), Dest::Op),
            MacroOp::Compare {
                src: Operand::Data(2),
                cmp: after.mirrored(),
            },
            MacroOp::FlagToWord { dst: Dest::Data(2) },
        ])?;
        self.flag_inversions(0, order)?;
        let inv = self.mem.enumerate_matches().linear();
        let mut out = Vec::with_capacity(inv.len());
        for (k, &i) in inv.iter().enumerate() {
            let peak = self.mem.read_reg(i, Dest::Data(1))? == 1;
            let valley = self.mem.read_reg(i, Dest::Data(2))? == 1;
            let crowded =
                (k > 0 && i - inv[k - 1] < 4) || inv.get(k + 1).is_some_and(|&j| j - i < 4);
            let (kind, at) = match (peak, valley) {
                (true, _) => (DefectKind::Peak, i),
                (false, true) => (DefectKind::Valley, i + 1),
                (false, false) => (DefectKind::Fault, i),
            };
            out.push(Defect {
                kind,
                at,
                reliable: !(peak && valley) && !crowded,
            });
        }
        Ok(out)
    }

    /// Repairs defects until no adjacent inversion remains.
    ///
    /// Each iteration fixes the lowest inversion `i`, so everything left of
    /// it is sorted and the classification cannot be misled by another
    /// defect on that side. The left item moves right when it must come
    /// after `x[i+2]` and `x[i-1]` may precede `x[i+1]`; otherwise `x[i+1]`
    /// drops into the sorted prefix (a plain swap when it belongs at `i`).
    /// Every iteration removes at least one inversion.
    pub fn global_moving_sort(&mut self, order: SortOrder) -> Result<GlobalMoveStats> {
        let n = self.len();
        let mut st = GlobalMoveStats::default();
        if n < 2 {
            return Ok(st);
        }
        let after = order.after();
        let mut from = 0;
        loop {
            self.flag_inversions(from, order)?;
            let Some(i) = self.mem.first_match().map(|a| a.linear) else {
                return Ok(st);
            };
            st.iterations += 1;
            let x = |s: &mut Self, j: usize| s.mem.read_reg(j, Dest::Neighbor);
            let (a, b) = (x(self, i)?, x(self, i + 1)?);
            let peak = i + 2 >= n || after.eval(a, x(self, i + 2)?);
            let clean = i == 0 || !after.eval(x(self, i - 1)?, b);
            if peak && clean {
                // Before the first later item that must come after `a`.
                self.mem.activate(i + 1, n - 1, 1)?;
                self.mem.run(MacroOp::Threshold {
                    src: Operand::Neighbor,
                    value: a,
                    cmp: after,
                })?;
                let j = self.mem.first_match().map_or(n, |e| e.linear);
                self.mem.activate(i, j - 2, 1)?;
                self.mem
                    .run(copy(Operand::Adj(Direction::Right), Dest::Neighbor))?;
                self.mem.write_reg(j - 1, Dest::Neighbor, a)?;
                st.peaks += 1;
            } else if clean {
                self.mem.write_reg(i, Dest::Neighbor, b)?;
                self.mem.write_reg(i + 1, Dest::Neighbor, a)?;
                st.faults += 1;
            } else {
                // Before the first prefix item that must come after `b`.
                self.mem.activate(0, i, 1)?;
                self.mem.run(MacroOp::Threshold {
                    src: Operand::Neighbor,
                    value: b,
                    cmp: after,
                })?;
                let k = self
                    .mem
                    .first_match()
                    .ok_or_else(|| CpmError::Plan("valley has no destination".into()))?
                    .linear;
                self.mem.activate(k + 1, i + 1, 1)?;
                self.mem
                    .run(copy(Operand::Adj(Direction::Left), Dest::Neighbor))?;
                self.mem.write_reg(k, Dest::Neighbor, b)?;
                st.valleys += 1;
            }
            from = i.saturating_sub(1);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SortOutcome {
    pub values: Vec<u64>,
    pub order: SortOrder,
    /// Including any rounds spent thinning crowded defects.
    pub local_rounds: usize,
    pub global: GlobalMoveStats,
}

/// `m` local rounds of alternating parity, then the global moving phase.
/// Defects still too crowded to classify get further local rounds until
/// fewer than `N/8` adjacent pairs are inverted.
/// The direction is whichever of the two orders has fewer adjacent
/// inversions, `preferred` on a tie.
pub fn hybrid_sort(
    values: &[u64],
    m: usize,
    preferred: SortOrder,
    cfg: AlgoConfig,
) -> Result<AlgorithmReport<SortOutcome>> {
    let params = [("n", values.len() as i64), ("m", m as i64)];
    if values.len() < 2 {
        let out = SortOutcome {
            values: values.to_vec(),
            order: preferred,
            local_rounds: 0,
            global: GlobalMoveStats::default(),
        };
        return Ok(AlgorithmReport::new(out, &params, Default::default()));
    }
    let mut arr = SortArray::new(values, cfg)?;
    let before = arr.ledger();
    let up = arr.count_disorder(SortOrder::Ascending)?;
    let down = arr.count_disorder(SortOrder::Descending)?;
    let order = match preferred {
        SortOrder::Ascending if down < up => SortOrder::Descending,
        SortOrder::Descending if up < down => SortOrder::Ascending,
        p => p,
    };
    let n = arr.len();
    let mut rounds = 0;
    while rounds < m {
        arr.local_exchange_round(rounds % 2, order)?;
        rounds += 1;
    }
    if arr.classify_defects(order)?.iter().any(|d| !d.reliable) {
        while arr.count_disorder(order)? * 8 >= n {
            arr.local_exchange_round(rounds % 2, order)?;
            rounds += 1;
        }
    }
    let global = arr.global_moving_sort(order)?;
    let out = SortOutcome {
        values: arr.values(),
        order,
        local_rounds: rounds,
        global,
    };
    Ok(AlgorithmReport::new(out, &params, arr.ledger() - before))
}
