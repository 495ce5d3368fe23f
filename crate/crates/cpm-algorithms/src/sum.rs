// SPDX-License-Identifier: Apache-2.0

//! Sectioned sums and global limits.
//!
//! Every section of `M` items accumulates concurrently from left to right,
//! leaving its total at its rightmost PE in about `M` cycles; the section
//! totals are then combined one by one into PE 0. Total cost is about
//! `2M + N/M`, smallest near `M = sqrt(N / 2)`.

use cpm_computable::{CmpOp, Dest, MacroOp, Operand};
use cpm_core::{Axis, CpmError, Direction, Result, Topology};
use serde::Serialize;

use crate::{load_nb, AlgoConfig, AlgorithmReport};

fn section_size(m: usize) -> Result<()> {
    if m == 0 {
        return Err(CpmError::Argument("section size must be positive".into()));
    }
    Ok(())
}

const ADD_LEFT: MacroOp = MacroOp::Add {
    src: Operand::Adj(Direction::Left),
    dst: Dest::Neighbor,
};

/// Sum of `values` modulo `2^width`. When `m` does not divide the length
/// the last section is shorter; `m` larger than the array acts as one
/// section.
pub fn sum_1d(values: &[u64], m: usize, cfg: AlgoConfig) -> Result<AlgorithmReport<u64>> {
    section_size(m)?;
    let n = values.len();
    let params = [("n", n as i64), ("m", m as i64)];
    if n == 0 {
        return Ok(AlgorithmReport::new(0, &params, Default::default()));
    }
    let m = m.min(n);
    let mut mem = cfg.memory(Topology::line(n), 2)?;
    load_nb(&mut mem, values)?;
    let before = mem.ledger();
    for j in 1..m {
        mem.activate(j, n - 1, m)?;
        mem.run(ADD_LEFT)?;
    }
    mem.activate(0, 0, 1)?;
    mem.run(MacroOp::LoadImmediate {
        value: 0,
        dst: Dest::Op,
    })?;
    for start in (0..n).step_by(m) {
        let v = mem.read_reg((start + m - 1).min(n - 1), Dest::Neighbor)?;
        mem.run(MacroOp::AddImm { value: v })?;
    }
    let total = mem.register(Dest::Op)[0];
    Ok(AlgorithmReport::new(total, &params, mem.ledger() - before))
}

/// Sum of a row-major `nx` by `ny` image in sections of `mx` by `my`, which
/// must divide the image. Rows accumulate left to right, then the section's
/// rightmost column accumulates bottom to top.
pub fn sum_2d(
    values: &[u64],
    nx: usize,
    ny: usize,
    mx: usize,
    my: usize,
    cfg: AlgoConfig,
) -> Result<AlgorithmReport<u64>> {
    section_size(mx.min(my))?;
    if values.len() != nx * ny || values.is_empty() {
        return Err(CpmError::Argument(format!(
            "{} values for a {nx}x{ny} image",
            values.len()
        )));
    }
    if !nx.is_multiple_of(mx) || !ny.is_multiple_of(my) {
        return Err(CpmError::Argument(format!(
            "{mx}x{my} sections do not tile a {nx}x{ny} image"
        )));
    }
    let mut mem = cfg.memory(Topology::lattice(nx, ny), 2)?;
    load_nb(&mut mem, values)?;
    let before = mem.ledger();
    for j in 1..mx {
        mem.activate_2d(Axis::new(j, nx - 1, mx), Axis::all(ny))?;
        mem.run(ADD_LEFT)?;
    }
    for k in (0..my - 1).rev() {
        mem.activate_2d(Axis::new(mx - 1, nx - 1, mx), Axis::new(k, ny - 1, my))?;
        mem.run(MacroOp::Add {
            src: Operand::Adj(Direction::Bottom),
            dst: Dest::Neighbor,
        })?;
    }
    mem.activate(0, 0, 1)?;
    mem.run(MacroOp::LoadImmediate {
        value: 0,
        dst: Dest::Op,
    })?;
    for y in (0..ny).step_by(my) {
        for x in (mx - 1..nx).step_by(mx) {
            let v = mem.read_reg(y * nx + x, Dest::Neighbor)?;
            mem.run(MacroOp::AddImm { value: v })?;
        }
    }
    let total = mem.register(Dest::Op)[0];
    Ok(AlgorithmReport::new(
        total,
        &[
            ("nx", nx as i64),
            ("ny", ny as i64),
            ("mx", mx as i64),
            ("my", my as i64),
        ],
        mem.ledger() - before,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Limit {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LimitResult {
    pub value: u64,
    /// Lowest address holding the value.
    pub address: usize,
}

/// Global maximum or minimum with a witness address, in the same sectioned
/// schedule as [`sum_1d`], plus one threshold and one priority-encoder
/// cycle for the witness.
pub fn global_limit(
    values: &[u64],
    m: usize,
    which: Limit,
    cfg: AlgoConfig,
) -> Result<AlgorithmReport<LimitResult>> {
    section_size(m)?;
    let n = values.len();
    if n == 0 {
        return Err(CpmError::Argument("no values".into()));
    }
    let m = m.min(n);
    let mut mem = cfg.memory(Topology::line(n), 2)?;
    load_nb(&mut mem, values)?;
    let before = mem.ledger();
    mem.activate_all()?;
    mem.run(MacroOp::Copy {
        src: Operand::Neighbor,
        dst: Dest::Data(0),
    })?;
    let src = Operand::Adj(Direction::Left);
    let chain = match which {
        Limit::Max => MacroOp::Max {
            src,
            dst: Dest::Neighbor,
        },
        Limit::Min => MacroOp::Min {
            src,
            dst: Dest::Neighbor,
        },
    };
    for j in 1..m {
        mem.activate(j, n - 1, m)?;
        mem.run(chain)?;
    }
    mem.activate(0, 0, 1)?;
    let init = match which {
        Limit::Max => 0,
        Limit::Min => mem.word_mask(),
    };
    mem.run(MacroOp::LoadImmediate {
        value: init,
        dst: Dest::Op,
    })?;
    for start in (0..n).step_by(m) {
        let v = mem.read_reg((start + m - 1).min(n - 1), Dest::Neighbor)?;
        mem.run(match which {
            Limit::Max => MacroOp::MaxImm { value: v },
            Limit::Min => MacroOp::MinImm { value: v },
        })?;
    }
    let value = mem.read_reg(0, Dest::Op)?;
    mem.activate_all()?;
    mem.run(MacroOp::Threshold {
        src: Operand::Data(0),
        value,
        cmp: CmpOp::Eq,
    })?;
    let address = mem
        .first_match()
        .ok_or_else(|| CpmError::Plan("limit value not found in the array".into()))?
        .linear;
    Ok(AlgorithmReport::new(
        LimitResult { value, address },
        &[("n", n as i64), ("m", m as i64)],
        mem.ledger() - before,
    ))
}
