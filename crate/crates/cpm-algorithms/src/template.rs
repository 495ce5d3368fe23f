// SPDX-License-Identifier: Apache-2.0

//! Template search by sum of absolute differences.
//!
//! The template is tiled across the array once, one broadcast per element.
//! For each of the `M` alignments every window starting at that alignment
//! computes its differences and sums them right to left, then the tiled
//! template moves one position. Cycle counts depend on the template size
//! only.

use cpm_computable::{Dest, MacroOp, Operand};
use cpm_core::{Axis, CpmError, Direction, Result, Topology};
use serde::Serialize;

use crate::{load_nb, AlgoConfig, AlgorithmReport};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemplateMatch1D {
    /// SAD of the window starting at each position `0..=N-M`.
    pub sad: Vec<u64>,
    /// Lowest position with the smallest SAD.
    pub best: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TemplateMatch2D {
    /// Row-major SADs of the `(nx-mx+1)` by `(ny-my+1)` window origins.
    pub sad: Vec<u64>,
    pub positions_x: usize,
    /// Smallest SAD, lowest row first, then lowest column.
    pub best: (usize, usize),
}

fn copy(src: Operand, dst: Dest) -> MacroOp {
    MacroOp::Copy { src, dst }
}

const D0: Operand = Operand::Data(0);
const D1: Operand = Operand::Data(1);

/// `|d0 - d1|` into the neighboring register, under the current activation.
fn difference(mem: &mut cpm_computable::ComputableMemory) -> Result<()> {
    mem.run_all(&[
        copy(D0, Dest::Op),
        MacroOp::AbsDiff { src: D1 },
        copy(Operand::Op, Dest::Neighbor),
    ])
}

fn shift_template(mem: &mut cpm_computable::ComputableMemory, from: Direction) -> Result<()> {
    mem.activate_all()?;
    mem.run_all(&[
        copy(D1, Dest::Neighbor),
        copy(Operand::Adj(from), Dest::Data(1)),
    ])
}

fn lowest_min(sad: &[u64]) -> usize {
    let min = sad.iter().min().copied().unwrap_or(0);
    sad.iter().position(|&s| s == min).unwrap_or(0)
}

pub fn template_search_1d(
    data: &[u64],
    template: &[u64],
    cfg: AlgoConfig,
) -> Result<AlgorithmReport<TemplateMatch1D>> {
    let (n, m) = (data.len(), template.len());
    if m == 0 || m > n {
        return Err(CpmError::Argument(format!(
            "template of {m} items for {n} data items"
        )));
    }
    // d0 data, d1 tiled template, d2 results.
    let mut mem = cfg.memory(Topology::line(n), 4)?;
    load_nb(&mut mem, data)?;
    let before = mem.ledger();
    mem.activate_all()?;
    mem.run(copy(Operand::Neighbor, Dest::Data(0)))?;
    for (k, &t) in template.iter().enumerate() {
        mem.activate(k, n - 1, m)?;
        mem.run(MacroOp::LoadImmediate {
            value: t,
            dst: Dest::Data(1),
        })?;
    }
    // Alignment s serves the windows starting at s, s + m, s + 2m, ...
    for s in 0..m.min(n - m + 1) {
        if s > 0 {
            shift_template(&mut mem, Direction::Left)?;
        } else {
            mem.activate_all()?;
        }
        difference(&mut mem)?;
        for k in (0..m - 1).rev() {
            mem.activate(s + k, n - 1, m)?;
            mem.run(MacroOp::Add {
                src: Operand::Adj(Direction::Right),
                dst: Dest::Neighbor,
            })?;
        }
        mem.activate(s, n - 1, m)?;
        mem.run(copy(Operand::Neighbor, Dest::Data(2)))?;
    }
    let sad = mem.register(Dest::Data(2))[..=n - m].to_vec();
    let best = lowest_min(&sad);
    Ok(AlgorithmReport::new(
        TemplateMatch1D { sad, best },
        &[("n", n as i64), ("m", m as i64)],
        mem.ledger() - before,
    ))
}

/// Row-major image and template. The template sweeps the `mx` column
/// alignments left to right, moves down one row, sweeps back, and so on;
/// after each sweep the row sums of all windows in that row alignment are
/// combined down the columns at once. A zero halo of `mx - 1` columns on the
/// right keeps the reversed sweeps clear of values lost at the array edge.
pub fn template_search_2d(
    image: &[u64],
    nx: usize,
    ny: usize,
    template: &[u64],
    mx: usize,
    my: usize,
    cfg: AlgoConfig,
) -> Result<AlgorithmReport<TemplateMatch2D>> {
    if image.len() != nx * ny || template.len() != mx * my {
        return Err(CpmError::Argument("image or template size mismatch".into()));
    }
    if mx == 0 || my == 0 || mx > nx || my > ny {
        return Err(CpmError::Argument(format!(
            "{mx}x{my} template for a {nx}x{ny} image"
        )));
    }
    let w = nx + mx - 1;
    // d0 image, d1 tiled template, d2 row sums, d3 results.
    let mut mem = cfg.memory(Topology::lattice(w, ny), 5)?;
    for y in 0..ny {
        for x in 0..nx {
            mem.write_reg(y * w + x, Dest::Neighbor, image[y * nx + x])?;
        }
    }
    let before = mem.ledger();
    mem.activate_all()?;
    mem.run(copy(Operand::Neighbor, Dest::Data(0)))?;
    for j in 0..my {
        for i in 0..mx {
            mem.activate_2d(Axis::new(i, w - 1, mx), Axis::new(j, ny - 1, my))?;
            mem.run(MacroOp::LoadImmediate {
                value: template[j * mx + i],
                dst: Dest::Data(1),
            })?;
        }
    }
    for sy in 0..my.min(ny - my + 1) {
        if sy > 0 {
            shift_template(&mut mem, Direction::Top)?;
        }
        let order: Vec<usize> = if sy % 2 == 0 {
            (0..mx).collect()
        } else {
            (0..mx).rev().collect()
        };
        for (idx, &sx) in order.iter().enumerate() {
            if idx > 0 {
                let from = if sy % 2 == 0 {
                    Direction::Left
                } else {
                    Direction::Right
                };
                shift_template(&mut mem, from)?;
            } else {
                mem.activate_all()?;
            }
            difference(&mut mem)?;
            for k in (0..mx - 1).rev() {
                mem.activate_2d(Axis::new(sx + k, w - 1, mx), Axis::all(ny))?;
                mem.run(MacroOp::Add {
                    src: Operand::Adj(Direction::Right),
                    dst: Dest::Neighbor,
                })?;
            }
            mem.activate_2d(Axis::new(sx, w - 1, mx), Axis::all(ny))?;
            mem.run(copy(Operand::Neighbor, Dest::Data(2)))?;
        }
        mem.activate_all()?;
        mem.run(copy(Operand::Data(2), Dest::Neighbor))?;
        for k in (0..my - 1).rev() {
            mem.activate_2d(Axis::all(w), Axis::new(sy + k, ny - 1, my))?;
            mem.run(MacroOp::Add {
                src: Operand::Adj(Direction::Bottom),
                dst: Dest::Neighbor,
            })?;
        }
        mem.activate_2d(Axis::all(w), Axis::new(sy, ny - 1, my))?;
        mem.run(copy(Operand::Neighbor, Dest::Data(3)))?;
    }
    let (px, py) = (nx - mx + 1, ny - my + 1);
    let res = mem.register(Dest::Data(3));
    let sad: Vec<u64> = (0..py)
        .flat_map(|y| (0..px).map(move |x| (x, y)))
        .map(|(x, y)| res[y * w + x])
        .collect();
    let b = lowest_min(&sad);
    Ok(AlgorithmReport::new(
        TemplateMatch2D {
            sad,
            positions_x: px,
            best: (b % px, b / px),
        },
        &[
            ("nx", nx as i64),
            ("ny", ny as i64),
            ("mx", mx as i64),
            ("my", my as i64),
        ],
        mem.ledger() - before,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_exact_matches() {
        let r = template_search_1d(&[1, 5, 2, 8, 2, 8, 1], &[2, 8], AlgoConfig::default()).unwrap();
        assert_eq!(r.result.sad, vec![4, 9, 0, 12, 0, 13]);
        assert_eq!(r.result.best, 2);
    }

    #[test]
    fn template_as_long_as_data() {
        let r = template_search_1d(&[4, 1], &[3, 3], AlgoConfig::default()).unwrap();
        assert_eq!(r.result.sad, vec![3]);
    }

    #[test]
    fn image_patch_is_found() {
        let (nx, ny) = (7, 5);
        let img: Vec<u64> = (0..nx * ny).map(|i| (i * 7 % 11) as u64).collect();
        let (ox, oy) = (3, 2);
        let t: Vec<u64> = (0..3 * 2)
            .map(|i| img[(oy + i / 3) * nx + ox + i % 3])
            .collect();
        let r = template_search_2d(&img, nx, ny, &t, 3, 2, AlgoConfig::default()).unwrap();
        assert_eq!(r.result.best, (3, 2));
        assert_eq!(r.result.sad[2 * 5 + 3], 0);
    }
}
