// SPDX-License-Identifier: Apache-2.0

//! Line detection with messengers.
//!
//! For a slope `(mx, my)` every pixel is the origin of a segment reaching
//! the far corner `(mx, my)` of a small area, `x` to the right and `y`
//! downward. A messenger per origin starts at the far corner and walks to
//! the origin along a 4-connected path that hugs the ideal segment, adding
//! the intensity of pixels left of the segment and subtracting those to the
//! right. All messengers walk at once, so one slope costs about `mx + my`
//! cycles whatever the image size.
//!
//! Left and right are taken from the sign of the cross product of the walk
//! direction `(-mx, -my)` with the cell's offset from the origin. Cells on
//! the segment alternate add and subtract in walk order; the two endpoints
//! contribute nothing. A slope along an axis has every cell on the segment,
//! so it sums the difference across the segment instead.

use cpm_computable::{CmpOp, ComputableMemory, Dest, MacroOp, Operand};
use cpm_core::{Axis, CpmError, Direction, Result, Topology};
use serde::Serialize;

use crate::{signed, AlgoConfig, AlgorithmReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PathCell {
    pub dx: i64,
    pub dy: i64,
    /// +1 added, -1 subtracted, 0 not counted.
    pub sign: i8,
}

fn cross(mx: i64, my: i64, dx: i64, dy: i64) -> i64 {
    // (-mx, -my) x (dx, dy)
    -mx * dy + my * dx
}

/// Cells visited from the far corner to the origin, both included. Each
/// step moves one unit toward the origin along whichever axis keeps the
/// cell closer to the segment, x first on a tie.
pub fn messenger_path(mx: i64, my: i64) -> Vec<PathCell> {
    let (sx, sy) = (mx.signum(), my.signum());
    let (ax, ay) = (mx.abs(), my.abs());
    let (mut cx, mut cy) = (ax, ay);
    let mut cells = vec![(cx, cy)];
    while (cx, cy) != (0, 0) {
        let by_x = (cx > 0).then(|| cross(ax, ay, cx - 1, cy).abs());
        let by_y = (cy > 0).then(|| cross(ax, ay, cx, cy - 1).abs());
        match (by_x, by_y) {
            (Some(a), Some(b)) if a <= b => cx -= 1,
            (Some(_), None) => cx -= 1,
            _ => cy -= 1,
        }
        cells.push((cx, cy));
    }
    let last = cells.len() - 1;
    let mut on_line = 0;
    cells
        .into_iter()
        .enumerate()
        .map(|(k, (cx, cy))| {
            let (dx, dy) = (cx * sx, cy * sy);
            let sign = if k == 0 || k == last {
                0
            } else {
                match cross(mx, my, dx, dy).signum() {
                    0 => {
                        on_line += 1;
                        if on_line % 2 == 1 {
                            1
                        } else {
                            -1
                        }
                    }
                    s => s as i8,
                }
            };
            PathCell { dx, dy, sign }
        })
        .collect()
}

fn dir_of(dx: i64, dy: i64) -> Direction {
    match (dx, dy) {
        (1, 0) => Direction::Right,
        (-1, 0) => Direction::Left,
        (0, 1) => Direction::Bottom,
        _ => Direction::Top,
    }
}

/// Rectangle of origins whose whole segment, plus any side pixels the
/// slope reads, lies inside the image: `(x0, x1, y0, y1)` inclusive.
fn valid_origins(nx: usize, ny: usize, mx: i64, my: i64) -> Option<(usize, usize, usize, usize)> {
    let (mut lx, mut hx) = (mx.min(0), mx.max(0));
    let (mut ly, mut hy) = (my.min(0), my.max(0));
    if my == 0 {
        ly = -1;
        hy = 1;
    }
    if mx == 0 {
        lx = -1;
        hx = 1;
    }
    let x0 = -lx;
    let x1 = nx as i64 - 1 - hx;
    let y0 = -ly;
    let y1 = ny as i64 - 1 - hy;
    (x0 <= x1 && y0 <= y1).then_some((x0 as usize, x1 as usize, y0 as usize, y1 as usize))
}

/// Image intensities in d0. Leaves each origin's messenger in `nb`.
fn run_messengers(mem: &mut ComputableMemory, mx: i64, my: i64, temp: u8) -> Result<()> {
    let copy = |src, dst| MacroOp::Copy { src, dst };
    mem.activate_all()?;
    if mx == 0 || my == 0 {
        // Difference across the segment, summed along it.
        let (ax, ay) = (mx.signum(), my.signum());
        let (px, py) = (-ay, ax);
        let (plus, minus) = if cross(mx, my, px, py) > 0 {
            ((px, py), (-px, -py))
        } else {
            ((-px, -py), (px, py))
        };
        mem.run_all(&[
            copy(Operand::Data(0), Dest::Neighbor),
            copy(Operand::Adj(dir_of(plus.0, plus.1)), Dest::Op),
            MacroOp::Sub {
                src: Operand::Adj(dir_of(minus.0, minus.1)),
                dst: Dest::Op,
            },
            copy(Operand::Op, Dest::Data(temp)),
            copy(Operand::Op, Dest::Neighbor),
        ])?;
        let from = dir_of(ax, ay);
        for _ in 0..(mx.abs() + my.abs()) {
            mem.run_all(&[
                copy(Operand::Adj(from), Dest::Neighbor),
                MacroOp::Add {
                    src: Operand::Data(temp),
                    dst: Dest::Neighbor,
                },
            ])?;
        }
        return Ok(());
    }
    mem.run(MacroOp::LoadImmediate {
        value: 0,
        dst: Dest::Neighbor,
    })?;
    let path = messenger_path(mx, my);
    for w in path.windows(2) {
        // The messenger steps by (w1 - w0), so each PE takes it from the
        // neighbor on the opposite side.
        let from = dir_of(w[0].dx - w[1].dx, w[0].dy - w[1].dy);
        mem.run(copy(Operand::Adj(from), Dest::Neighbor))?;
        match w[1].sign {
            1 => mem.run(MacroOp::Add {
                src: Operand::Data(0),
                dst: Dest::Neighbor,
            })?,
            -1 => mem.run(MacroOp::Sub {
                src: Operand::Data(0),
                dst: Dest::Neighbor,
            })?,
            _ => {}
        }
    }
    Ok(())
}

fn image_memory(image: &[u64], nx: usize, ny: usize, cfg: AlgoConfig) -> Result<ComputableMemory> {
    if image.len() != nx * ny || image.is_empty() {
        return Err(CpmError::Argument(format!(
            "{} pixels for a {nx}x{ny} image",
            image.len()
        )));
    }
    let mut mem = cfg.memory(Topology::lattice(nx, ny), 5)?;
    mem.load_register(Dest::Data(0), image)?;
    Ok(mem)
}

/// Messenger value at every origin, `None` where the segment leaves the
/// image.
pub fn detect_line_segment(
    image: &[u64],
    nx: usize,
    ny: usize,
    mx: i64,
    my: i64,
    cfg: AlgoConfig,
) -> Result<AlgorithmReport<Vec<Option<i64>>>> {
    if mx == 0 && my == 0 {
        return Err(CpmError::Argument("slope (0, 0) has no direction".into()));
    }
    let mut mem = image_memory(image, nx, ny, cfg)?;
    let before = mem.ledger();
    run_messengers(&mut mem, mx, my, 3)?;
    let nb = mem.register(Dest::Neighbor);
    let valid = valid_origins(nx, ny, mx, my);
    let out = (0..nx * ny)
        .map(|i| {
            let (x, y) = (i % nx, i / nx);
            valid
                .filter(|&(x0, x1, y0, y1)| (x0..=x1).contains(&x) && (y0..=y1).contains(&y))
                .map(|_| signed(nb[i], cfg.width))
        })
        .collect();
    Ok(AlgorithmReport::new(
        out,
        &[("nx", nx as i64), ("ny", ny as i64), ("mx", mx), ("my", my)],
        mem.ledger() - before,
    ))
}

/// First-quadrant offsets whose pixel square the circle of radius `d`
/// passes through: nearest corner within `d`, farthest corner beyond it.
pub fn build_slope_set(d: u32) -> Result<Vec<(i64, i64)>> {
    if d == 0 {
        return Err(CpmError::Argument("radius must be positive".into()));
    }
    let d2 = 4 * (d as i64).pow(2);
    let mut out = Vec::new();
    for my in 0..=d as i64 + 1 {
        for mx in 0..=d as i64 + 1 {
            if (mx, my) == (0, 0) {
                continue;
            }
            let near = |c: i64| if c == 0 { 0 } else { (2 * c - 1).pow(2) };
            let far = |c: i64| (2 * c + 1).pow(2);
            if near(mx) + near(my) <= d2 && d2 <= far(mx) + far(my) {
                out.push((mx, my));
            }
        }
    }
    Ok(out)
}

/// Adds `(-mx, my)` for every diagonal offset so both diagonal directions
/// are covered.
pub fn with_sign_variants(set: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut out = set.to_vec();
    out.extend(
        set.iter()
            .filter(|&&(x, y)| x > 0 && y > 0)
            .map(|&(x, y)| (-x, y)),
    );
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineMap {
    /// Largest messenger magnitude seen at each pixel.
    pub strength: Vec<u64>,
    /// Slope that produced it first, `None` where every response was zero.
    pub slope: Vec<Option<(i64, i64)>>,
}

/// Runs every slope of [`build_slope_set`] and its sign variants, keeping
/// the strongest response per pixel in d1 and its slope index in d2.
pub fn detect_all_lines(
    image: &[u64],
    nx: usize,
    ny: usize,
    d: u32,
    cfg: AlgoConfig,
) -> Result<AlgorithmReport<LineMap>> {
    let slopes = with_sign_variants(&build_slope_set(d)?);
    let mut mem = image_memory(image, nx, ny, cfg)?;
    let before = mem.ledger();
    mem.activate_all()?;
    for dst in [Dest::Data(1), Dest::Data(2)] {
        mem.run(MacroOp::LoadImmediate { value: 0, dst })?;
    }
    for (idx, &(mx, my)) in slopes.iter().enumerate() {
        let Some((x0, x1, y0, y1)) = valid_origins(nx, ny, mx, my) else {
            continue;
        };
        run_messengers(&mut mem, mx, my, 3)?;
        mem.activate_2d(Axis::new(x0, x1, 1), Axis::new(y0, y1, 1))?;
        mem.run_all(&[
            MacroOp::Copy {
                src: Operand::Neighbor,
                dst: Dest::Op,
            },
            MacroOp::AbsSigned,
            MacroOp::Compare {
                src: Operand::Data(1),
                cmp: CmpOp::Gt,
            },
            MacroOp::Exchange { reg: Dest::Data(1) },
            MacroOp::SelectIf {
                src: Operand::Data(1),
            },
            MacroOp::Copy {
                src: Operand::Op,
                dst: Dest::Data(1),
            },
            MacroOp::Copy {
                src: Operand::Data(2),
                dst: Dest::Op,
            },
            MacroOp::LoadImmediateIf {
                value: idx as u64 + 1,
            },
            MacroOp::Copy {
                src: Operand::Op,
                dst: Dest::Data(2),
            },
        ])?;
    }
    let strength = mem.register(Dest::Data(1)).to_vec();
    let slope = mem
        .register(Dest::Data(2))
        .iter()
        .map(|&k| (k > 0).then(|| slopes[k as usize - 1]))
        .collect();
    Ok(AlgorithmReport::new(
        LineMap { strength, slope },
        &[("nx", nx as i64), ("ny", ny as i64), ("d", d as i64)],
        mem.ledger() - before,
    ))
}
