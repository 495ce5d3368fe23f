// SPDX-License-Identifier: Apache-2.0

//! Running a validated local plan over a whole array.
//!
//! Multi-step plans pass partial sums between neighbors, so a PE near the
//! edge would see a partial sum built from fill values rather than from
//! zeros beyond the data. The array is therefore padded with a zero halo as
//! wide as the plan's reach; inside it every result equals the zero-padded
//! convolution.

use cpm_computable::Dest;
use cpm_core::{Result, Topology};

use crate::kernel::{Kernel1D, Kernel2D, LocalPlan};
use crate::{AlgoConfig, AlgorithmReport};

/// Results are `width`-bit words; signed taps wrap as two's complement.
pub fn run_local_op_1d(
    data: &[u64],
    kernel: &Kernel1D,
    plan: &LocalPlan,
    cfg: AlgoConfig,
) -> Result<AlgorithmReport<Vec<u64>>> {
    plan.validate(&Kernel2D::row(kernel))?;
    let h = plan.reach().0;
    let n = data.len();
    let mut mem = cfg.memory(Topology::line(n + 2 * h), 4)?;
    for (i, &v) in data.iter().enumerate() {
        mem.write_reg(h + i, Dest::Neighbor, v)?;
    }
    let before = mem.ledger();
    mem.activate_all()?;
    mem.run_all(&plan.ops)?;
    let out = mem.register(Dest::Op)[h..h + n].to_vec();
    Ok(AlgorithmReport::new(
        out,
        &[("n", n as i64), ("plan_len", plan.len() as i64)],
        mem.ledger() - before,
    ))
}

/// Row-major image of `nx` by `ny`.
pub fn run_local_op_2d(
    image: &[u64],
    nx: usize,
    ny: usize,
    kernel: &Kernel2D,
    plan: &LocalPlan,
    cfg: AlgoConfig,
) -> Result<AlgorithmReport<Vec<u64>>> {
    if image.len() != nx * ny {
        return Err(cpm_core::CpmError::Argument(format!(
            "{} pixels for a {nx}x{ny} image",
            image.len()
        )));
    }
    plan.validate(kernel)?;
    let (hx, hy) = plan.reach();
    let (mx, my) = (nx + 2 * hx, ny + 2 * hy);
    let mut mem = cfg.memory(Topology::lattice(mx, my), 4)?;
    for y in 0..ny {
        for x in 0..nx {
            mem.write_reg((y + hy) * mx + x + hx, Dest::Neighbor, image[y * nx + x])?;
        }
    }
    let before = mem.ledger();
    mem.activate_all()?;
    mem.run_all(&plan.ops)?;
    let op = mem.register(Dest::Op);
    let out = (0..ny)
        .flat_map(|y| (0..nx).map(move |x| (y, x)))
        .map(|(y, x)| op[(y + hy) * mx + x + hx])
        .collect();
    Ok(AlgorithmReport::new(
        out,
        &[
            ("nx", nx as i64),
            ("ny", ny as i64),
            ("plan_len", plan.len() as i64),
        ],
        mem.ledger() - before,
    ))
}
