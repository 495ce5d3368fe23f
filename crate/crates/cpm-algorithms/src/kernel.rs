// SPDX-License-Identifier: Apache-2.0

//! Kernel algebra for local operations.
//!
//! A kernel gives the weight each neighbor contributes to a PE's result:
//! tap `k` of a 1-D kernel weighs the value `k` positions to the right
//! (negative `k` is to the left). Two kernels add tap by tap and compose by
//! ordinary convolution, which is what running one local operation on the
//! output of another does. Kernels compare equal up to zero padding.

use std::fmt;
use std::ops::Add;

use cpm_computable::{Dest, MacroOp, Operand};
use cpm_core::{CpmError, Direction, Result};

#[derive(Debug, Clone)]
pub struct Kernel1D {
    taps: Vec<i64>,
}

impl Kernel1D {
    /// Taps from leftmost to rightmost; the length must be odd.
    pub fn new(taps: Vec<i64>) -> Result<Kernel1D> {
        if taps.len().is_multiple_of(2) {
            return Err(CpmError::Argument(format!(
                "kernel of {} taps has no center",
                taps.len()
            )));
        }
        Ok(Kernel1D { taps })
    }

    pub fn identity() -> Kernel1D {
        Kernel1D { taps: vec![1] }
    }

    pub fn radius(&self) -> usize {
        self.taps.len() / 2
    }

    pub fn taps(&self) -> &[i64] {
        &self.taps
    }

    pub fn tap(&self, k: isize) -> i64 {
        let i = k + self.radius() as isize;
        if i < 0 {
            return 0;
        }
        self.taps.get(i as usize).copied().unwrap_or(0)
    }

    fn from_fn(r: usize, f: impl Fn(isize) -> i64) -> Kernel1D {
        let r = r as isize;
        Kernel1D {
            taps: (-r..=r).map(f).collect(),
        }
    }

    /// Convolution: the kernel of applying `self` and then `other`.
    pub fn compose(&self, other: &Kernel1D) -> Kernel1D {
        let (ra, rb) = (self.radius() as isize, other.radius() as isize);
        Kernel1D::from_fn((ra + rb) as usize, |n| {
            (-ra..=ra).map(|k| self.tap(k) * other.tap(n - k)).sum()
        })
    }

    /// Drops zero taps from both ends as long as both ends are zero.
    pub fn normalized(&self) -> Kernel1D {
        let mut t = self.taps.as_slice();
        while t.len() > 1 && t[0] == 0 && t[t.len() - 1] == 0 {
            t = &t[1..t.len() - 1];
        }
        Kernel1D { taps: t.to_vec() }
    }

    /// Applies the kernel directly with zero padding.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        let r = self.radius() as isize;
        (0..x.len() as isize)
            .map(|p| {
                (-r..=r)
                    .filter_map(|k| {
                        let q = p + k;
                        (0..x.len() as isize)
                            .contains(&q)
                            .then(|| self.tap(k) * x[q as usize])
                    })
                    .sum()
            })
            .collect()
    }
}

impl Add for &Kernel1D {
    type Output = Kernel1D;
    fn add(self, o: &Kernel1D) -> Kernel1D {
        Kernel1D::from_fn(self.radius().max(o.radius()), |k| self.tap(k) + o.tap(k))
    }
}

impl PartialEq for Kernel1D {
    fn eq(&self, o: &Kernel1D) -> bool {
        self.normalized().taps == o.normalized().taps
    }
}

impl fmt::Display for Kernel1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.taps.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", t.join(" "))
    }
}

/// Weights over `(dx, dy)`, with `dy` growing downward.
#[derive(Debug, Clone)]
pub struct Kernel2D {
    rx: usize,
    ry: usize,
    /// Row-major, `(2 * ry + 1)` rows of `(2 * rx + 1)`.
    taps: Vec<i64>,
}

impl Kernel2D {
    /// Rows from top to bottom, each from left to right.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Kernel2D> {
        let h = rows.len();
        let w = rows.first().map_or(0, |r| r.len());
        if h.is_multiple_of(2) || w.is_multiple_of(2) || rows.iter().any(|r| r.len() != w) {
            return Err(CpmError::Argument(
                "2-D kernel needs an odd number of equal, odd-length rows".into(),
            ));
        }
        Ok(Kernel2D {
            rx: w / 2,
            ry: h / 2,
            taps: rows.concat(),
        })
    }

    pub fn identity() -> Kernel2D {
        Kernel2D::row(&Kernel1D::identity())
    }

    pub fn zero() -> Kernel2D {
        Kernel2D {
            rx: 0,
            ry: 0,
            taps: vec![0],
        }
    }

    /// A 1-D kernel along x.
    pub fn row(k: &Kernel1D) -> Kernel2D {
        Kernel2D {
            rx: k.radius(),
            ry: 0,
            taps: k.taps.clone(),
        }
    }

    /// A 1-D kernel along y, its first tap on top.
    pub fn column(k: &Kernel1D) -> Kernel2D {
        Kernel2D {
            rx: 0,
            ry: k.radius(),
            taps: k.taps.clone(),
        }
    }

    pub fn radii(&self) -> (usize, usize) {
        (self.rx, self.ry)
    }

    pub fn tap(&self, dx: isize, dy: isize) -> i64 {
        let (rx, ry) = (self.rx as isize, self.ry as isize);
        if dx.abs() > rx || dy.abs() > ry {
            return 0;
        }
        self.taps[((dy + ry) * (2 * rx + 1) + dx + rx) as usize]
    }

    fn from_fn(rx: usize, ry: usize, f: impl Fn(isize, isize) -> i64) -> Kernel2D {
        let (x, y) = (rx as isize, ry as isize);
        let mut taps = Vec::with_capacity((2 * rx + 1) * (2 * ry + 1));
        for dy in -y..=y {
            for dx in -x..=x {
                taps.push(f(dx, dy));
            }
        }
        Kernel2D { rx, ry, taps }
    }

    pub fn compose(&self, o: &Kernel2D) -> Kernel2D {
        let (ax, ay) = (self.rx as isize, self.ry as isize);
        Kernel2D::from_fn(self.rx + o.rx, self.ry + o.ry, |nx, ny| {
            let mut s = 0;
            for ky in -ay..=ay {
                for kx in -ax..=ax {
                    s += self.tap(kx, ky) * o.tap(nx - kx, ny - ky);
                }
            }
            s
        })
    }

    pub fn scaled(&self, c: i64) -> Kernel2D {
        Kernel2D {
            taps: self.taps.iter().map(|t| t * c).collect(),
            ..self.clone()
        }
    }

    /// The kernel of reading this one's result from the adjacent PE in `dir`.
    pub fn shifted(&self, dir: Direction) -> Kernel2D {
        let (sx, sy): (isize, isize) = match dir {
            Direction::Left => (-1, 0),
            Direction::Right => (1, 0),
            Direction::Top => (0, -1),
            Direction::Bottom => (0, 1),
        };
        Kernel2D::from_fn(
            self.rx + sx.unsigned_abs(),
            self.ry + sy.unsigned_abs(),
            |dx, dy| self.tap(dx - sx, dy - sy),
        )
    }

    pub fn normalized(&self) -> Kernel2D {
        let mut k = self.clone();
        loop {
            let (rx, ry) = (k.rx as isize, k.ry as isize);
            if ry > 0 && (-rx..=rx).all(|dx| k.tap(dx, -ry) == 0 && k.tap(dx, ry) == 0) {
                k = Kernel2D::from_fn(k.rx, k.ry - 1, |dx, dy| k.tap(dx, dy));
            } else if rx > 0 && (-ry..=ry).all(|dy| k.tap(-rx, dy) == 0 && k.tap(rx, dy) == 0) {
                k = Kernel2D::from_fn(k.rx - 1, k.ry, |dx, dy| k.tap(dx, dy));
            } else {
                return k;
            }
        }
    }

    /// Applies the kernel directly to a row-major image with zero padding.
    pub fn apply(&self, img: &[i64], nx: usize, ny: usize) -> Vec<i64> {
        let (rx, ry) = (self.rx as isize, self.ry as isize);
        let mut out = vec![0; nx * ny];
        for y in 0..ny as isize {
            for x in 0..nx as isize {
                let mut s = 0;
                for dy in -ry..=ry {
                    for dx in -rx..=rx {
                        let (qx, qy) = (x + dx, y + dy);
                        if (0..nx as isize).contains(&qx) && (0..ny as isize).contains(&qy) {
                            s += self.tap(dx, dy) * img[(qy * nx as isize + qx) as usize];
                        }
                    }
                }
                out[(y * nx as isize + x) as usize] = s;
            }
        }
        out
    }
}

impl Add for &Kernel2D {
    type Output = Kernel2D;
    fn add(self, o: &Kernel2D) -> Kernel2D {
        Kernel2D::from_fn(self.rx.max(o.rx), self.ry.max(o.ry), |dx, dy| {
            self.tap(dx, dy) + o.tap(dx, dy)
        })
    }
}

impl PartialEq for Kernel2D {
    fn eq(&self, o: &Kernel2D) -> bool {
        let (a, b) = (self.normalized(), o.normalized());
        a.rx == b.rx && a.ry == b.ry && a.taps == b.taps
    }
}

impl fmt::Display for Kernel2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = 2 * self.rx + 1;
        let rows: Vec<String> = self
            .taps
            .chunks(w)
            .map(|r| {
                r.iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        write!(f, "({})", rows.join("; "))
    }
}

/// A sequence of copies, additions and subtractions whose result is left in
/// `op`, with the input in the neighboring register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalPlan {
    pub ops: Vec<MacroOp>,
}

impl LocalPlan {
    fn copy(src: Operand, dst: Dest) -> MacroOp {
        MacroOp::Copy { src, dst }
    }

    fn add(src: Operand, dst: Dest) -> MacroOp {
        MacroOp::Add { src, dst }
    }

    /// `(1 2 1)` in four operations.
    pub fn smooth3() -> LocalPlan {
        use Direction::*;
        LocalPlan {
            ops: vec![
                Self::copy(Operand::Neighbor, Dest::Op),
                Self::add(Operand::Adj(Left), Dest::Op),
                Self::copy(Operand::Op, Dest::Neighbor),
                Self::add(Operand::Adj(Right), Dest::Op),
            ],
        }
    }

    /// `(1 2 4 2 1)` in six operations.
    pub fn smooth5() -> LocalPlan {
        use Direction::*;
        LocalPlan {
            ops: vec![
                Self::copy(Operand::Neighbor, Dest::Op),
                Self::add(Operand::Neighbor, Dest::Op),
                Self::add(Operand::Adj(Left), Dest::Neighbor),
                Self::add(Operand::Adj(Right), Dest::Neighbor),
                Self::add(Operand::Adj(Left), Dest::Op),
                Self::add(Operand::Adj(Right), Dest::Op),
            ],
        }
    }

    /// The 3x3 binomial kernel `(1 2 1)` by `(1 2 1)` in eight operations.
    pub fn smooth3x3() -> LocalPlan {
        use Direction::*;
        let mut ops = Vec::new();
        for (i, d) in [Left, Right, Top, Bottom].into_iter().enumerate() {
            ops.push(if i == 0 {
                Self::copy(Operand::Neighbor, Dest::Op)
            } else {
                Self::copy(Operand::Op, Dest::Neighbor)
            });
            ops.push(Self::add(Operand::Adj(d), Dest::Op));
        }
        LocalPlan { ops }
    }

    /// A plan for any kernel: walk a copy of the input to every offset and
    /// add or subtract it as often as the tap says. Uses data registers 0
    /// and 1.
    pub fn direct(k: &Kernel2D) -> LocalPlan {
        let (rx, ry) = (k.rx as isize, k.ry as isize);
        let mut ops = vec![
            Self::copy(Operand::Neighbor, Dest::Data(0)),
            MacroOp::LoadImmediate {
                value: 0,
                dst: Dest::Op,
            },
        ];
        for dy in -ry..=ry {
            if (-rx..=rx).all(|dx| k.tap(dx, dy) == 0) {
                continue;
            }
            ops.push(Self::copy(Operand::Data(0), Dest::Neighbor));
            let vd = if dy < 0 {
                Direction::Top
            } else {
                Direction::Bottom
            };
            for _ in 0..dy.abs() {
                ops.push(Self::copy(Operand::Adj(vd), Dest::Neighbor));
            }
            ops.push(Self::copy(Operand::Neighbor, Dest::Data(1)));
            for side in [-1isize, 1] {
                let hd = if side < 0 {
                    Direction::Left
                } else {
                    Direction::Right
                };
                for step in 0..=rx {
                    let dx = side * step;
                    if step > 0 {
                        ops.push(Self::copy(Operand::Adj(hd), Dest::Neighbor));
                    } else if side > 0 {
                        ops.push(Self::copy(Operand::Data(1), Dest::Neighbor));
                    }
                    if step == 0 && side > 0 {
                        continue;
                    }
                    let t = k.tap(dx, dy);
                    for _ in 0..t.unsigned_abs() {
                        ops.push(if t > 0 {
                            Self::add(Operand::Neighbor, Dest::Op)
                        } else {
                            MacroOp::Sub {
                                src: Operand::Neighbor,
                                dst: Dest::Op,
                            }
                        });
                    }
                }
            }
        }
        LocalPlan { ops }
    }

    /// Symbolic execution: the kernel `op` holds at the end, taking the
    /// neighboring register as the identity.
    pub fn evaluate(&self) -> Result<Kernel2D> {
        let mut nb = Some(Kernel2D::identity());
        let mut op: Option<Kernel2D> = None;
        let mut data: [Option<Kernel2D>; 8] = Default::default();
        let undefined = |what: &str| CpmError::Plan(format!("{what} is read before it is written"));
        for (i, m) in self.ops.iter().enumerate() {
            let read = |o: Operand,
                        nb: &Option<Kernel2D>,
                        op: &Option<Kernel2D>,
                        data: &[Option<Kernel2D>; 8]| {
                match o {
                    Operand::Op => op.clone().ok_or_else(|| undefined("op")),
                    Operand::Neighbor => nb.clone().ok_or_else(|| undefined("nb")),
                    Operand::Data(d) => data
                        .get(d as usize)
                        .cloned()
                        .flatten()
                        .ok_or_else(|| undefined(&format!("d{d}"))),
                    Operand::Adj(dir) => nb
                        .as_ref()
                        .map(|k| k.shifted(dir))
                        .ok_or_else(|| undefined("nb")),
                }
            };
            let (src, dst, sign) = match *m {
                MacroOp::Copy { src, dst } => (src, dst, 0),
                MacroOp::Add { src, dst } => (src, dst, 1),
                MacroOp::Sub { src, dst } => (src, dst, -1),
                MacroOp::LoadImmediate { value: 0, dst } => {
                    let slot = match dst {
                        Dest::Op => &mut op,
                        Dest::Neighbor => &mut nb,
                        Dest::Data(d) => &mut data[d as usize % 8],
                    };
                    *slot = Some(Kernel2D::zero());
                    continue;
                }
                other => {
                    return Err(CpmError::Plan(format!(
                        "step {i}: {other:?} has no kernel meaning"
                    )))
                }
            };
            let s = read(src, &nb, &op, &data)?;
            let v = if sign == 0 {
                s
            } else {
                &read(dst.into(), &nb, &op, &data)? + &s.scaled(sign)
            };
            match dst {
                Dest::Op => op = Some(v),
                Dest::Neighbor => nb = Some(v),
                Dest::Data(d) if (d as usize) < 8 => data[d as usize] = Some(v),
                Dest::Data(d) => return Err(CpmError::Plan(format!("no data register {d}"))),
            }
        }
        op.ok_or_else(|| CpmError::Plan("plan never writes op".into()))
    }

    /// Checks the plan computes `k`.
    pub fn validate(&self, k: &Kernel2D) -> Result<()> {
        let got = self.evaluate()?;
        if &got != k {
            return Err(CpmError::Plan(format!(
                "plan computes {got}, kernel is {k}"
            )));
        }
        Ok(())
    }

    /// Largest distance, per axis, any value travels during the plan.
    pub fn reach(&self) -> (usize, usize) {
        let (mut x, mut y) = (0, 0);
        for m in &self.ops {
            let src = match *m {
                MacroOp::Copy { src, .. } | MacroOp::Add { src, .. } | MacroOp::Sub { src, .. } => {
                    src
                }
                _ => continue,
            };
            match src {
                Operand::Adj(Direction::Left | Direction::Right) => x += 1,
                Operand::Adj(Direction::Top | Direction::Bottom) => y += 1,
                _ => {}
            }
        }
        (x, y)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(t: &[i64]) -> Kernel1D {
        Kernel1D::new(t.to_vec()).unwrap()
    }

    #[test]
    fn sum_and_composition_identities() {
        assert_eq!(&k(&[1]) + &k(&[1, 0, 0]), k(&[1, 1, 0]));
        assert_eq!(k(&[1, 1, 0]).compose(&k(&[0, 1, 1])), k(&[1, 2, 1]));
        assert_eq!(
            &k(&[1, 1, 1]).compose(&k(&[1, 1, 1])) + &k(&[1]),
            k(&[1, 2, 4, 2, 1])
        );
    }

    #[test]
    fn separable_binomial() {
        let g = Kernel2D::row(&k(&[1, 1, 0]))
            .compose(&Kernel2D::row(&k(&[0, 1, 1])))
            .compose(&Kernel2D::column(&k(&[0, 1, 1])))
            .compose(&Kernel2D::column(&k(&[1, 1, 0])));
        let want = Kernel2D::new(vec![vec![1, 2, 1], vec![2, 4, 2], vec![1, 2, 1]]).unwrap();
        assert_eq!(g, want);
    }

    #[test]
    fn padding_does_not_affect_equality() {
        assert_eq!(k(&[0, 0, 3, 0, 0]), k(&[3]));
        assert_ne!(k(&[0, 3, 1]), k(&[3]));
    }

    #[test]
    fn builtin_plans_compute_their_kernels() {
        LocalPlan::smooth3()
            .validate(&Kernel2D::row(&k(&[1, 2, 1])))
            .unwrap();
        LocalPlan::smooth5()
            .validate(&Kernel2D::row(&k(&[1, 2, 4, 2, 1])))
            .unwrap();
        let g = Kernel2D::new(vec![vec![1, 2, 1], vec![2, 4, 2], vec![1, 2, 1]]).unwrap();
        LocalPlan::smooth3x3().validate(&g).unwrap();
        assert_eq!(
            (LocalPlan::smooth5().len(), LocalPlan::smooth3x3().len()),
            (6, 8)
        );
    }

    #[test]
    fn wrong_plan_is_rejected() {
        let e = LocalPlan::smooth3().validate(&Kernel2D::row(&k(&[1, 1, 1])));
        assert!(matches!(e, Err(CpmError::Plan(_))));
    }

    #[test]
    fn direct_plan_handles_signed_taps() {
        let lap = Kernel2D::new(vec![vec![0, 1, 0], vec![1, -4, 1], vec![0, 1, 0]]).unwrap();
        LocalPlan::direct(&lap).validate(&lap).unwrap();
        let skew = Kernel2D::row(&k(&[2, 0, -1, 0, 0]));
        LocalPlan::direct(&skew).validate(&skew).unwrap();
    }
}
