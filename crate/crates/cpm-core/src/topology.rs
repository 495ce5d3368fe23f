// SPDX-License-Identifier: Apache-2.0

use crate::error::{CpmError, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Topology {
    Line {
        n: usize,
    },
    /// Row-major lattice; `linear = y * nx + x`.
    Lattice {
        nx: usize,
        ny: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Lower x (lower linear address on a line).
    Left,
    /// Higher x.
    Right,
    /// Lower y.
    Top,
    /// Higher y.
    Bottom,
}

impl Direction {
    pub fn opposite(self) -> Direction {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
            Direction::Top => Direction::Bottom,
            Direction::Bottom => Direction::Top,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ElementAddress {
    pub linear: usize,
    pub x: usize,
    pub y: usize,
}

impl Topology {
    pub fn line(n: usize) -> Topology {
        Topology::Line { n }
    }

    pub fn lattice(nx: usize, ny: usize) -> Topology {
        Topology::Lattice { nx, ny }
    }

    pub fn len(&self) -> usize {
        match *self {
            Topology::Line { n } => n,
            Topology::Lattice { nx, ny } => nx * ny,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row length (the whole array for a line).
    pub fn nx(&self) -> usize {
        match *self {
            Topology::Line { n } => n,
            Topology::Lattice { nx, .. } => nx,
        }
    }

    pub fn ny(&self) -> usize {
        match *self {
            Topology::Line { .. } => 1,
            Topology::Lattice { ny, .. } => ny,
        }
    }

    pub fn address(&self, linear: usize) -> ElementAddress {
        let nx = self.nx().max(1);
        ElementAddress {
            linear,
            x: linear % nx,
            y: linear / nx,
        }
    }

    pub fn linear(&self, x: usize, y: usize) -> Result<usize> {
        if x >= self.nx() || y >= self.ny() {
            return Err(CpmError::Address {
                addr: y * self.nx() + x,
                len: self.len(),
            });
        }
        Ok(y * self.nx() + x)
    }

    pub fn supports(&self, dir: Direction) -> bool {
        matches!(self, Topology::Lattice { .. })
            || matches!(dir, Direction::Left | Direction::Right)
    }

    /// Linear address of the neighbor of `i` in `dir`, `None` past an edge.
    #[inline]
    pub fn neighbor(&self, i: usize, dir: Direction) -> Option<usize> {
        if let Topology::Line { n } = *self {
            return match dir {
                Direction::Left => (i > 0).then(|| i - 1),
                Direction::Right => (i + 1 < n).then_some(i + 1),
                _ => None,
            };
        }
        let nx = self.nx();
        match dir {
            Direction::Left => (!i.is_multiple_of(nx)).then(|| i - 1),
            Direction::Right => (i % nx != nx - 1).then_some(i + 1),
            Direction::Top => (i >= nx).then(|| i - nx),
            Direction::Bottom => (i + nx < self.len()).then_some(i + nx),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_neighbors_respect_row_edges() {
        let t = Topology::lattice(4, 3);
        assert_eq!(t.neighbor(4, Direction::Left), None);
        assert_eq!(t.neighbor(3, Direction::Right), None);
        assert_eq!(t.neighbor(5, Direction::Top), Some(1));
        assert_eq!(t.neighbor(9, Direction::Bottom), None);
        assert_eq!(
            t.address(6),
            ElementAddress {
                linear: 6,
                x: 2,
                y: 1
            }
        );
    }
}
