// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use cpm_logic::{general_decode, BitVector, DecoderInput};
use serde::Serialize;

use crate::error::{CpmError, Result};
use crate::ledger::CycleLedger;
use crate::topology::{ElementAddress, Topology};

/// One (start, end, carry) activation triple along an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Axis {
    pub start: usize,
    pub end: usize,
    pub carry: usize,
}

impl Axis {
    pub fn new(start: usize, end: usize, carry: usize) -> Axis {
        Axis { start, end, carry }
    }

    /// Every element of an axis of length `n`.
    pub fn all(n: usize) -> Axis {
        Axis::new(0, n.saturating_sub(1), 1)
    }

    pub fn single(i: usize) -> Axis {
        Axis::new(i, i, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    pub matched: Vec<ElementAddress>,
    pub count: usize,
}

impl MatchReport {
    pub fn linear(&self) -> Vec<usize> {
        self.matched.iter().map(|a| a.linear).collect()
    }
}

const CACHE_LIMIT: usize = 4096;

/// Control unit shared by every memory type: holds the current activation
/// mask, drives the general decoder, aggregates match lines and keeps the
/// cycle ledger.
#[derive(Debug, Clone)]
pub struct Controller {
    topology: Topology,
    mask: BitVector,
    ledger: CycleLedger,
    // Decoder outputs are pure functions of their inputs; caching them only
    // saves host time.
    cache: HashMap<(usize, Axis), BitVector>,
}

impl Controller {
    pub fn new(topology: Topology) -> Result<Controller> {
        let n = topology.len();
        if n == 0 {
            return Err(CpmError::Config(
                "array must have at least one element".into(),
            ));
        }
        if n > 1 << 24 {
            return Err(CpmError::Config(format!(
                "{n} elements exceeds the 2^24 limit"
            )));
        }
        Ok(Controller {
            topology,
            mask: BitVector::zeros(n),
            ledger: CycleLedger::default(),
            cache: HashMap::new(),
        })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn len(&self) -> usize {
        self.topology.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mask(&self) -> &BitVector {
        &self.mask
    }

    pub fn ledger(&self) -> CycleLedger {
        self.ledger
    }

    pub fn charge_macro(&mut self, n: u64) {
        self.ledger.macro_cycles += n;
    }

    pub fn charge_micro(&mut self, n: u64) {
        self.ledger.micro_cycles += n;
    }

    pub fn charge_exclusive(&mut self) {
        self.ledger.exclusive_ops += 1;
    }

    fn decode_axis(&mut self, len: usize, axis: Axis) -> Result<BitVector> {
        if axis.carry == 0 {
            return Err(CpmError::Config("carry number must be positive".into()));
        }
        for addr in [axis.start, axis.end] {
            if addr >= len {
                return Err(CpmError::Config(format!(
                    "activation address {addr} out of bounds for {len} elements"
                )));
            }
        }
        if let Some(v) = self.cache.get(&(len, axis)) {
            return Ok(v.clone());
        }
        let width = len.max(axis.carry + 1).next_power_of_two();
        let full = general_decode(DecoderInput {
            start: axis.start,
            end: axis.end,
            carry: axis.carry,
            width,
        })?;
        let v = full.truncated(len);
        if self.cache.len() >= CACHE_LIMIT {
            self.cache.clear();
        }
        self.cache.insert((len, axis), v.clone());
        Ok(v)
    }

    /// Decoder activation over linear addresses. Costs one macro cycle.
    pub fn activate(&mut self, start: usize, end: usize, carry: usize) -> Result<&BitVector> {
        let mask = self.decode_axis(self.len(), Axis::new(start, end, carry))?;
        self.mask = mask;
        self.ledger.macro_cycles += 1;
        self.ledger.activations += 1;
        Ok(&self.mask)
    }

    /// Independent activation per axis of a lattice; the mask is the outer
    /// product of the two axis masks. Costs one macro cycle.
    pub fn activate_2d(&mut self, x: Axis, y: Axis) -> Result<&BitVector> {
        let (nx, ny) = match self.topology {
            Topology::Lattice { nx, ny } => (nx, ny),
            Topology::Line { .. } => {
                return Err(CpmError::Config("2-D activation on a 1-D array".into()))
            }
        };
        let xm = self.decode_axis(nx, x)?;
        let ym = self.decode_axis(ny, y)?;
        let mut mask = BitVector::zeros(nx * ny);
        for yy in ym.iter_ones() {
            for xx in xm.iter_ones() {
                mask.set(yy * nx + xx, true);
            }
        }
        self.mask = mask;
        self.ledger.macro_cycles += 1;
        self.ledger.activations += 1;
        Ok(&self.mask)
    }

    pub fn activate_all(&mut self) -> Result<&BitVector> {
        self.activate(0, self.len() - 1, 1)
    }

    pub fn check_addr(&self, addr: usize) -> Result<()> {
        if addr >= self.len() {
            return Err(CpmError::Address {
                addr,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// Priority-encoder enumeration: one macro cycle per reported element.
    pub fn enumerate(&mut self, lines: &BitVector) -> MatchReport {
        let matched: Vec<_> = lines
            .iter_ones()
            .map(|i| self.topology.address(i))
            .collect();
        self.ledger.macro_cycles += matched.len() as u64;
        MatchReport {
            count: matched.len(),
            matched,
        }
    }

    /// Parallel counter: one macro cycle.
    pub fn count(&mut self, lines: &BitVector) -> usize {
        self.ledger.macro_cycles += 1;
        lines.count_ones()
    }

    /// First priority-encoder output only: one macro cycle.
    pub fn first(&mut self, lines: &BitVector) -> Option<ElementAddress> {
        self.ledger.macro_cycles += 1;
        lines.first_one().map(|i| self.topology.address(i))
    }
}
