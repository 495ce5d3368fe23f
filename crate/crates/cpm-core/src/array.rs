// SPDX-License-Identifier: Apache-2.0

use cpm_logic::BitVector;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::control::{Controller, MatchReport};
use crate::error::Result;
use crate::ledger::CycleLedger;
use crate::topology::{Direction, ElementAddress, Topology};

/// Register file of one processing element.
pub trait Pe: Clone + std::fmt::Debug {
    /// Whether this PE asserts its match line.
    fn match_line(&self) -> bool {
        false
    }
}

/// Pre-step view of the neighbors of the PE being updated.
pub struct Neighbors<'a, P> {
    topology: Topology,
    index: usize,
    state: &'a [P],
    fill: &'a P,
}

impl<'a, P> Neighbors<'a, P> {
    /// Neighbor state in `dir` and whether the read fell past an edge.
    pub fn get(&self, dir: Direction) -> (&'a P, bool) {
        match self.topology.neighbor(self.index, dir) {
            Some(j) => (&self.state[j], false),
            None => (self.fill, true),
        }
    }

    pub fn left(&self) -> &'a P {
        self.get(Direction::Left).0
    }

    pub fn right(&self) -> &'a P {
        self.get(Direction::Right).0
    }

    pub fn index(&self) -> usize {
        self.index
    }
}

/// How a broadcast visits PEs on the host.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdatePolicy {
    /// All PEs read pre-step state, then all writes commit.
    TwoPhase,
    /// Two-phase with a seeded random visiting order.
    TwoPhaseShuffled(u64),
    /// Writes land immediately in ascending order. Not the hardware
    /// contract; kept to demonstrate why two phases are needed.
    InPlace,
}

#[derive(Debug, Clone)]
pub struct PeArray<P: Pe> {
    pes: Vec<P>,
    fill: P,
    ctl: Controller,
    policy: UpdatePolicy,
}

impl<P: Pe> PeArray<P> {
    pub fn new(topology: Topology, init: P, fill: P) -> Result<Self> {
        let ctl = Controller::new(topology)?;
        Ok(PeArray {
            pes: vec![init; topology.len()],
            fill,
            ctl,
            policy: UpdatePolicy::TwoPhase,
        })
    }

    pub fn len(&self) -> usize {
        self.pes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pes.is_empty()
    }

    pub fn topology(&self) -> Topology {
        self.ctl.topology()
    }

    pub fn controller(&self) -> &Controller {
        &self.ctl
    }

    pub fn controller_mut(&mut self) -> &mut Controller {
        &mut self.ctl
    }

    pub fn ledger(&self) -> CycleLedger {
        self.ctl.ledger()
    }

    pub fn set_policy(&mut self, policy: UpdatePolicy) {
        self.policy = policy;
    }

    pub fn set_fill(&mut self, fill: P) {
        self.fill = fill;
    }

    /// Read-only snapshot for oracle comparison; costs nothing.
    pub fn snapshot(&self) -> &[P] {
        &self.pes
    }

    pub fn activate(&mut self, start: usize, end: usize, carry: usize) -> Result<()> {
        self.ctl.activate(start, end, carry).map(|_| ())
    }

    pub fn activate_all(&mut self) -> Result<()> {
        self.ctl.activate_all().map(|_| ())
    }

    /// One concurrent step over the active PEs. Costs one macro cycle.
    pub fn broadcast<F>(&mut self, step: F)
    where
        F: Fn(&P, &Neighbors<'_, P>) -> P,
    {
        self.ctl.charge_macro(1);
        let active: Vec<usize> = self.ctl.mask().iter_ones().collect();
        let topology = self.ctl.topology();
        match self.policy {
            UpdatePolicy::InPlace => {
                for i in active {
                    let nb = Neighbors {
                        topology,
                        index: i,
                        state: &self.pes,
                        fill: &self.fill,
                    };
                    let next = step(&self.pes[i], &nb);
                    self.pes[i] = next;
                }
            }
            UpdatePolicy::TwoPhase | UpdatePolicy::TwoPhaseShuffled(_) => {
                let mut order = active;
                if let UpdatePolicy::TwoPhaseShuffled(seed) = self.policy {
                    order.shuffle(&mut Xoshiro256PlusPlus::seed_from_u64(seed));
                }
                let staged: Vec<(usize, P)> = order
                    .into_iter()
                    .map(|i| {
                        let nb = Neighbors {
                            topology,
                            index: i,
                            state: &self.pes,
                            fill: &self.fill,
                        };
                        (i, step(&self.pes[i], &nb))
                    })
                    .collect();
                for (i, p) in staged {
                    self.pes[i] = p;
                }
            }
        }
    }

    /// Exclusive-bus read of one PE. Costs one exclusive op.
    pub fn exclusive_read(&mut self, addr: usize) -> Result<&P> {
        self.ctl.check_addr(addr)?;
        self.ctl.charge_exclusive();
        Ok(&self.pes[addr])
    }

    /// Exclusive-bus write of one PE. Costs one exclusive op.
    pub fn exclusive_write(&mut self, addr: usize, f: impl FnOnce(&mut P)) -> Result<()> {
        self.ctl.check_addr(addr)?;
        self.ctl.charge_exclusive();
        f(&mut self.pes[addr]);
        Ok(())
    }

    /// Match lines: PEs that assert theirs and are currently active.
    pub fn match_lines(&self) -> BitVector {
        BitVector::from_indices(
            self.len(),
            self.ctl
                .mask()
                .iter_ones()
                .filter(|&i| self.pes[i].match_line()),
        )
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
}
