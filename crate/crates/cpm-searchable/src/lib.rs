// SPDX-License-Identifier: Apache-2.0

//! Content searchable memory.
//!
//! Every PE compares its byte against a broadcast datum under a mask. The
//! result either replaces the storage bit or is AND-ed with the predecessor's
//! storage bit, so a pattern of `M` bytes is matched everywhere in `M` steps
//! and the storage bit ends up set at the last byte of each occurrence.

use cpm_core::{
    Axis, CpmError, CycleLedger, Direction, MatchReport, Pe, PeArray, Result, Topology,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchablePe {
    pub addr_reg: u8,
    pub storage_bit: bool,
}

impl Pe for SearchablePe {
    fn match_line(&self) -> bool {
        self.storage_bit
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpCode {
    Equal,
    NotEqual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStep {
    pub mask: u8,
    pub datum: u8,
    pub cmp: CmpCode,
    /// Store the comparison alone instead of chaining it.
    pub self_code: bool,
}

impl SearchStep {
    pub fn first(datum: u8, mask: u8) -> SearchStep {
        SearchStep {
            mask,
            datum,
            cmp: CmpCode::Equal,
            self_code: true,
        }
    }

    pub fn chained(datum: u8, mask: u8) -> SearchStep {
        SearchStep {
            self_code: false,
            ..SearchStep::first(datum, mask)
        }
    }
}

/// Which neighbor a chained step reads.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ChainDirection {
    /// Text runs toward higher addresses, so byte `i` of a pattern follows
    /// byte `i - 1` one address lower.
    #[default]
    LowerAddress,
    HigherAddress,
}

#[derive(Debug, Clone)]
pub struct SearchableMemory {
    array: PeArray<SearchablePe>,
    chain: ChainDirection,
}

impl SearchableMemory {
    pub fn new(n: usize) -> Result<Self> {
        Ok(SearchableMemory {
            array: PeArray::new(
                Topology::line(n),
                SearchablePe::default(),
                SearchablePe::default(),
            )?,
            chain: ChainDirection::default(),
        })
    }

    /// A memory holding `text` from address 0, loaded over the exclusive bus.
    pub fn with_text(text: &[u8]) -> Result<Self> {
        let mut m = Self::new(text.len().max(1))?;
        m.load(0, text)?;
        Ok(m)
    }

    pub fn set_chain_direction(&mut self, chain: ChainDirection) {
        self.chain = chain;
    }

    pub fn len(&self) -> usize {
        self.array.len()
    }

    pub fn is_empty(&self) -> bool {
        self.array.is_empty()
    }

    pub fn ledger(&self) -> CycleLedger {
        self.array.ledger()
    }

    pub fn array(&self) -> &PeArray<SearchablePe> {
        &self.array
    }

    pub fn array_mut(&mut self) -> &mut PeArray<SearchablePe> {
        &mut self.array
    }

    pub fn load(&mut self, offset: usize, bytes: &[u8]) -> Result<()> {
        for (i, &b) in bytes.iter().enumerate() {
            self.array.exclusive_write(offset + i, |p| p.addr_reg = b)?;
        }
        Ok(())
    }

    pub fn storage_bits(&self) -> Vec<bool> {
        self.array
            .snapshot()
            .iter()
            .map(|p| p.storage_bit)
            .collect()
    }

    /// One concurrent compare over the active PEs.
    pub fn match_step(&mut self, step: SearchStep) {
        let pred = match self.chain {
            ChainDirection::LowerAddress => Direction::Left,
            ChainDirection::HigherAddress => Direction::Right,
        };
        self.array.broadcast(|p, nb| {
            let eq = p.addr_reg & step.mask == step.datum;
            let cmp = eq == (step.cmp == CmpCode::Equal);
            let storage_bit = if step.self_code {
                cmp
            } else {
                cmp && nb.get(pred).0.storage_bit
            };
            SearchablePe {
                addr_reg: p.addr_reg,
                storage_bit,
            }
        });
    }

    /// The match phase of a substring search: exactly `pattern.len()` steps
    /// over the current activation.
    pub fn match_pattern(&mut self, pattern: &[u8], masks: Option<&[u8]>) -> Result<()> {
        if pattern.is_empty() {
            return Err(CpmError::Argument("pattern must not be empty".into()));
        }
        if let Some(m) = masks {
            if m.len() != pattern.len() {
                return Err(CpmError::Argument(format!(
                    "{} masks for a pattern of {} bytes",
                    m.len(),
                    pattern.len()
                )));
            }
        }
        let mask = |i: usize| masks.map_or(0xFF, |m| m[i]);
        // Chained steps walk the pattern in the order the chain reads it.
        let order: Vec<usize> = match self.chain {
            ChainDirection::LowerAddress => (0..pattern.len()).collect(),
            ChainDirection::HigherAddress => (0..pattern.len()).rev().collect(),
        };
        for (n, &i) in order.iter().enumerate() {
            let step = if n == 0 {
                SearchStep::first(pattern[i] & mask(i), mask(i))
            } else {
                SearchStep::chained(pattern[i] & mask(i), mask(i))
            };
            self.match_step(step);
        }
        Ok(())
    }

    /// Addresses of the last byte (in chain order) of every occurrence.
    pub fn find_substring(&mut self, pattern: &[u8], masks: Option<&[u8]>) -> Result<MatchReport> {
        if pattern.is_empty() {
            return Err(CpmError::Argument("pattern must not be empty".into()));
        }
        self.array.activate_all()?;
        self.match_pattern(pattern, masks)?;
        Ok(self.array.enumerate_matches())
    }

    /// Two-byte characters stored big-endian from address 0. Reports the
    /// address of the low byte of each occurrence's last character.
    pub fn find_substring_u16(&mut self, pattern: &[u16]) -> Result<MatchReport> {
        let bytes: Vec<u8> = pattern.iter().flat_map(|c| c.to_be_bytes()).collect();
        if bytes.is_empty() {
            return Err(CpmError::Argument("pattern must not be empty".into()));
        }
        self.array.activate_all()?;
        self.match_pattern(&bytes, None)?;
        // Only character-aligned ends may report.
        if self.len() >= 2 {
            self.array.activate(1, self.len() - 1, 2)?;
        }
        Ok(self.array.enumerate_matches())
    }

    /// Lookup-table search: each step runs under its own activation.
    pub fn find_structured(&mut self, steps: &[(SearchStep, Axis)]) -> Result<MatchReport> {
        if steps.is_empty() {
            return Err(CpmError::Argument("no search steps".into()));
        }
        for (step, axis) in steps {
            self.array.activate(axis.start, axis.end, axis.carry)?;
            self.match_step(*step);
        }
        Ok(self.array.enumerate_matches())
    }
}
