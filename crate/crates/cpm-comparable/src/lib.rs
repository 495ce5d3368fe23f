// SPDX-License-Identifier: Apache-2.0

//! Content comparable memory.
//!
//! Records are stored one byte per PE, most significant byte leftmost. A
//! multi-byte field is compared against a value by rippling per-byte results
//! from the least significant byte toward the leftmost PE of the field, where
//! the answer lands. Each ripple step is one concurrent broadcast over all
//! records, so the cost depends on the field width only.

use cpm_core::{CpmError, CycleLedger, Direction, MatchReport, Pe, PeArray, Result, Topology};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ComparablePe {
    pub addr_reg: u8,
    pub storage_bit: bool,
}

impl Pe for ComparablePe {
    fn match_line(&self) -> bool {
        self.storage_bit
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
}

impl Predicate {
    pub const ALL: [Predicate; 6] = [
        Predicate::Eq,
        Predicate::Ne,
        Predicate::Lt,
        Predicate::Gt,
        Predicate::Le,
        Predicate::Ge,
    ];

    pub fn eval<T: Ord>(self, a: T, b: T) -> bool {
        match self {
            Predicate::Eq => a == b,
            Predicate::Ne => a != b,
            Predicate::Lt => a < b,
            Predicate::Gt => a > b,
            Predicate::Le => a <= b,
            Predicate::Ge => a >= b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectCode {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfCode {
    UseSelected,
    UseNandCombine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompareStep {
    pub mask: u8,
    pub datum: u8,
    pub cmp: Predicate,
    pub select: SelectCode,
    pub self_code: SelfCode,
    pub update: bool,
}

impl CompareStep {
    /// With a zero storage bit, writes the comparison result.
    pub fn load(cmp: Predicate, datum: u8) -> CompareStep {
        CompareStep {
            mask: 0xFF,
            datum,
            cmp,
            select: SelectCode::Right,
            self_code: SelfCode::UseNandCombine,
            update: true,
        }
    }

    /// Where the byte satisfies `cmp`, take the neighbor's storage bit.
    pub fn propagate(cmp: Predicate, datum: u8, from: SelectCode) -> CompareStep {
        CompareStep {
            select: from,
            self_code: SelfCode::UseSelected,
            ..CompareStep::load(cmp, datum)
        }
    }

    /// Unconditional inversion of the storage bit.
    pub fn invert() -> CompareStep {
        CompareStep {
            mask: 0,
            ..CompareStep::load(Predicate::Eq, 0)
        }
    }
}

/// Whether a step may overwrite the storage bit. Kept separate so that the
/// gating rule can be changed in one place.
#[inline]
pub fn write_gate(update: bool, cmp_result: bool) -> bool {
    update && cmp_result
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldLayout {
    pub record_size: usize,
    pub field_offset: usize,
    pub field_width: usize,
}

impl FieldLayout {
    pub fn new(record_size: usize, field_offset: usize, field_width: usize) -> FieldLayout {
        FieldLayout {
            record_size,
            field_offset,
            field_width,
        }
    }

    /// A record holding a single field.
    pub fn packed(width: usize) -> FieldLayout {
        FieldLayout::new(width, 0, width)
    }

    fn validate(&self, n: usize) -> Result<usize> {
        if self.field_width == 0 || self.field_width > 8 {
            return Err(CpmError::Config(format!(
                "field width {} outside 1..=8 bytes",
                self.field_width
            )));
        }
        if self.field_offset + self.field_width > self.record_size {
            return Err(CpmError::Config("field does not fit in its record".into()));
        }
        if !n.is_multiple_of(self.record_size) {
            return Err(CpmError::Config(format!(
                "{n} elements is not a whole number of {}-byte records",
                self.record_size
            )));
        }
        Ok(n / self.record_size)
    }

    fn max_value(&self) -> u64 {
        if self.field_width == 8 {
            u64::MAX
        } else {
            (1u64 << (8 * self.field_width)) - 1
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComparableMemory {
    array: PeArray<ComparablePe>,
}

impl ComparableMemory {
    pub fn new(n: usize) -> Result<Self> {
        Ok(ComparableMemory {
            array: PeArray::new(
                Topology::line(n),
                ComparablePe::default(),
                ComparablePe::default(),
            )?,
        })
    }

    pub fn with_bytes(bytes: &[u8]) -> Result<Self> {
        let mut m = Self::new(bytes.len().max(1))?;
        for (i, &b) in bytes.iter().enumerate() {
            m.array.exclusive_write(i, |p| p.addr_reg = b)?;
        }
        Ok(m)
    }

    /// One record per value, each `layout.record_size` bytes with the field
    /// stored big-endian and the rest zero.
    pub fn with_field(layout: FieldLayout, values: &[u64]) -> Result<Self> {
        let mut m = Self::new((values.len() * layout.record_size).max(1))?;
        m.load_field(layout, values)?;
        Ok(m)
    }

    pub fn load_field(&mut self, layout: FieldLayout, values: &[u64]) -> Result<()> {
        let records = layout.validate(self.len())?;
        if values.len() > records {
            return Err(CpmError::Argument(format!(
                "{} values for {records} records",
                values.len()
            )));
        }
        for (r, &v) in values.iter().enumerate() {
            if v > layout.max_value() {
                return Err(CpmError::Argument(format!(
                    "{v} does not fit in {} bytes",
                    layout.field_width
                )));
            }
            let be = v.to_be_bytes();
            let base = r * layout.record_size + layout.field_offset;
            for k in 0..layout.field_width {
                let b = be[8 - layout.field_width + k];
                self.array.exclusive_write(base + k, |p| p.addr_reg = b)?;
            }
        }
        Ok(())
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

    pub fn array(&self) -> &PeArray<ComparablePe> {
        &self.array
    }

    pub fn array_mut(&mut self) -> &mut PeArray<ComparablePe> {
        &mut self.array
    }

    pub fn storage_bits(&self) -> Vec<bool> {
        self.array
            .snapshot()
            .iter()
            .map(|p| p.storage_bit)
            .collect()
    }

    pub fn compare_step(&mut self, step: CompareStep) {
        let dir = match step.select {
            SelectCode::Left => Direction::Left,
            SelectCode::Right => Direction::Right,
        };
        self.array.broadcast(|p, nb| {
            let cmp = step.cmp.eval(p.addr_reg & step.mask, step.datum);
            let candidate = match step.self_code {
                SelfCode::UseSelected => nb.get(dir).0.storage_bit,
                SelfCode::UseNandCombine => !(cmp && p.storage_bit),
            };
            ComparablePe {
                addr_reg: p.addr_reg,
                storage_bit: if write_gate(step.update, cmp) {
                    candidate
                } else {
                    p.storage_bit
                },
            }
        });
    }

    /// Clears the storage bit of every active PE.
    pub fn reset_storage(&mut self) {
        self.array.broadcast(|p, _| ComparablePe {
            addr_reg: p.addr_reg,
            storage_bit: false,
        });
    }

    /// Leaves the predicate result in the storage bit of the leftmost PE of
    /// every record's field, with exactly those PEs active. Costs at most
    /// `4 * field_width` macro cycles whatever the record count.
    pub fn evaluate_field_predicate(
        &mut self,
        layout: FieldLayout,
        cmp: Predicate,
        value: u64,
    ) -> Result<()> {
        let records = layout.validate(self.len())?;
        if value > layout.max_value() {
            return Err(CpmError::Argument(format!(
                "{value} does not fit in {} bytes",
                layout.field_width
            )));
        }
        let w = layout.field_width;
        let be = value.to_be_bytes();
        let digit = |k: usize| be[8 - w + k];
        let (base, invert) = match cmp {
            Predicate::Eq | Predicate::Lt | Predicate::Gt => (cmp, false),
            Predicate::Ne => (Predicate::Eq, true),
            Predicate::Ge => (Predicate::Lt, true),
            Predicate::Le => (Predicate::Gt, true),
        };
        let last_record = (records - 1) * layout.record_size;
        for k in (0..w).rev() {
            let pos = layout.field_offset + k;
            self.array
                .activate(pos, last_record + pos, layout.record_size)?;
            self.reset_storage();
            if k == w - 1 {
                self.compare_step(CompareStep::load(base, digit(k)));
                continue;
            }
            if base != Predicate::Eq {
                // Strictly ordered here decides; a tie defers to the less
                // significant suffix on the right.
                self.compare_step(CompareStep::load(base, digit(k)));
            }
            self.compare_step(CompareStep::propagate(
                Predicate::Eq,
                digit(k),
                SelectCode::Right,
            ));
        }
        if invert {
            self.compare_step(CompareStep::invert());
        }
        Ok(())
    }

    /// Leftmost field PE of each satisfying record.
    pub fn field_predicate(
        &mut self,
        layout: FieldLayout,
        cmp: Predicate,
        value: u64,
    ) -> Result<MatchReport> {
        self.evaluate_field_predicate(layout, cmp, value)?;
        Ok(self.array.enumerate_matches())
    }

    pub fn count_field_predicate(
        &mut self,
        layout: FieldLayout,
        cmp: Predicate,
        value: u64,
    ) -> Result<usize> {
        self.evaluate_field_predicate(layout, cmp, value)?;
        Ok(self.array.count_matches())
    }

    /// Bin counts over lower-closed intervals: `(-inf, l1), [l1, l2), ...,
    /// [lM, +inf)`.
    pub fn histogram(&mut self, layout: FieldLayout, limits: &[u64]) -> Result<Vec<usize>> {
        let records = layout.validate(self.len())?;
        if limits.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CpmError::Argument(
                "histogram limits must be strictly increasing".into(),
            ));
        }
        let mut below = Vec::with_capacity(limits.len() + 1);
        for &l in limits {
            below.push(self.count_field_predicate(layout, Predicate::Lt, l)?);
        }
        below.push(records);
        let mut prev = 0;
        Ok(below
            .into_iter()
            .map(|c| {
                let bin = c - prev;
                prev = c;
                bin
            })
            .collect())
    }
}
