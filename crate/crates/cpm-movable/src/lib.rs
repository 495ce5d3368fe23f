// SPDX-License-Identifier: Apache-2.0

//! Content movable memory.
//!
//! Each PE holds one addressable word and one temporary word. A block of PEs
//! copies its neighbors' words in two broadcasts (word to temp, temp to word),
//! so a region moves by one cell without any serial copying. The object
//! manager keeps data objects packed in a prefix of the array and opens or
//! closes gaps by repeating that one-cell move.

use cpm_core::{CpmError, CycleLedger, Direction, Pe, PeArray, Result, Topology};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MovablePe {
    pub addr_reg: u64,
    /// Only meaningful inside one block move.
    pub temp_reg: u64,
}

impl Pe for MovablePe {}

/// Placement of one object.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObjectEntry {
    pub id: usize,
    pub start: usize,
    pub length: usize,
}

/// Objects in address order, packed from address 0.
#[derive(Debug, Clone, Default)]
pub struct ObjectTable {
    order: Vec<(usize, usize)>,
    next_id: usize,
}

impl ObjectTable {
    pub fn entries(&self) -> Vec<ObjectEntry> {
        let mut start = 0;
        self.order
            .iter()
            .map(|&(id, length)| {
                let e = ObjectEntry { id, start, length };
                start += length;
                e
            })
            .collect()
    }

    pub fn get(&self, id: usize) -> Result<ObjectEntry> {
        self.entries()
            .into_iter()
            .find(|e| e.id == id)
            .ok_or(CpmError::Lookup(id))
    }

    pub fn used(&self) -> usize {
        self.order.iter().map(|&(_, l)| l).sum()
    }

    fn position(&self, id: usize) -> Result<usize> {
        self.order
            .iter()
            .position(|&(i, _)| i == id)
            .ok_or(CpmError::Lookup(id))
    }
}

/// Which way content travels in a block move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftDirection {
    /// Every PE in the range takes its higher-address neighbor's word.
    Left,
    /// Every PE in the range takes its lower-address neighbor's word.
    Right,
}

#[derive(Debug, Clone)]
pub struct MovableMemory {
    array: PeArray<MovablePe>,
    table: ObjectTable,
}

impl MovableMemory {
    pub fn new(n: usize) -> Result<Self> {
        Ok(MovableMemory {
            array: PeArray::new(
                Topology::line(n),
                MovablePe::default(),
                MovablePe::default(),
            )?,
            table: ObjectTable::default(),
        })
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

    pub fn table(&self) -> &ObjectTable {
        &self.table
    }

    pub fn array(&self) -> &PeArray<MovablePe> {
        &self.array
    }

    /// Host-side view of every addressable register; no cycles.
    pub fn cells(&self) -> Vec<u64> {
        self.array.snapshot().iter().map(|p| p.addr_reg).collect()
    }

    pub fn read(&mut self, addr: usize) -> Result<u64> {
        Ok(self.array.exclusive_read(addr)?.addr_reg)
    }

    pub fn write(&mut self, addr: usize, value: u64) -> Result<()> {
        self.array.exclusive_write(addr, |p| p.addr_reg = value)
    }

    /// Activate `[start, end]`, or nothing when the range is empty.
    fn activate_range(&mut self, start: usize, end: usize) -> Result<()> {
        let n = self.len();
        if start <= end {
            self.array.activate(start, end, 1)
        } else if n >= 2 {
            self.array.activate(n - 1, 0, 1)
        } else {
            // A one-cell memory cannot express an empty range; the only caller
            // reaching here overwrites that cell right after.
            self.array.activate(0, 0, 1)
        }
    }

    fn step(&mut self, dir: ShiftDirection) {
        let side = match dir {
            ShiftDirection::Right => Direction::Left,
            ShiftDirection::Left => Direction::Right,
        };
        self.array.broadcast(|p, nb| MovablePe {
            addr_reg: p.addr_reg,
            temp_reg: nb.get(side).0.addr_reg,
        });
        self.array.broadcast(|p, _| MovablePe {
            addr_reg: p.temp_reg,
            temp_reg: p.temp_reg,
        });
    }

    /// Every PE in `[start, end]` takes its neighbor's old word: one
    /// activation plus two broadcasts.
    pub fn shift_block(&mut self, start: usize, end: usize, dir: ShiftDirection) -> Result<()> {
        for a in [start, end] {
            if a >= self.len() {
                return Err(CpmError::Address {
                    addr: a,
                    len: self.len(),
                });
            }
        }
        self.activate_range(start, end)?;
        self.step(dir);
        Ok(())
    }

    /// Repeat a one-cell move `k` times over a held range.
    fn shift_repeated(
        &mut self,
        start: usize,
        end: usize,
        dir: ShiftDirection,
        k: usize,
    ) -> Result<()> {
        self.activate_range(start, end)?;
        for _ in 0..k {
            self.step(dir);
        }
        Ok(())
    }

    /// Open a `k`-cell gap at `pos` by moving `[pos, used)` up by `k`.
    fn open_gap(&mut self, pos: usize, k: usize) -> Result<()> {
        let used = self.table.used();
        if used + k > self.len() {
            return Err(CpmError::Allocation {
                needed: used + k,
                capacity: self.len(),
            });
        }
        self.shift_repeated(pos + 1, used + k - 1, ShiftDirection::Right, k)
    }

    /// Close the `k` cells starting at `pos` by moving `[pos + k, used)` down.
    fn close_gap(&mut self, pos: usize, k: usize) -> Result<()> {
        let used = self.table.used();
        let end = used.checked_sub(2).filter(|&e| e >= pos);
        match end {
            Some(end) => self.shift_repeated(pos, end, ShiftDirection::Left, k),
            None => self.shift_repeated(1, 0, ShiftDirection::Left, k),
        }
    }

    /// Append a new object after the last one.
    pub fn create(&mut self, data: &[u64]) -> Result<usize> {
        let used = self.table.used();
        if used + data.len() > self.len() {
            return Err(CpmError::Allocation {
                needed: used + data.len(),
                capacity: self.len(),
            });
        }
        for (i, &v) in data.iter().enumerate() {
            self.write(used + i, v)?;
        }
        let id = self.table.next_id;
        self.table.next_id += 1;
        self.table.order.push((id, data.len()));
        Ok(id)
    }

    pub fn insert(&mut self, id: usize, offset: usize, data: &[u64]) -> Result<()> {
        let e = self.table.get(id)?;
        if offset > e.length {
            return Err(CpmError::Argument(format!(
                "offset {offset} past object length {}",
                e.length
            )));
        }
        if data.is_empty() {
            return Ok(());
        }
        let pos = e.start + offset;
        self.open_gap(pos, data.len())?;
        for (i, &v) in data.iter().enumerate() {
            self.write(pos + i, v)?;
        }
        let at = self.table.position(id)?;
        self.table.order[at].1 += data.len();
        Ok(())
    }

    pub fn delete(&mut self, id: usize, offset: usize, count: usize) -> Result<()> {
        let e = self.table.get(id)?;
        if offset + count > e.length {
            return Err(CpmError::Argument(format!(
                "delete of {count} cells at offset {offset} exceeds object length {}",
                e.length
            )));
        }
        if count == 0 {
            return Ok(());
        }
        self.close_gap(e.start + offset, count)?;
        let at = self.table.position(id)?;
        self.table.order[at].1 -= count;
        Ok(())
    }

    /// Grow with zero words at the tail, or drop tail words.
    pub fn resize(&mut self, id: usize, new_length: usize) -> Result<()> {
        let e = self.table.get(id)?;
        if new_length >= e.length {
            self.insert(id, e.length, &vec![0; new_length - e.length])
        } else {
            self.delete(id, new_length, e.length - new_length)
        }
    }

    /// Relocate an object so that it starts at `new_start`, which must be an
    /// object boundary of the layout with the object taken out.
    pub fn move_object(&mut self, id: usize, new_start: usize) -> Result<()> {
        let e = self.table.get(id)?;
        let at = self.table.position(id)?;
        let mut rest = self.table.order.clone();
        rest.remove(at);
        let mut boundary = 0;
        let mut slot = None;
        for (i, &(_, l)) in rest.iter().enumerate() {
            if boundary == new_start {
                slot = Some(i);
                break;
            }
            boundary += l;
        }
        if slot.is_none() && boundary == new_start {
            slot = Some(rest.len());
        }
        let slot = slot
            .ok_or_else(|| CpmError::Argument(format!("{new_start} is not an object boundary")))?;
        if slot == at {
            return Ok(());
        }
        let data: Vec<u64> = (e.start..e.start + e.length)
            .map(|a| self.read(a))
            .collect::<Result<_>>()?;
        if !data.is_empty() {
            self.close_gap(e.start, e.length)?;
        }
        self.table.order = rest;
        if !data.is_empty() {
            self.open_gap(new_start, data.len())?;
            for (i, &v) in data.iter().enumerate() {
                self.write(new_start + i, v)?;
            }
        }
        self.table.order.insert(slot, (id, e.length));
        Ok(())
    }

    /// Rewrite every used cell through its neighbors: one right move and one
    /// left move, four broadcasts. A spare cell past the used region carries
    /// the last word; when the array is full that word goes over the
    /// exclusive bus instead.
    pub fn refresh(&mut self) -> Result<()> {
        let used = self.table.used();
        let n = self.len();
        if used == 0 {
            self.shift_repeated(1, 0, ShiftDirection::Right, 1)?;
            return self.shift_repeated(1, 0, ShiftDirection::Left, 1);
        }
        let saved = if used == n {
            Some(self.read(n - 1)?)
        } else {
            None
        };
        let top = used.min(n - 1);
        self.shift_repeated(1, top, ShiftDirection::Right, 1)?;
        self.shift_repeated(0, top - 1, ShiftDirection::Left, 1)?;
        if let Some(v) = saved {
            self.write(n - 1, v)?;
        }
        Ok(())
    }

    /// Host-side view of one object's words; no cycles.
    pub fn peek_object(&self, id: usize) -> Result<Vec<u64>> {
        let e = self.table.get(id)?;
        Ok(self.cells()[e.start..e.start + e.length].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn filled(vals: &[u64]) -> MovableMemory {
        let mut m = MovableMemory::new(vals.len()).unwrap();
        for (i, &v) in vals.iter().enumerate() {
            m.write(i, v).unwrap();
        }
        m
    }

    #[test]
    fn shift_block_right() {
        let mut m = filled(&[1, 2, 3, 4, 5]);
        let before = m.ledger();
        m.shift_block(1, 4, ShiftDirection::Right).unwrap();
        assert_eq!(m.cells(), vec![1, 1, 2, 3, 4]);
        assert_eq!((m.ledger() - before).broadcast_cycles(), 2);
    }

    #[test]
    fn shift_single_cell_left() {
        let mut m = filled(&[1, 2, 3, 4, 5]);
        m.shift_block(2, 2, ShiftDirection::Left).unwrap();
        assert_eq!(m.cells(), vec![1, 2, 4, 4, 5]);
    }

    #[test]
    fn right_then_left_restores_interior() {
        let mut m = filled(&[1, 2, 3, 4, 5, 6]);
        m.shift_block(0, 5, ShiftDirection::Right).unwrap();
        m.shift_block(0, 5, ShiftDirection::Left).unwrap();
        assert_eq!(&m.cells()[1..5], &[2, 3, 4, 5]);
    }

    #[test]
    fn insert_example() {
        let mut m = MovableMemory::new(8).unwrap();
        let a = m.create(&[1, 2]).unwrap();
        let b = m.create(&[9]).unwrap();
        let before = m.ledger();
        m.insert(a, 1, &[7]).unwrap();
        assert_eq!(m.peek_object(a).unwrap(), vec![1, 7, 2]);
        assert_eq!(m.peek_object(b).unwrap(), vec![9]);
        assert_eq!(m.table().get(b).unwrap().start, 3);
        assert_eq!((m.ledger() - before).broadcast_cycles(), 2);
    }

    #[test]
    fn resize_grows_with_zeros() {
        let mut m = MovableMemory::new(8).unwrap();
        let a = m.create(&[1, 2]).unwrap();
        let b = m.create(&[9]).unwrap();
        let before = m.ledger();
        m.resize(a, 5).unwrap();
        assert_eq!((m.ledger() - before).broadcast_cycles(), 6);
        assert_eq!(m.peek_object(a).unwrap(), vec![1, 2, 0, 0, 0]);
        assert_eq!(m.peek_object(b).unwrap(), vec![9]);
    }

    #[test]
    fn delete_nothing_is_free() {
        let mut m = MovableMemory::new(4).unwrap();
        let a = m.create(&[1, 2]).unwrap();
        let before = m.ledger();
        m.delete(a, 1, 0).unwrap();
        assert_eq!(m.ledger(), before);
    }

    #[test]
    fn errors() {
        let mut m = MovableMemory::new(3).unwrap();
        let a = m.create(&[1, 2]).unwrap();
        assert!(matches!(
            m.insert(a, 0, &[5, 6]),
            Err(CpmError::Allocation { .. })
        ));
        assert!(matches!(m.delete(7, 0, 1), Err(CpmError::Lookup(7))));
        assert!(m.shift_block(0, 3, ShiftDirection::Left).is_err());
    }

    #[test]
    fn refresh_costs_four_and_keeps_content() {
        let mut m = MovableMemory::new(5).unwrap();
        let a = m.create(&[4, 5, 6, 7, 8]).unwrap();
        let before = m.ledger();
        m.refresh().unwrap();
        assert_eq!((m.ledger() - before).broadcast_cycles(), 4);
        assert_eq!(m.peek_object(a).unwrap(), vec![4, 5, 6, 7, 8]);

        let mut e = MovableMemory::new(4).unwrap();
        let before = e.ledger();
        e.refresh().unwrap();
        assert_eq!((e.ledger() - before).broadcast_cycles(), 4);
        assert_eq!(e.cells(), vec![0; 4]);
    }
}
