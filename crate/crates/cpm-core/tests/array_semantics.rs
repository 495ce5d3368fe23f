// SPDX-License-Identifier: Apache-2.0

use cpm_core::{Pe, PeArray, Topology, UpdatePolicy};
use proptest::prelude::*;

#[derive(Debug, Clone, PartialEq)]
struct Cell(u32);

impl Pe for Cell {
    fn match_line(&self) -> bool {
        self.0 % 2 == 1
    }
}

fn loaded(values: &[u32]) -> PeArray<Cell> {
    let mut a = PeArray::new(Topology::line(values.len()), Cell(0), Cell(0)).unwrap();
    for (i, &v) in values.iter().enumerate() {
        a.exclusive_write(i, |c| c.0 = v).unwrap();
    }
    a
}

fn values(a: &PeArray<Cell>) -> Vec<u32> {
    a.snapshot().iter().map(|c| c.0).collect()
}

#[test]
fn copy_left_is_two_phase() {
    let mut a = loaded(&[10, 11, 12, 13, 14, 15]);
    a.activate(1, 5, 1).unwrap();
    a.broadcast(|_, nb| nb.left().clone());
    assert_eq!(values(&a), vec![10, 10, 11, 12, 13, 14]);

    let mut seq = loaded(&[10, 11, 12, 13, 14, 15]);
    seq.set_policy(UpdatePolicy::InPlace);
    seq.activate(1, 5, 1).unwrap();
    seq.broadcast(|_, nb| nb.left().clone());
    assert_eq!(values(&seq), vec![10; 6]);
}

#[test]
fn empty_mask_broadcast_still_costs() {
    let mut a = loaded(&[1, 2, 3]);
    a.activate(2, 1, 1).unwrap();
    let before = a.ledger();
    a.broadcast(|_, _| Cell(99));
    assert_eq!(values(&a), vec![1, 2, 3]);
    assert_eq!((a.ledger() - before).macro_cycles, 1);
}

#[test]
fn bulk_load_accounting() {
    let a = loaded(&(1..=16).collect::<Vec<_>>());
    assert_eq!(a.ledger().exclusive_ops, 16);
    assert_eq!(a.ledger().macro_cycles, 0);
}

#[test]
fn exclusive_write_between_broadcasts_is_independent() {
    let mut a = loaded(&[0; 8]);
    a.activate(0, 3, 1).unwrap();
    a.broadcast(|c, _| Cell(c.0 + 1));
    a.exclusive_write(6, |c| c.0 = 0xAB).unwrap();
    a.broadcast(|c, _| Cell(c.0 + 1));
    assert_eq!(values(&a), vec![2, 2, 2, 2, 0, 0, 0xAB, 0]);
    assert_eq!(a.exclusive_read(6).unwrap().0, 0xAB);
    assert!(a.exclusive_read(8).is_err());
}

#[test]
fn match_enumeration_costs() {
    let mut a = loaded(&[1, 3, 5, 7]);
    a.activate_all().unwrap();
    let before = a.ledger();
    assert_eq!(a.count_matches(), 4);
    assert_eq!((a.ledger() - before).macro_cycles, 1);
    let r = a.enumerate_matches();
    assert_eq!(r.linear(), vec![0, 1, 2, 3]);
    assert_eq!((a.ledger() - before).macro_cycles, 5);
}

proptest! {
    #[test]
    fn visiting_order_does_not_matter(vals in proptest::collection::vec(0u32..1000, 1..64), seed: u64, start in 0usize..64, len in 0usize..64) {
        let n = vals.len();
        let start = start % n;
        let end = (start + len).min(n - 1);
        let step = |c: &Cell, nb: &cpm_core::Neighbors<'_, Cell>| Cell(c.0 * 3 + nb.left().0 + 2 * nb.right().0);
        let mut a = loaded(&vals);
        let mut b = loaded(&vals);
        b.set_policy(UpdatePolicy::TwoPhaseShuffled(seed));
        for arr in [&mut a, &mut b] {
            arr.activate(start, end, 1).unwrap();
            arr.broadcast(step);
        }
        prop_assert_eq!(values(&a), values(&b));
        // Masked immutability.
        for i in (0..n).filter(|i| *i < start || *i > end) {
            prop_assert_eq!(values(&a)[i], vals[i]);
        }
        prop_assert_eq!(a.ledger(), b.ledger());
    }

    #[test]
    fn ledger_is_additive(k1 in 0usize..5, k2 in 0usize..5) {
        let run = |k: usize, a: &mut PeArray<Cell>| {
            for _ in 0..k {
                a.activate_all().unwrap();
                a.broadcast(|c, _| Cell(c.0 + 1));
                a.count_matches();
            }
        };
        let mut whole = loaded(&[0; 4]);
        run(k1, &mut whole);
        run(k2, &mut whole);
        let mut p1 = loaded(&[0; 4]);
        let base = p1.ledger();
        run(k1, &mut p1);
        let d1 = p1.ledger() - base;
        let mut p2 = loaded(&[0; 4]);
        run(k2, &mut p2);
        let d2 = p2.ledger() - base;
        prop_assert_eq!(whole.ledger(), base + d1 + d2);
    }
}
