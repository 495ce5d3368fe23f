// SPDX-License-Identifier: Apache-2.0

use cpm_comparable::{ComparableMemory, FieldLayout, Predicate};
use proptest::prelude::*;

fn layout_strategy() -> impl Strategy<Value = FieldLayout> {
    (1usize..=8, 0usize..3, 0usize..3)
        .prop_map(|(w, pre, post)| FieldLayout::new(pre + w + post, pre, w))
}

fn mask(w: usize) -> u64 {
    if w == 8 {
        u64::MAX
    } else {
        (1 << (8 * w)) - 1
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn six_predicates_match_integer_compare(
        layout in layout_strategy(),
        raw in proptest::collection::vec(any::<u64>(), 1..64),
        pivot_pick in any::<u64>(),
        narrow in any::<bool>(),
    ) {
        let w = layout.field_width;
        // Narrow values force ties in the high bytes.
        let squash = |v: u64| if narrow { (v % 4 * 0x0101_0101_0101_0101) & mask(w) } else { v & mask(w) };
        let values: Vec<u64> = raw.iter().map(|&v| squash(v)).collect();
        let pivot = if pivot_pick % 3 == 0 { values[pivot_pick as usize % values.len()] } else { squash(pivot_pick) };
        for cmp in Predicate::ALL {
            let mut m = ComparableMemory::with_field(layout, &values).unwrap();
            let got = m.field_predicate(layout, cmp, pivot).unwrap().linear();
            let want: Vec<usize> = values
                .iter()
                .enumerate()
                .filter(|(_, &v)| cmp.eval(v, pivot))
                .map(|(r, _)| r * layout.record_size + layout.field_offset)
                .collect();
            prop_assert_eq!(got, want, "{:?} {:?}", cmp, layout);
        }
    }

    #[test]
    fn complements_are_pointwise(values in proptest::collection::vec(0u64..1024, 1..40), pivot in 0u64..1024) {
        let l = FieldLayout::packed(2);
        let bits = |cmp| {
            let mut m = ComparableMemory::with_field(l, &values).unwrap();
            m.evaluate_field_predicate(l, cmp, pivot).unwrap();
            m.storage_bits().into_iter().step_by(2).collect::<Vec<_>>()
        };
        for (a, b) in [(Predicate::Eq, Predicate::Ne), (Predicate::Lt, Predicate::Ge), (Predicate::Gt, Predicate::Le)] {
            let x = bits(a);
            let y: Vec<bool> = bits(b).into_iter().map(|v| !v).collect();
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn histogram_conserves_records(
        values in proptest::collection::vec(0u64..500, 1..80),
        mut limits in proptest::collection::btree_set(0u64..520, 0..6),
    ) {
        let l = FieldLayout::packed(2);
        let limits: Vec<u64> = std::mem::take(&mut limits).into_iter().collect();
        let mut m = ComparableMemory::with_field(l, &values).unwrap();
        let bins = m.histogram(l, &limits).unwrap();
        prop_assert_eq!(bins.iter().sum::<usize>(), values.len());
        let mut want = vec![0usize; limits.len() + 1];
        for v in &values {
            want[limits.iter().filter(|&&x| x <= *v).count()] += 1;
        }
        prop_assert_eq!(bins, want);
    }
}

#[test]
fn cycles_independent_of_record_count() {
    for w in 1..=8 {
        let l = FieldLayout::new(w + 1, 1, w);
        for cmp in Predicate::ALL {
            let mut costs = Vec::new();
            for n in [256usize, 1024] {
                let values: Vec<u64> = (0..n as u64)
                    .map(|i| i.wrapping_mul(0x9E37_79B9_7F4A_7C15) & mask(w))
                    .collect();
                let mut m = ComparableMemory::with_field(l, &values).unwrap();
                let before = m.ledger();
                m.evaluate_field_predicate(l, cmp, values[7]).unwrap();
                costs.push((m.ledger() - before).macro_cycles);
            }
            assert_eq!(costs[0], costs[1]);
            assert!(costs[0] <= 4 * w as u64, "{cmp:?} width {w}: {}", costs[0]);
        }
    }
}
