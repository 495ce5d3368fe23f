// SPDX-License-Identifier: Apache-2.0

use cpm_searchable::SearchableMemory;
use proptest::prelude::*;

/// End addresses of every (possibly overlapping) masked occurrence.
fn naive(text: &[u8], pat: &[u8], masks: &[u8]) -> Vec<usize> {
    if pat.len() > text.len() {
        return vec![];
    }
    (0..=text.len() - pat.len())
        .filter(|&s| (0..pat.len()).all(|k| text[s + k] & masks[k] == pat[k] & masks[k]))
        .map(|s| s + pat.len() - 1)
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]
    #[test]
    fn agrees_with_naive_scan(
        text in proptest::collection::vec(0u8..4, 1..4096),
        pat in proptest::collection::vec(0u8..4, 1..=32),
        masks in proptest::collection::vec(prop_oneof![Just(0xFFu8), Just(0x01), Just(0x00)], 32),
    ) {
        let masks = &masks[..pat.len()];
        let mut m = SearchableMemory::with_text(&text).unwrap();
        let got = m.find_substring(&pat, Some(masks)).unwrap();
        let want = naive(&text, &pat, masks);
        prop_assert_eq!(got.count, want.len());
        prop_assert_eq!(got.linear(), want);
    }

    #[test]
    fn occurrences_at_any_alignment(shift in 0usize..64, pat in proptest::collection::vec(1u8..=255, 1..8)) {
        let mut text = vec![0u8; 128];
        text[shift..shift + pat.len()].copy_from_slice(&pat);
        let mut m = SearchableMemory::with_text(&text).unwrap();
        let got = m.find_substring(&pat, None).unwrap().linear();
        prop_assert!(got.contains(&(shift + pat.len() - 1)));
    }
}

#[test]
fn match_cycles_do_not_grow_with_text() {
    let pat = b"needle!";
    let mut costs = Vec::new();
    for n in [1024usize, 4096] {
        let text: Vec<u8> = (0..n).map(|i| (i * 7 % 251) as u8).collect();
        let mut m = SearchableMemory::with_text(&text).unwrap();
        m.array_mut().activate_all().unwrap();
        let before = m.ledger();
        m.match_pattern(pat, None).unwrap();
        costs.push((m.ledger() - before).macro_cycles);
    }
    assert_eq!(costs, vec![pat.len() as u64; 2]);
}
