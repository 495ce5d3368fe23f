// SPDX-License-Identifier: Apache-2.0

use cpm_algorithms::{global_limit, sum_1d, sum_2d, threshold, AlgoConfig, Limit};
use cpm_computable::{CmpOp, ExecMode};
use proptest::prelude::*;

proptest! {
    #[test]
    fn sum_matches_oracle(v in prop::collection::vec(0u64..1 << 16, 1..300), m in 1usize..40) {
        let r = sum_1d(&v, m, AlgoConfig::default()).unwrap();
        prop_assert_eq!(r.result, v.iter().sum::<u64>() & 0xFFFF_FFFF);
    }

    #[test]
    fn image_sum_matches_oracle(sx in 1usize..5, sy in 1usize..5, mx in 1usize..5, my in 1usize..5, seed in any::<u64>()) {
        let (nx, ny) = (sx * mx, sy * my);
        let v: Vec<u64> = (0..nx * ny).map(|i| seed.rotate_left(i as u32) % 1000).collect();
        let r = sum_2d(&v, nx, ny, mx, my, AlgoConfig::default()).unwrap();
        prop_assert_eq!(r.result, v.iter().sum::<u64>());
    }

    #[test]
    fn limits_match_oracle(v in prop::collection::vec(0u64..50, 1..200), m in 1usize..20) {
        let mx = *v.iter().max().unwrap();
        let mn = *v.iter().min().unwrap();
        let r = global_limit(&v, m, Limit::Max, AlgoConfig::default()).unwrap().result;
        prop_assert_eq!((r.value, r.address), (mx, v.iter().position(|&x| x == mx).unwrap()));
        let r = global_limit(&v, m, Limit::Min, AlgoConfig::default()).unwrap().result;
        prop_assert_eq!((r.value, r.address), (mn, v.iter().position(|&x| x == mn).unwrap()));
    }

    #[test]
    fn threshold_matches_predicate(v in prop::collection::vec(0u64..20, 1..100), t in 0u64..20) {
        for cmp in CmpOp::ALL {
            let r = threshold(&v, t, cmp, AlgoConfig::default()).unwrap();
            let want: Vec<bool> = v.iter().map(|&x| cmp.eval(x, t)).collect();
            prop_assert_eq!(r.result.count, want.iter().filter(|&&b| b).count());
            prop_assert_eq!(r.result.flags, want);
            prop_assert_eq!(r.ledger.macro_cycles, 3);
        }
    }
}

#[test]
fn sweep_minimum_near_square_root() {
    let v: Vec<u64> = (0..4096).map(|i| i % 7).collect();
    let cost = |m| {
        sum_1d(&v, m, AlgoConfig::default())
            .unwrap()
            .ledger
            .macro_cycles
    };
    let ms = [8, 16, 64, 128, 512];
    let best = ms.iter().copied().min_by_key(|&m| cost(m)).unwrap();
    assert_eq!(best, 64);
}

#[test]
fn sum_serial_and_word_agree() {
    let v: Vec<u64> = (0..50).map(|i| i * 13 % 29).collect();
    let cfg = AlgoConfig {
        width: 16,
        mode: ExecMode::BitSerial,
    };
    let a = sum_1d(&v, 7, cfg).unwrap();
    let b = sum_1d(
        &v,
        7,
        AlgoConfig {
            width: 16,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(a.result, b.result);
    assert_eq!(a.ledger, b.ledger);
}

#[test]
fn threshold_cost_does_not_grow() {
    let small = threshold(&vec![3; 64], 2, CmpOp::Gt, AlgoConfig::default()).unwrap();
    let large = threshold(&vec![3; 8192], 2, CmpOp::Gt, AlgoConfig::default()).unwrap();
    assert_eq!(small.ledger.macro_cycles, large.ledger.macro_cycles);
}
