// SPDX-License-Identifier: Apache-2.0

use cpm_algorithms::{template_search_1d, template_search_2d, AlgoConfig};
use proptest::prelude::*;

fn sad_1d(x: &[u64], t: &[u64]) -> Vec<u64> {
    (0..=x.len() - t.len())
        .map(|p| {
            t.iter()
                .enumerate()
                .map(|(k, &v)| x[p + k].abs_diff(v))
                .sum()
        })
        .collect()
}

fn sad_2d(img: &[u64], nx: usize, ny: usize, t: &[u64], mx: usize, my: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for qy in 0..=ny - my {
        for qx in 0..=nx - mx {
            let mut s = 0;
            for j in 0..my {
                for i in 0..mx {
                    s += img[(qy + j) * nx + qx + i].abs_diff(t[j * mx + i]);
                }
            }
            out.push(s);
        }
    }
    out
}

proptest! {
    #[test]
    fn one_dimensional_sads(x in prop::collection::vec(0u64..16, 1..120), m in 1usize..10, seed in any::<u64>()) {
        let m = m.min(x.len());
        let t: Vec<u64> = (0..m).map(|i| seed.rotate_left(7 * i as u32) % 16).collect();
        let r = template_search_1d(&x, &t, AlgoConfig::default()).unwrap();
        let want = sad_1d(&x, &t);
        let min = *want.iter().min().unwrap();
        prop_assert_eq!(r.result.best, want.iter().position(|&s| s == min).unwrap());
        prop_assert_eq!(r.result.sad, want);
    }

    #[test]
    fn two_dimensional_sads(nx in 1usize..12, ny in 1usize..10, mx in 1usize..5, my in 1usize..5, seed in any::<u64>()) {
        let (mx, my) = (mx.min(nx), my.min(ny));
        let img: Vec<u64> = (0..nx * ny).map(|i| seed.rotate_left(i as u32 * 5) % 8).collect();
        let t: Vec<u64> = (0..mx * my).map(|i| seed.rotate_right(i as u32 * 3) % 8).collect();
        let r = template_search_2d(&img, nx, ny, &t, mx, my, AlgoConfig::default()).unwrap();
        prop_assert_eq!(r.result.sad, sad_2d(&img, nx, ny, &t, mx, my));
    }
}

#[test]
fn cycles_independent_of_data_length() {
    let t = [3, 1, 4, 1, 5];
    let x = |n: usize| (0..n).map(|i| (i * 31 % 17) as u64).collect::<Vec<_>>();
    let a = template_search_1d(&x(256), &t, AlgoConfig::default()).unwrap();
    let b = template_search_1d(&x(1024), &t, AlgoConfig::default()).unwrap();
    assert_eq!(a.ledger.macro_cycles, b.ledger.macro_cycles);
    assert!(a.ledger.macro_cycles <= 4 * 5 * 5);
}

#[test]
fn image_cycles_independent_of_image_size() {
    let t: Vec<u64> = (0..12).collect();
    let img = |n: usize| (0..n * n).map(|i| (i * 7 % 13) as u64).collect::<Vec<_>>();
    let a = template_search_2d(&img(16), 16, 16, &t, 4, 3, AlgoConfig::default()).unwrap();
    let b = template_search_2d(&img(32), 32, 32, &t, 4, 3, AlgoConfig::default()).unwrap();
    assert_eq!(a.ledger.macro_cycles, b.ledger.macro_cycles);
    assert!(a.ledger.macro_cycles <= 6 * 4 * 4 * 3);
}
