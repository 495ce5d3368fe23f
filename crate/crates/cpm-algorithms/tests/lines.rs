// SPDX-License-Identifier: Apache-2.0

use cpm_algorithms::{
    build_slope_set, detect_all_lines, detect_line_segment, messenger_path, with_sign_variants,
    AlgoConfig,
};
use proptest::prelude::*;

/// Messenger value computed on the host from the path definition.
fn oracle(img: &[u64], nx: usize, ny: usize, mx: i64, my: i64) -> Vec<Option<i64>> {
    let at = |x: i64, y: i64| -> Option<i64> {
        ((0..nx as i64).contains(&x) && (0..ny as i64).contains(&y))
            .then(|| img[y as usize * nx + x as usize] as i64)
    };
    (0..nx * ny)
        .map(|i| {
            let (x, y) = ((i % nx) as i64, (i / nx) as i64);
            if mx == 0 || my == 0 {
                let (ax, ay) = (mx.signum(), my.signum());
                // The side with positive cross product of (-mx, -my) and the offset.
                let (px, py) = if -mx * ax - (-my) * (-ay) > 0 {
                    (-ay, ax)
                } else {
                    (ay, -ax)
                };
                let mut s = 0;
                for c in 0..=(mx.abs() + my.abs()) {
                    let (cx, cy) = (x + c * ax, y + c * ay);
                    s += at(cx + px, cy + py)? - at(cx - px, cy - py)?;
                }
                Some(s)
            } else {
                messenger_path(mx, my)
                    .iter()
                    .map(|c| at(x + c.dx, y + c.dy).map(|v| v * c.sign as i64))
                    .sum()
            }
        })
        .collect()
}

proptest! {
    #[test]
    fn messenger_matches_host_walk(nx in 1usize..12, ny in 1usize..12, mx in -4i64..=4, my in 0i64..=4, seed in any::<u64>()) {
        prop_assume!((mx, my) != (0, 0));
        let img: Vec<u64> = (0..nx * ny).map(|i| seed.rotate_left(i as u32 * 3) % 10).collect();
        let r = detect_line_segment(&img, nx, ny, mx, my, AlgoConfig::default()).unwrap();
        prop_assert_eq!(r.result, oracle(&img, nx, ny, mx, my));
    }

    #[test]
    fn paths_have_one_cell_per_step(mx in -8i64..=8, my in -8i64..=8) {
        prop_assume!((mx, my) != (0, 0));
        let p = messenger_path(mx, my);
        prop_assert_eq!(p.len() as i64, mx.abs() + my.abs() + 1);
        for w in p.windows(2) {
            prop_assert_eq!((w[0].dx - w[1].dx).abs() + (w[0].dy - w[1].dy).abs(), 1);
        }
    }
}

#[test]
fn left_side_pattern_gives_three() {
    let (nx, ny) = (12, 10);
    let (ox, oy) = (3i64, 4i64);
    let img: Vec<u64> = (0..nx * ny)
        .map(|i| {
            let (x, y) = ((i % nx) as i64 - ox, (i / nx) as i64 - oy);
            (-4 * y + 3 * x > 0) as u64
        })
        .collect();
    let r = detect_line_segment(&img, nx, ny, 4, 3, AlgoConfig::default()).unwrap();
    assert_eq!(r.result[oy as usize * nx + ox as usize], Some(3));
    assert!(r.ledger.macro_cycles <= 2 * 7 + 2);
}

#[test]
fn constant_image_balances() {
    let img = vec![9u64; 100];
    let r = detect_line_segment(&img, 10, 10, 4, 3, AlgoConfig::default()).unwrap();
    assert!(r.result.iter().flatten().all(|&v| v == 0));
}

#[test]
fn horizontal_edge_peaks_on_the_edge_rows() {
    let (nx, ny) = (16, 12);
    let img: Vec<u64> = (0..nx * ny).map(|i| (i / nx < 5) as u64).collect();
    let r = detect_line_segment(&img, nx, ny, 6, 0, AlgoConfig::default()).unwrap();
    let best = r.result.iter().flatten().map(|v| v.abs()).max().unwrap();
    assert_eq!(best, 7);
    for (i, v) in r.result.iter().enumerate() {
        if let Some(v) = v {
            let y = i / nx;
            assert_eq!(v.abs() == best, y == 4 || y == 5, "row {y}");
            assert!(*v >= 0, "bright side is on top");
        }
    }
}

#[test]
fn slope_sets_cover_every_direction() {
    for d in [1u32, 2, 5, 10, 20] {
        let set = with_sign_variants(&build_slope_set(d).unwrap());
        let mut angles: Vec<f64> = set
            .iter()
            .map(|&(x, y)| (y as f64).atan2(x as f64))
            .collect();
        angles.sort_by(f64::total_cmp);
        let gap = angles.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        assert!(angles[0].abs() < 1e-12);
        assert!(
            (std::f64::consts::PI - angles[angles.len() - 1])
                <= std::f64::consts::SQRT_2 / d as f64 + 1e-9
        );
        assert!(
            gap <= std::f64::consts::SQRT_2 / d as f64 + 1e-9,
            "d={d} gap={gap}"
        );
        assert!(set.len() <= 8 * d as usize + 4);
    }
}

#[test]
fn ideal_edge_is_found_at_its_slope() {
    let (nx, ny) = (24, 20);
    let (ox, oy) = (6i64, 5i64);
    let img: Vec<u64> = (0..nx * ny)
        .map(|i| {
            let (x, y) = ((i % nx) as i64 - ox, (i / nx) as i64 - oy);
            10 * (-4 * y + 3 * x > 0) as u64
        })
        .collect();
    let d = 5;
    let r = detect_all_lines(&img, nx, ny, d, AlgoConfig::default()).unwrap();
    let want = 3f64.atan2(4.0);
    for k in 0..3i64 {
        let (x, y) = (ox + 4 * k, oy + 3 * k);
        let i = y as usize * nx + x as usize;
        let (mx, my) = r.result.slope[i].expect("edge pixel responds");
        let got = (my as f64).atan2(mx as f64);
        assert!(
            (got - want).abs() <= std::f64::consts::SQRT_2 / d as f64,
            "{:?}",
            (mx, my)
        );
    }
}

#[test]
fn cycles_do_not_depend_on_image_size() {
    let a = detect_all_lines(&vec![1; 20 * 20], 20, 20, 3, AlgoConfig::default()).unwrap();
    let b = detect_all_lines(&vec![1; 40 * 30], 40, 30, 3, AlgoConfig::default()).unwrap();
    assert_eq!(a.ledger.macro_cycles, b.ledger.macro_cycles);
    let s = detect_line_segment(&vec![1; 64], 8, 8, 4, 3, AlgoConfig::default()).unwrap();
    let t = detect_line_segment(&vec![1; 4096], 64, 64, 4, 3, AlgoConfig::default()).unwrap();
    assert_eq!(s.ledger.macro_cycles, t.ledger.macro_cycles);
}
