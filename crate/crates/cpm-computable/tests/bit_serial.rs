// SPDX-License-Identifier: Apache-2.0

use cpm_computable::{CmpOp, ComputableConfig, ComputableMemory, Dest, ExecMode, MacroOp, Operand};
use cpm_core::Direction;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

const PAIRS: usize = 10_000;

fn serial(width: u8) -> ComputableConfig {
    ComputableConfig {
        width,
        mode: ExecMode::BitSerial,
        ..Default::default()
    }
}

/// Every PE holds one random pair: `op = a`, `d0 = b`.
fn pairs(width: u8, seed: u64) -> (ComputableMemory, Vec<u64>, Vec<u64>) {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mask = if width == 64 {
        u64::MAX
    } else {
        (1 << width) - 1
    };
    let mut draw = |i: usize| {
        // Mix in ties and extremes, which random draws almost never hit.
        match i % 16 {
            0 => 0,
            1 => mask,
            _ => rng.gen::<u64>() & mask,
        }
    };
    let a: Vec<u64> = (0..PAIRS).map(&mut draw).collect();
    let mut b: Vec<u64> = (0..PAIRS).map(&mut draw).collect();
    for i in (0..PAIRS).step_by(7) {
        b[i] = a[i];
    }
    let mut m = ComputableMemory::line(PAIRS, serial(width)).unwrap();
    m.load_register(Dest::Op, &a).unwrap();
    m.load_register(Dest::Data(0), &b).unwrap();
    m.activate_all().unwrap();
    (m, a, b)
}

#[test]
fn arithmetic_matches_integers() {
    for width in [8u8, 16, 32] {
        let mask = (1u64 << width) - 1;
        let d0 = Operand::Data(0);
        type Oracle = fn(u64, u64, u64) -> u64;
        let cases: [(MacroOp, Oracle); 5] = [
            (
                MacroOp::Add {
                    src: d0,
                    dst: Dest::Op,
                },
                |a, b, m| a.wrapping_add(b) & m,
            ),
            (
                MacroOp::Sub {
                    src: d0,
                    dst: Dest::Op,
                },
                |a, b, m| a.wrapping_sub(b) & m,
            ),
            (MacroOp::AbsDiff { src: d0 }, |a, b, _| a.abs_diff(b)),
            (
                MacroOp::Min {
                    src: d0,
                    dst: Dest::Op,
                },
                |a, b, _| a.min(b),
            ),
            (
                MacroOp::Max {
                    src: d0,
                    dst: Dest::Op,
                },
                |a, b, _| a.max(b),
            ),
        ];
        for (k, (op, f)) in cases.iter().enumerate() {
            let (mut m, a, b) = pairs(width, 100 + k as u64);
            m.run(*op).unwrap();
            for i in 0..PAIRS {
                assert_eq!(
                    m.register(Dest::Op)[i],
                    f(a[i], b[i], mask),
                    "{op:?} W={width} a={} b={}",
                    a[i],
                    b[i]
                );
                assert_eq!(m.register(Dest::Data(0))[i], b[i]);
            }
        }
    }
}

#[test]
fn comparisons_match_integers() {
    for width in [8u8, 16, 32] {
        for cmp in CmpOp::ALL {
            let (mut m, a, b) = pairs(width, 7 + cmp as u64);
            m.run(MacroOp::Compare {
                src: Operand::Data(0),
                cmp,
            })
            .unwrap();
            let lines = m.match_lines();
            for i in 0..PAIRS {
                let want = cmp.eval(a[i], b[i]);
                assert_eq!(
                    m.s_bits()[i],
                    want,
                    "{cmp:?} W={width} a={} b={}",
                    a[i],
                    b[i]
                );
                assert_eq!(m.peek(i).m, want);
                assert_eq!(lines.get(i), want);
                assert_eq!(m.register(Dest::Op)[i], a[i]);
            }
        }
    }
}

#[test]
fn threshold_and_select() {
    let width = 16;
    let (mut m, a, b) = pairs(width, 3);
    m.run(MacroOp::Threshold {
        src: Operand::Data(0),
        value: 0x4000,
        cmp: CmpOp::Ge,
    })
    .unwrap();
    for i in 0..PAIRS {
        assert_eq!(m.s_bits()[i], b[i] >= 0x4000);
        assert_eq!(m.register(Dest::Op)[i], a[i]);
    }
    m.run(MacroOp::SelectIf {
        src: Operand::Data(0),
    })
    .unwrap();
    m.run(MacroOp::LoadImmediateIf { value: 0xBEEF }).unwrap();
    for i in 0..PAIRS {
        let want = if b[i] >= 0x4000 { 0xBEEF } else { a[i] };
        assert_eq!(m.register(Dest::Op)[i], want);
    }
}

#[test]
fn signed_abs_and_multiply() {
    let width = 8;
    let (mut m, a, _) = pairs(width, 11);
    m.run(MacroOp::AbsSigned).unwrap();
    for (&got, &x) in m.register(Dest::Op).iter().zip(&a) {
        assert_eq!(got, (x as u8 as i8).unsigned_abs() as u64);
    }
    let (mut m, a, b) = pairs(width, 12);
    m.run(MacroOp::Mul {
        src: Operand::Data(0),
        temp: 1,
    })
    .unwrap();
    for i in 0..PAIRS {
        assert_eq!(m.register(Dest::Op)[i], a[i].wrapping_mul(b[i]) & 0xFF);
        assert_eq!(m.register(Dest::Data(1))[i], a[i]);
    }
}

#[test]
fn examples() {
    let mut m = ComputableMemory::line(3, serial(8)).unwrap();
    m.load_register(Dest::Op, &[5, 3, 5]).unwrap();
    m.load_register(Dest::Data(0), &[7, 10, 5]).unwrap();
    m.activate(0, 0, 1).unwrap();
    let before = m.ledger();
    m.run(MacroOp::Add {
        src: Operand::Data(0),
        dst: Dest::Op,
    })
    .unwrap();
    let cost = m.ledger() - before;
    assert_eq!(m.register(Dest::Op)[0], 12);
    assert_eq!(cost.macro_cycles, 1);
    // Ripple carry with a flag-clearing step per bit: 9 steps a bit plus one.
    assert_eq!(cost.micro_cycles, 9 * 8 + 1);
    m.activate(1, 1, 1).unwrap();
    m.run(MacroOp::AbsDiff {
        src: Operand::Data(0),
    })
    .unwrap();
    assert_eq!(m.register(Dest::Op)[1], 7);
    m.activate(2, 2, 1).unwrap();
    m.run(MacroOp::Compare {
        src: Operand::Data(0),
        cmp: CmpOp::Lt,
    })
    .unwrap();
    assert!(!m.peek(2).m);
    assert_eq!(m.register(Dest::Op), &[12, 7, 5]);
}

#[test]
fn neighbor_copy_is_simultaneous_and_edges_read_fill() {
    for mode in [ExecMode::Word, ExecMode::BitSerial] {
        let mut m = ComputableMemory::line(
            5,
            ComputableConfig {
                width: 8,
                fill: 0xAA,
                mode,
                ..Default::default()
            },
        )
        .unwrap();
        m.load_register(Dest::Neighbor, &[1, 2, 3, 4, 5]).unwrap();
        m.activate_all().unwrap();
        m.run(MacroOp::Copy {
            src: Operand::Adj(Direction::Left),
            dst: Dest::Neighbor,
        })
        .unwrap();
        assert_eq!(m.register(Dest::Neighbor), &[0xAA, 1, 2, 3, 4], "{mode:?}");
        assert_eq!(m.edge_flags(), &[true, false, false, false, false]);
        m.run(MacroOp::Copy {
            src: Operand::Adj(Direction::Right),
            dst: Dest::Op,
        })
        .unwrap();
        assert_eq!(m.register(Dest::Op), &[1, 2, 3, 4, 0xAA]);
        assert_eq!(m.edge_flags(), &[false, false, false, false, true]);
    }
}

#[test]
fn lattice_neighbors() {
    for mode in [ExecMode::Word, ExecMode::BitSerial] {
        let mut m = ComputableMemory::lattice(
            3,
            2,
            ComputableConfig {
                width: 8,
                mode,
                ..Default::default()
            },
        )
        .unwrap();
        m.load_register(Dest::Neighbor, &[1, 2, 3, 4, 5, 6])
            .unwrap();
        m.activate_all().unwrap();
        m.run(MacroOp::Copy {
            src: Operand::Adj(Direction::Top),
            dst: Dest::Op,
        })
        .unwrap();
        assert_eq!(m.register(Dest::Op), &[0, 0, 0, 1, 2, 3]);
        m.run(MacroOp::Add {
            src: Operand::Adj(Direction::Bottom),
            dst: Dest::Op,
        })
        .unwrap();
        assert_eq!(m.register(Dest::Op), &[4, 5, 6, 1, 2, 3]);
        m.run(MacroOp::Copy {
            src: Operand::Adj(Direction::Right),
            dst: Dest::Data(0),
        })
        .unwrap();
        assert_eq!(m.register(Dest::Data(0)), &[2, 3, 0, 5, 6, 0]);
    }
}
