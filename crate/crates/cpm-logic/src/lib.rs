// SPDX-License-Identifier: Apache-2.0

//! Functional models of the activation decoder.
//!
//! A general decoder enables every line `a = start + k * carry` with
//! `a <= end`. It is assembled from three combinational blocks:
//!
//! * a carry-pattern generator that raises every multiple of the carry,
//! * a parallel shifter that moves that pattern up by `start`,
//! * an all-line decoder that raises every line `<= end`,
//!
//! whose outputs are AND-ed line by line.

mod bitvec;

pub use bitvec::BitVector;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("decoder width {0} is not a power of two")]
    WidthNotPowerOfTwo(usize),
    #[error("{what} {value} does not fit decoder width {width}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        width: usize,
    },
}

/// Inputs of one general-decoder evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DecoderInput {
    pub start: usize,
    pub end: usize,
    pub carry: usize,
    pub width: usize,
}

fn check_width(width: usize) -> Result<(), LogicError> {
    if width == 0 || !width.is_power_of_two() {
        return Err(LogicError::WidthNotPowerOfTwo(width));
    }
    Ok(())
}

fn check_range(what: &'static str, value: usize, width: usize) -> Result<(), LogicError> {
    if value >= width {
        return Err(LogicError::OutOfRange { what, value, width });
    }
    Ok(())
}

/// Carry-pattern generator: line `a` is raised iff `a` is a multiple of `carry`.
///
/// Each output ORs its own product term (`carry == a`) with the outputs of
/// all its proper divisors, which is the sum-of-products shape the generator
/// has at any width. With `carry == 0` every product term is false and only
/// line 0 is raised.
pub fn carry_pattern(carry: usize, width: usize) -> Result<BitVector, LogicError> {
    check_width(width)?;
    check_range("carry", carry, width)?;
    let mut out = BitVector::zeros(width);
    out.set(0, true);
    // Walking upward, every proper divisor of `a` has already pushed its
    // value into `a` by the time `a` is visited.
    for a in 1..width {
        if a == carry {
            out.set(a, true);
        }
        if out.get(a) {
            let mut m = 2 * a;
            while m < width {
                out.set(m, true);
                m += a;
            }
        }
    }
    Ok(out)
}

/// Parallel shifter: `out[a] = input[a - shift]`, zero below `shift`.
pub fn parallel_shift(input: &BitVector, shift: usize) -> Result<BitVector, LogicError> {
    let width = input.width();
    check_range("shift", shift, width)?;
    if shift == 0 {
        return Ok(input.clone());
    }
    let src = input.words();
    let (ws, bs) = (shift / 64, shift % 64);
    let mut out = vec![0u64; src.len()];
    for (k, w) in out.iter_mut().enumerate().skip(ws) {
        let lo = src[k - ws];
        *w = if bs == 0 {
            lo
        } else {
            let carry_in = if k > ws {
                src[k - ws - 1] >> (64 - bs)
            } else {
                0
            };
            lo << bs | carry_in
        };
    }
    Ok(BitVector::from_words(width, &out))
}

/// All-line decoder: line `a` is raised iff `a <= end`.
///
/// Built by the doubling recursion: a decoder for `n + 1` address bits takes
/// the `n`-bit decoder outputs `f` and the new top bit `e` of `end`, and
/// produces `f | e` for addresses whose top bit is 0 and `f & e` for those
/// whose top bit is 1.
pub fn all_line_decode(end: usize, width: usize) -> Result<BitVector, LogicError> {
    check_width(width)?;
    check_range("end", end, width)?;
    let bits = width.trailing_zeros() as usize;

    // Levels up to 64 lines fit in one word.
    let mut small: u64 = 1;
    let mut level = 0;
    while level < bits && (1usize << level) < 64 {
        let half = 1u32 << level;
        let e = end >> level & 1 == 1;
        let low = if e { mask(half) } else { small };
        let high = if e { small } else { 0 };
        small = low | high << half;
        level += 1;
    }
    let mut words = vec![small];
    while level < bits {
        let e = end >> level & 1 == 1;
        let high: Vec<u64> = if e {
            words.clone()
        } else {
            vec![0; words.len()]
        };
        if e {
            words.iter_mut().for_each(|w| *w = !0);
        }
        words.extend(high);
        level += 1;
    }
    Ok(from_words(width, &words))
}

fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        !0
    } else {
        (1u64 << bits) - 1
    }
}

fn from_words(width: usize, words: &[u64]) -> BitVector {
    BitVector::from_words(width, words)
}

/// General decoder: AND of the shifted carry pattern and the all-line decoder.
pub fn general_decode(input: DecoderInput) -> Result<BitVector, LogicError> {
    let DecoderInput {
        start,
        end,
        carry,
        width,
    } = input;
    check_width(width)?;
    check_range("start", start, width)?;
    check_range("end", end, width)?;
    if carry == 1 {
        return unit_stride_decode(start, end, width);
    }
    let pattern = carry_pattern(carry, width)?;
    let shifted = parallel_shift(&pattern, start)?;
    let upto = all_line_decode(end, width)?;
    Ok(&shifted & &upto)
}

/// Decoder specialised to `carry == 1`: two all-line decoders, the lower one
/// negated. The negated decoder is driven by `start - 1` so that `start`
/// itself stays enabled.
pub fn unit_stride_decode(start: usize, end: usize, width: usize) -> Result<BitVector, LogicError> {
    check_width(width)?;
    check_range("start", start, width)?;
    let upto = all_line_decode(end, width)?;
    if start == 0 {
        return Ok(upto);
    }
    let below = all_line_decode(start - 1, width)?;
    Ok(&!&below & &upto)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(v: &BitVector) -> Vec<usize> {
        v.iter_ones().collect()
    }

    #[test]
    fn carry_pattern_small_widths() {
        assert_eq!(
            ones(&carry_pattern(1, 8).unwrap()),
            (0..8).collect::<Vec<_>>()
        );
        assert_eq!(ones(&carry_pattern(2, 8).unwrap()), vec![0, 2, 4, 6]);
        assert_eq!(ones(&carry_pattern(3, 8).unwrap()), vec![0, 3, 6]);
        assert_eq!(ones(&carry_pattern(0, 8).unwrap()), vec![0]);
    }

    #[test]
    fn carry_pattern_rejects_bad_shapes() {
        assert_eq!(carry_pattern(1, 6), Err(LogicError::WidthNotPowerOfTwo(6)));
        assert!(matches!(
            carry_pattern(8, 8),
            Err(LogicError::OutOfRange { .. })
        ));
    }

    #[test]
    fn shift_examples() {
        let v = BitVector::from_indices(8, [0, 2, 4, 6]);
        assert_eq!(ones(&parallel_shift(&v, 3).unwrap()), vec![3, 5, 7]);
        assert_eq!(parallel_shift(&v, 0).unwrap(), v);
        let top = BitVector::from_indices(8, [7]);
        assert!(parallel_shift(&top, 1).unwrap().is_empty());
        assert!(parallel_shift(&v, 8).is_err());
    }

    #[test]
    fn all_line_examples() {
        assert_eq!(
            ones(&all_line_decode(5, 8).unwrap()),
            vec![0, 1, 2, 3, 4, 5]
        );
        assert_eq!(ones(&all_line_decode(0, 8).unwrap()), vec![0]);
        assert_eq!(all_line_decode(7, 8).unwrap().count_ones(), 8);
        assert_eq!(all_line_decode(0, 1).unwrap().count_ones(), 1);
    }

    #[test]
    fn general_examples() {
        let d = |start, end, carry| {
            ones(
                &general_decode(DecoderInput {
                    start,
                    end,
                    carry,
                    width: 8,
                })
                .unwrap(),
            )
        };
        assert_eq!(d(2, 7, 3), vec![2, 5]);
        assert_eq!(d(0, 7, 1), (0..8).collect::<Vec<_>>());
        assert!(d(6, 3, 1).is_empty());
        for k in 0..8 {
            for c in 0..8 {
                assert_eq!(d(k, k, c), vec![k]);
            }
        }
    }
}
