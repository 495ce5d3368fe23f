// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::ops::{BitAnd, BitOr, Not};

/// Fixed-width vector of decoder output lines.
///
/// Bits past `width` inside the last storage word are kept at zero so that
/// derived equality and popcounts never see them.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    width: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(width: usize) -> Self {
        BitVector {
            width,
            words: vec![0; width.div_ceil(64)],
        }
    }

    pub fn ones(width: usize) -> Self {
        let mut v = BitVector {
            width,
            words: vec![!0; width.div_ceil(64)],
        };
        v.trim();
        v
    }

    pub fn from_indices(width: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(width);
        for i in indices {
            v.set(i, true);
        }
        v
    }

    /// Little-endian storage words; words past the width are ignored and
    /// missing ones read as zero.
    pub fn from_words(width: usize, words: &[u64]) -> Self {
        let n = width.div_ceil(64);
        let mut w: Vec<u64> = words.iter().copied().take(n).collect();
        w.resize(n, 0);
        let mut v = BitVector { width, words: w };
        v.trim();
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let words: Vec<u64> = bits
            .chunks(64)
            .map(|c| c.iter().rev().fold(0, |w, &b| w << 1 | b as u64))
            .collect();
        Self::from_words(bits.len(), &words)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.width, "bit {i} out of width {}", self.width);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.width, "bit {i} out of width {}", self.width);
        let (w, b) = (i / 64, i % 64);
        if value {
            self.words[w] |= 1 << b;
        } else {
            self.words[w] &= !(1 << b);
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Set bit indices in ascending order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.iter_ones().next()
    }

    /// Lowest `width` lines of `self`.
    pub fn truncated(&self, width: usize) -> BitVector {
        assert!(width <= self.width);
        let mut v = BitVector {
            width,
            words: self.words[..width.div_ceil(64)].to_vec(),
        };
        v.trim();
        v
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.width).map(|i| self.get(i)).collect()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn trim(&mut self) {
        let rem = self.width % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn zip_with(&self, other: &BitVector, f: impl Fn(u64, u64) -> u64) -> BitVector {
        assert_eq!(self.width, other.width, "bit vector width mismatch");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        BitVector {
            width: self.width,
            words,
        }
    }
}

impl BitAnd for &BitVector {
    type Output = BitVector;
    fn bitand(self, rhs: &BitVector) -> BitVector {
        self.zip_with(rhs, |a, b| a & b)
    }
}

impl BitOr for &BitVector {
    type Output = BitVector;
    fn bitor(self, rhs: &BitVector) -> BitVector {
        self.zip_with(rhs, |a, b| a | b)
    }
}

impl Not for &BitVector {
    type Output = BitVector;
    fn not(self) -> BitVector {
        let mut v = BitVector {
            width: self.width,
            words: self.words.iter().map(|w| !w).collect(),
        };
        v.trim();
        v
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[{}]{{", self.width)?;
        for (n, i) in self.iter_ones().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
