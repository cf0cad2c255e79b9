//! Dense square 0/1 matrices with bit-packed rows.
//!
//! Common-neighbor counts reduce to AND + popcount over row words, which is
//! what the strongly-regular-graph checks and the dense intersection-number
//! cross-validation spend all their time on.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    n: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(n: usize) -> Self {
        let words_per_row = n.div_ceil(64);
        BitMatrix {
            n,
            words_per_row,
            words: vec![0; n * words_per_row],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.words[r * self.words_per_row + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        let w = &mut self.words[r * self.words_per_row + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    fn row(&self, r: usize) -> &[u64] {
        &self.words[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    pub fn row_sum(&self, r: usize) -> u64 {
        self.row(r).iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Number of common neighbors of `x` and `y` (rows ANDed, popcounted).
    pub fn common_neighbors(&self, x: usize, y: usize) -> u64 {
        self.common_neighbors_with(self, x, y)
    }

    /// `|row_self(x) & row_other(y)|`; with `other` symmetric this is the
    /// `(x, y)` entry of the product `self * other`.
    pub fn common_neighbors_with(&self, other: &BitMatrix, x: usize, y: usize) -> u64 {
        self.row(x)
            .iter()
            .zip(other.row(y))
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|r| (r + 1..self.n).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn diagonal_is_zero(&self) -> bool {
        (0..self.n).all(|r| !self.get(r, r))
    }

    /// Entrywise OR; callers use it for edge-disjoint unions.
    pub fn union(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.n, other.n);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        BitMatrix {
            n: self.n,
            words_per_row: self.words_per_row,
            words,
        }
    }

    pub fn overlaps(&self, other: &BitMatrix) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn edge_count(&self) -> u64 {
        let ones: u64 = self.words.iter().map(|w| w.count_ones() as u64).sum();
        ones / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_roundtrip() {
        let mut m = BitMatrix::zero(70);
        m.set(3, 65, true);
        m.set(65, 3, true);
        assert!(m.get(3, 65));
        assert!(m.is_symmetric());
        assert_eq!(m.row_sum(3), 1);
        assert_eq!(m.edge_count(), 1);
    }

    #[test]
    fn common_neighbor_count() {
        // path 0 - 1 - 2: vertices 0 and 2 share neighbor 1
        let mut m = BitMatrix::zero(3);
        for (a, b) in [(0, 1), (1, 2)] {
            m.set(a, b, true);
            m.set(b, a, true);
        }
        assert_eq!(m.common_neighbors(0, 2), 1);
        assert_eq!(m.common_neighbors(0, 1), 0);
    }
}
