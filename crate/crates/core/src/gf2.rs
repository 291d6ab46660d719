//! Dense bit-packed matrices over GF(2).

use crate::error::{parameter, Result};

const WORD: usize = 64;

/// A dense binary matrix, one `u64`-packed bit row per matrix row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(WORD).max(1);
        Self {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 bytes. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return parameter(format!(
                    "row {r} has {} entries, expected {cols}",
                    row.len()
                ));
            }
            for (c, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.set(r, c, 1),
                    _ => return parameter(format!("entry ({r}, {c}) is {b}, not a bit")),
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        ((self.data[r * self.words + c / WORD] >> (c % WORD)) & 1) as u8
    }

    pub fn set(&mut self, r: usize, c: usize, bit: u8) {
        let w = &mut self.data[r * self.words + c / WORD];
        let mask = 1u64 << (c % WORD);
        if bit & 1 == 1 {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.words..(r + 1) * self.words]
    }

    pub fn row_bits(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row_bits(r)).collect()
    }

    /// `row[dst] ^= row[src]`.
    fn xor_rows(&mut self, dst: usize, src: usize) {
        let w = self.words;
        let (d, s) = (dst * w, src * w);
        for i in 0..w {
            self.data[d + i] ^= self.data[s + i];
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words;
        for i in 0..w {
            self.data.swap(a * w + i, b * w + i);
        }
    }

    /// Matrix-vector product `self · x` over GF(2).
    pub fn mul_vec(&self, x: &[u8]) -> Vec<u8> {
        let packed = pack(x);
        (0..self.rows)
            .map(|r| {
                let ones: u32 = self
                    .row_words(r)
                    .iter()
                    .zip(&packed)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                (ones & 1) as u8
            })
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) == 1 {
                    t.set(c, r, 1);
                }
            }
        }
        t
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..m.cols {
            if next == m.rows {
                break;
            }
            let Some(p) = (next..m.rows).find(|&r| m.get(r, c) == 1) else {
                continue;
            };
            m.swap_rows(next, p);
            for r in 0..m.rows {
                if r != next && m.get(r, c) == 1 {
                    m.xor_rows(r, next);
                }
            }
            pivots.push(c);
            next += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self · x = 0}`, one basis vector per row of the result.
    /// Row `i` has a one in free column `free[i]` and zeros in the other free columns.
    pub fn null_space(&self) -> (Self, Vec<usize>) {
        let (reduced, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut basis = Self::zeros(free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            basis.set(i, f, 1);
            for (r, &p) in pivots.iter().enumerate() {
                if reduced.get(r, f) == 1 {
                    basis.set(i, p, 1);
                }
            }
        }
        (basis, free)
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        let (reduced, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, reduced.get(r, n + c));
            }
        }
        Some(inv)
    }

    /// Indices of a maximal set of linearly independent rows, greedily in row order.
    pub fn independent_rows(&self) -> Vec<usize> {
        // Basis kept in echelon form: (pivot column, reduced row words).
        let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
        let mut chosen = Vec::new();
        for r in 0..self.rows {
            if basis.len() == self.cols {
                break;
            }
            let mut row = self.row_words(r).to_vec();
            for (p, b) in &basis {
                if (row[p / WORD] >> (p % WORD)) & 1 == 1 {
                    row.iter_mut().zip(b).for_each(|(x, y)| *x ^= y);
                }
            }
            if let Some(p) = first_one(&row) {
                // Keep the basis fully reduced at the new pivot.
                for (_, b) in basis.iter_mut() {
                    if (b[p / WORD] >> (p % WORD)) & 1 == 1 {
                        b.iter_mut().zip(&row).for_each(|(x, y)| *x ^= y);
                    }
                }
                basis.push((p, row));
                chosen.push(r);
            }
        }
        chosen
    }
}

fn first_one(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
}

/// Packs 0/1 bytes into `u64` words, least significant bit first.
pub fn pack(bits: &[u8]) -> Vec<u64> {
    let mut words = vec![0u64; bits.len().div_ceil(WORD).max(1)];
    for (i, &b) in bits.iter().enumerate() {
        words[i / WORD] |= u64::from(b & 1) << (i % WORD);
    }
    words
}
