//! Square boolean matrices with packed `u64` rows.

use serde::{Deserialize, Serialize};
use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum BitMatrixError {
    #[error("index ({0}, {1}) out of range for a {2}x{2} matrix")]
    OutOfRange(usize, usize, usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl BitMatrix {
    pub fn zeros(n: usize) -> Self {
        let words_per_row = n.div_ceil(WORD);
        Self {
            n,
            words_per_row,
            words: vec![0; n * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, BitMatrixError> {
        let mut m = Self::zeros(n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(BitMatrixError::OutOfRange(i, j, n));
            }
            m.set(i, j, true);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.n && j < self.n);
        self.words[i * self.words_per_row + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.n && j < self.n);
        let w = &mut self.words[i * self.words_per_row + j / WORD];
        let mask = 1u64 << (j % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        let w = self.words_per_row;
        &mut self.words[i * w..(i + 1) * w]
    }

    /// Rows as disjoint mutable slices, for parallel construction.
    pub(crate) fn par_rows_mut(&mut self) -> rayon::slice::ChunksMut<'_, u64> {
        use rayon::slice::ParallelSliceMut;
        let w = self.words_per_row.max(1);
        self.words.par_chunks_mut(w)
    }

    /// `row[dst] |= row[src]` for `src > dst`.
    pub fn or_row_from_below(&mut self, dst: usize, src: usize) {
        assert!(src > dst);
        let w = self.words_per_row;
        let (head, tail) = self.words.split_at_mut(src * w);
        let d = &mut head[dst * w..(dst + 1) * w];
        for (a, b) in d.iter_mut().zip(&tail[..w]) {
            *a |= *b;
        }
    }

    /// Column indices set in row `i`, ascending.
    pub fn row_ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        ones(self.row(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_count(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in self.row_ones(i) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// All set entries in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| self.row_ones(i).map(move |j| (i, j)))
            .collect()
    }

    /// True when no entry on or below the diagonal is set.
    pub fn is_strictly_upper_triangular(&self) -> bool {
        (0..self.n).all(|i| self.row_ones(i).next().is_none_or(|j| j > i))
    }

    /// Row `i` is a subset of row `k`.
    pub fn row_subset(&self, i: usize, k: usize) -> bool {
        self.row(i)
            .iter()
            .zip(self.row(k))
            .all(|(a, b)| a & !b == 0)
    }

    /// Entrywise `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.n == other.n
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(a, b)| a & !b == 0)
    }

    /// Number of entries that differ.
    pub fn hamming_distance(&self, other: &Self) -> usize {
        assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// `P M Pᵀ`: entry `(perm[i], perm[j])` of the result is entry `(i, j)` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut out = Self::zeros(self.n);
        for (i, j) in self.edges() {
            out.set(perm[i], perm[j], true);
        }
        out
    }

    /// Dense CSV: one row per line, entries `0`/`1` separated by commas.
    pub fn to_dense_csv(&self) -> String {
        let mut s = String::with_capacity(self.n * (2 * self.n + 1));
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    s.push(',');
                }
                s.push(if self.get(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_dense_csv(text: &str) -> Result<Self, BitMatrixError> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let n = lines.len();
        let mut m = Self::zeros(n);
        for (i, line) in lines.iter().enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != n {
                return Err(BitMatrixError::Parse {
                    line: i + 1,
                    message: format!("expected {n} entries, found {}", fields.len()),
                });
            }
            for (j, f) in fields.iter().enumerate() {
                match *f {
                    "0" => {}
                    "1" => m.set(i, j, true),
                    other => {
                        return Err(BitMatrixError::Parse {
                            line: i + 1,
                            message: format!("entry `{other}` is not 0 or 1"),
                        })
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        SparseMatrix {
            n: self.n,
            edges: self.edges().into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }

    pub fn from_sparse(sparse: &SparseMatrix) -> Result<Self, BitMatrixError> {
        let edges: Vec<(usize, usize)> = sparse.edges.iter().map(|&[i, j]| (i, j)).collect();
        Self::from_edges(sparse.n, &edges)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.n, self.n)?;
        for i in 0..self.n.min(32) {
            let row: String = (0..self.n.min(64))
                .map(|j| if self.get(i, j) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// Sparse edge-list form, `{"n": …, "edges": [[i, j], …]}` with 0-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseMatrix {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

pub(crate) fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut bits = w;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(wi * WORD + b)
            }
        })
    })
}

#[inline]
pub(crate) fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}
