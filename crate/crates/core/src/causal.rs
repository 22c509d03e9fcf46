//! Causal matrix, link matrix and chains of a finite event set.
//!
//! Events are indexed in canonical `(t, x)` order, so precedence can only
//! point from a lower to a higher index and both matrices are strictly
//! upper triangular.

use crate::bitmatrix::{intersects, BitMatrix};
use crate::geometry::{boost, in_lightcone_guard_band, precedes, Event, GeometryError};
use crate::sprinkle::Sprinkle;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::ops::Deref;

/// Default bound on the number of chains returned by [`enumerate_chains`].
pub const DEFAULT_CHAIN_CAP: usize = 1_000_000;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CausalError {
    #[error("matrix is not strictly upper triangular (entry ({0}, {1}))")]
    NotUpperTriangular(usize, usize),
    #[error("relation is not transitive: {i} < {k} and {k} < {j} but not {i} < {j}")]
    NotTransitive { i: usize, k: usize, j: usize },
    #[error("index {index} out of range for {n} events")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("source index {0} must be strictly less than target index {1}")]
    BadPair(usize, usize),
}

/// `C[i, j] = 1` iff event `i` causally precedes event `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalMatrix {
    bits: BitMatrix,
}

/// `L[i, j] = 1` iff `i` precedes `j` with no event in between (a link).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkMatrix {
    bits: BitMatrix,
}

impl Deref for CausalMatrix {
    type Target = BitMatrix;
    fn deref(&self) -> &BitMatrix {
        &self.bits
    }
}

impl Deref for LinkMatrix {
    type Target = BitMatrix;
    fn deref(&self) -> &BitMatrix {
        &self.bits
    }
}

fn check_upper(bits: &BitMatrix) -> Result<(), CausalError> {
    for i in 0..bits.n() {
        if let Some(j) = bits.row_ones(i).find(|&j| j <= i) {
            return Err(CausalError::NotUpperTriangular(i, j));
        }
    }
    Ok(())
}

impl CausalMatrix {
    /// Validates strict upper triangularity and transitivity.
    pub fn try_from_bits(bits: BitMatrix) -> Result<Self, CausalError> {
        check_upper(&bits)?;
        for i in 0..bits.n() {
            for k in bits.row_ones(i) {
                if !bits.row_subset(k, i) {
                    let j = bits
                        .row_ones(k)
                        .find(|&j| !bits.get(i, j))
                        .expect("row not a subset");
                    return Err(CausalError::NotTransitive { i, k, j });
                }
            }
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &BitMatrix {
        &self.bits
    }

    pub fn into_bits(self) -> BitMatrix {
        self.bits
    }

    pub fn relation_count(&self) -> usize {
        self.bits.count_ones()
    }
}

impl LinkMatrix {
    /// Validates strict upper triangularity only; any such matrix is a valid link set.
    pub fn try_from_bits(bits: BitMatrix) -> Result<Self, CausalError> {
        check_upper(&bits)?;
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &BitMatrix {
        &self.bits
    }

    pub fn into_bits(self) -> BitMatrix {
        self.bits
    }

    pub fn link_count(&self) -> usize {
        self.bits.count_ones()
    }

    /// Number of links in the longest chain anywhere in the set.
    pub fn longest_chain_overall(&self) -> usize {
        let n = self.n();
        let mut height = vec![0usize; n];
        for i in (0..n).rev() {
            height[i] = self.row_ones(i).map(|k| height[k] + 1).max().unwrap_or(0);
        }
        height.into_iter().max().unwrap_or(0)
    }
}

/// A sequence of event indices, each consecutive pair linked.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chain {
    indices: Vec<usize>,
}

impl Chain {
    /// Checks non-emptiness, strict increase and that consecutive pairs are links.
    pub fn new(indices: Vec<usize>, links: &LinkMatrix) -> Result<Self, CausalError> {
        let n = links.n();
        if indices.is_empty() {
            return Err(CausalError::IndexOutOfRange { index: 0, n });
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(CausalError::IndexOutOfRange { index: bad, n });
        }
        for w in indices.windows(2) {
            if w[0] >= w[1] || !links.get(w[0], w[1]) {
                return Err(CausalError::BadPair(w[0], w[1]));
            }
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of links, one less than the number of events.
    pub fn link_len(&self) -> usize {
        self.indices.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainEnumeration {
    pub chains: Vec<Chain>,
    pub truncated: bool,
}

pub fn build_causal_matrix(sprinkle: &Sprinkle) -> CausalMatrix {
    causal_matrix_from_events(&sprinkle.events)
}

/// `events` must be in canonical order; an unsorted input would produce
/// entries below the diagonal.
pub fn causal_matrix_from_events(events: &[Event]) -> CausalMatrix {
    let n = events.len();
    let mut bits = BitMatrix::zeros(n);
    if n > 0 {
        bits.par_rows_mut().enumerate().for_each(|(i, row)| {
            for j in i + 1..n {
                if precedes(events[i], events[j]) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
        });
    }
    debug_assert!(bits.is_strictly_upper_triangular());
    CausalMatrix { bits }
}

/// Outcome of rebuilding a causal matrix after a boost and resort.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostComparison {
    pub beta: f64,
    /// Pairs `i < j` outside the lightcone guard band.
    pub compared_pairs: usize,
    pub guard_band_pairs: usize,
    /// Compared pairs whose relation differs after the boost.
    pub differing_bits: usize,
}

impl BoostComparison {
    pub fn is_identical(&self) -> bool {
        self.differing_bits == 0
    }
}

/// Boosts canonically ordered `events`, resorts them and compares the
/// rebuilt causal matrix pairwise with the original under the induced
/// permutation.
pub fn compare_under_boost(events: &[Event], beta: f64) -> Result<BoostComparison, GeometryError> {
    let n = events.len();
    let original = causal_matrix_from_events(events);
    let boosted = events
        .iter()
        .map(|&e| boost(e, beta))
        .collect::<Result<Vec<_>, _>>()?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| boosted[a].canonical_cmp(&boosted[b]));
    let mut position = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        position[i] = pos;
    }
    let resorted: Vec<Event> = order.iter().map(|&i| boosted[i]).collect();
    let rebuilt = causal_matrix_from_events(&resorted);

    let (compared, guarded, differing) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc = (0, 0, 0);
            for j in i + 1..n {
                if in_lightcone_guard_band(events[i], events[j]) {
                    acc.1 += 1;
                    continue;
                }
                acc.0 += 1;
                let (pi, pj) = (position[i], position[j]);
                let after = if pi < pj {
                    rebuilt.get(pi, pj)
                } else {
                    rebuilt.get(pj, pi)
                };
                // a flipped time order turns i < j into j < i, which is a difference too
                let after_forward = after && pi < pj;
                if original.get(i, j) != after_forward || (after && pi > pj) {
                    acc.2 += 1;
                }
            }
            acc
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    Ok(BoostComparison {
        beta,
        compared_pairs: compared,
        guard_band_pairs: guarded,
        differing_bits: differing,
    })
}

/// Transitive reduction by row intersection: `L[i, j] = C[i, j] ∧ (row_i ∩ col_j = ∅)`.
pub fn build_link_matrix(causal: &CausalMatrix) -> Result<LinkMatrix, CausalError> {
    let c = CausalMatrix::try_from_bits(causal.bits.clone())?;
    Ok(reduce_unchecked(&c.bits))
}

fn reduce_unchecked(c: &BitMatrix) -> LinkMatrix {
    let n = c.n();
    let cols = c.transpose();
    let mut bits = BitMatrix::zeros(n);
    if n > 0 {
        bits.par_rows_mut().enumerate().for_each(|(i, row)| {
            let ci = c.row(i);
            for j in c.row_ones(i) {
                if !intersects(ci, cols.row(j)) {
                    row[j / 64] |= 1 << (j % 64);
                }
            }
        });
    }
    LinkMatrix { bits }
}

/// Smallest transitive relation containing `links`.
pub fn transitive_closure(links: &LinkMatrix) -> CausalMatrix {
    let n = links.n();
    let mut bits = links.bits.clone();
    for i in (0..n).rev() {
        let succ: Vec<usize> = links.row_ones(i).collect();
        for k in succ {
            // k > i, so row k is already closed.
            bits.or_row_from_below(i, k);
        }
    }
    CausalMatrix { bits }
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<(), CausalError> {
    for index in [i, j] {
        if index >= n {
            return Err(CausalError::IndexOutOfRange { index, n });
        }
    }
    if i >= j {
        return Err(CausalError::BadPair(i, j));
    }
    Ok(())
}

/// Maximum number of links over chains from `i` to `j`, or 0 if none exists.
pub fn longest_chain(links: &LinkMatrix, i: usize, j: usize) -> Result<usize, CausalError> {
    check_pair(links.n(), i, j)?;
    let mut best: Vec<Option<usize>> = vec![None; j - i + 1];
    best[0] = Some(0);
    for k in i..j {
        let Some(d) = best[k - i] else { continue };
        for m in links.row_ones(k).take_while(|&m| m <= j) {
            let slot = &mut best[m - i];
            *slot = Some(slot.map_or(d + 1, |s| s.max(d + 1)));
        }
    }
    Ok(best[j - i].unwrap_or(0))
}

/// Marks every index in `i..=j` from which `j` is reachable through links.
pub(crate) fn reaches_target(links: &BitMatrix, i: usize, j: usize) -> Vec<bool> {
    let mut reach = vec![false; j - i + 1];
    reach[j - i] = true;
    for k in (i..j).rev() {
        reach[k - i] = links
            .row_ones(k)
            .take_while(|&m| m <= j)
            .any(|m| m >= i && reach[m - i]);
    }
    reach
}

/// All link paths from `i` to `j` in lexicographic order, at most `cap` of them.
pub fn enumerate_chains(
    links: &LinkMatrix,
    i: usize,
    j: usize,
    cap: usize,
) -> Result<ChainEnumeration, CausalError> {
    enumerate_paths(&links.bits, i, j, cap)
}

/// Path enumeration over any strictly upper triangular adjacency.
pub fn enumerate_paths(
    adj: &BitMatrix,
    i: usize,
    j: usize,
    cap: usize,
) -> Result<ChainEnumeration, CausalError> {
    check_pair(adj.n(), i, j)?;
    let reach = reaches_target(adj, i, j);
    let mut chains = Vec::new();
    let mut truncated = false;
    if !reach[0] {
        return Ok(ChainEnumeration { chains, truncated });
    }
    let successors = |k: usize| -> Vec<usize> {
        adj.row_ones(k)
            .take_while(|&m| m <= j)
            .filter(|&m| m > k && reach[m - i])
            .collect()
    };
    // Iterative DFS; each frame holds the remaining successors in reverse.
    let mut path = vec![i];
    let mut stack: Vec<Vec<usize>> = vec![rev(successors(i))];
    while let Some(frame) = stack.last_mut() {
        match frame.pop() {
            None => {
                stack.pop();
                path.pop();
            }
            Some(m) => {
                path.push(m);
                if m == j {
                    if chains.len() == cap {
                        truncated = true;
                        break;
                    }
                    chains.push(Chain {
                        indices: path.clone(),
                    });
                    path.pop();
                } else {
                    stack.push(rev(successors(m)));
                }
            }
        }
    }
    Ok(ChainEnumeration { chains, truncated })
}

fn rev(mut v: Vec<usize>) -> Vec<usize> {
    v.reverse();
    v
}
