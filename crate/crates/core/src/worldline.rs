//! Amplitude-weighted sums over all chains between two events.
//!
//! Each chain of `k` links carries the amplitude `hopᵏ`. Because a strictly
//! upper triangular adjacency `A` is nilpotent, the sum over all chains is
//! the finite series `Σₖ (hop·A)ᵏ = (I - hop·A)⁻¹ - I`, evaluated here by
//! back-substitution against the unit upper triangular `I - hop·A`.
//!
//! All functions take a `&BitMatrix`, so they apply to a [`LinkMatrix`]
//! (chains of links) as well as to a causal matrix (chains of relations).
//!
//! [`LinkMatrix`]: crate::causal::LinkMatrix

use crate::bitmatrix::BitMatrix;
use crate::causal::{enumerate_paths, CausalError, Chain};
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeModel {
    pub hop: Complex64,
}

impl AmplitudeModel {
    pub fn new(hop: Complex64) -> Self {
        Self { hop }
    }

    pub fn real(hop: f64) -> Self {
        Self {
            hop: Complex64::new(hop, 0.0),
        }
    }

    pub fn chain_amplitude(&self, links: usize) -> Complex64 {
        self.hop.powu(links as u32)
    }
}

/// How amplitudes are turned into ensemble weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Weight proportional to `|a|²`.
    #[default]
    Born,
    /// Weight proportional to `|a|`.
    Linear,
}

fn check_adjacency(adj: &BitMatrix) -> Result<(), CausalError> {
    for i in 0..adj.n() {
        if let Some(j) = adj.row_ones(i).find(|&j| j <= i) {
            return Err(CausalError::NotUpperTriangular(i, j));
        }
    }
    Ok(())
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

/// One column of `(I - A)⁻¹ - I`, exact.
#[derive(Debug, Clone, PartialEq, Eq)]
enum CountColumn {
    Small(Vec<u64>),
    Big(Vec<BigUint>),
}

/// Number of paths between every ordered pair of events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathCountMatrix {
    n: usize,
    columns: Vec<CountColumn>,
}

impl PathCountMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> BigUint {
        match &self.columns[j] {
            CountColumn::Small(c) => BigUint::from(c[i]),
            CountColumn::Big(c) => c[i].clone(),
        }
    }

    /// The count if it fits in 64 bits.
    pub fn get_u64(&self, i: usize, j: usize) -> Option<u64> {
        match &self.columns[j] {
            CountColumn::Small(c) => Some(c[i]),
            CountColumn::Big(c) => c[i].to_u64(),
        }
    }

    /// True when some column needed arbitrary precision.
    pub fn has_overflowed(&self) -> bool {
        self.columns
            .iter()
            .any(|c| matches!(c, CountColumn::Big(_)))
    }
}

/// Column `j` restricted to rows `lo..=j`; entry `r` is the count from `lo + r` to `j`.
fn count_column_u64(adj: &BitMatrix, lo: usize, j: usize) -> Option<Vec<u64>> {
    let mut col = vec![0u64; j - lo + 1];
    for i in (lo..j).rev() {
        let mut acc = 0u64;
        for k in adj.row_ones(i).take_while(|&k| k <= j) {
            let term = if k == j { 1 } else { col[k - lo] };
            acc = acc.checked_add(term)?;
        }
        col[i - lo] = acc;
    }
    Some(col)
}

fn count_column_big(adj: &BitMatrix, lo: usize, j: usize) -> Vec<BigUint> {
    let mut col = vec![BigUint::zero(); j - lo + 1];
    for i in (lo..j).rev() {
        let mut acc = BigUint::zero();
        for k in adj.row_ones(i).take_while(|&k| k <= j) {
            if k == j {
                acc += 1u32;
            } else {
                acc += &col[k - lo];
            }
        }
        col[i - lo] = acc;
    }
    col
}

/// `(I - A)⁻¹ - I` with exact integer entries; columns are solved in parallel
/// and fall back to arbitrary precision when 64 bits overflow.
pub fn path_count_matrix(adj: &BitMatrix) -> Result<PathCountMatrix, CausalError> {
    check_adjacency(adj)?;
    let n = adj.n();
    let columns = (0..n)
        .into_par_iter()
        .map(|j| match count_column_u64(adj, 0, j) {
            Some(mut c) => {
                c.resize(n, 0);
                CountColumn::Small(c)
            }
            None => {
                let mut c = count_column_big(adj, 0, j);
                c.resize(n, BigUint::zero());
                CountColumn::Big(c)
            }
        })
        .collect();
    Ok(PathCountMatrix { n, columns })
}

/// Number of paths from `i` to `j`, exact.
pub fn path_count(adj: &BitMatrix, i: usize, j: usize) -> Result<BigUint, CausalError> {
    check_adjacency(adj)?;
    check_pair(adj.n(), i, j)?;
    Ok(match count_column_u64(adj, i, j) {
        Some(c) => BigUint::from(c[0]),
        None => count_column_big(adj, i, j).swap_remove(0),
    })
}

/// Coefficients of the path polynomial: entry `k` is the number of paths
/// from `i` to `j` with exactly `k` steps.
pub fn path_counts_by_length(
    adj: &BitMatrix,
    i: usize,
    j: usize,
) -> Result<Vec<BigUint>, CausalError> {
    check_adjacency(adj)?;
    check_pair(adj.n(), i, j)?;
    let len = j - i + 1;
    // by_len[r][k]: paths from i + r to j with k steps
    let mut by_len: Vec<Vec<BigUint>> = vec![Vec::new(); len];
    by_len[len - 1] = vec![BigUint::from(1u32)];
    for r in (0..len - 1).rev() {
        let mut acc: Vec<BigUint> = Vec::new();
        for k in adj.row_ones(i + r).take_while(|&k| k <= j) {
            let tail = &by_len[k - i];
            if acc.len() < tail.len() + 1 {
                acc.resize(tail.len() + 1, BigUint::zero());
            }
            for (steps, c) in tail.iter().enumerate() {
                acc[steps + 1] += c;
            }
        }
        by_len[r] = acc;
    }
    let mut out = std::mem::take(&mut by_len[0]);
    while out.last().is_some_and(Zero::is_zero) {
        out.pop();
    }
    Ok(out)
}

/// `Σ_chains hop^len = ((I - hop·A)⁻¹ - I)[i, j]`.
pub fn total_amplitude(
    adj: &BitMatrix,
    model: AmplitudeModel,
    i: usize,
    j: usize,
) -> Result<Complex64, CausalError> {
    check_adjacency(adj)?;
    check_pair(adj.n(), i, j)?;
    let mut amp = vec![Complex64::zero(); j - i + 1];
    amp[j - i] = Complex64::new(1.0, 0.0);
    for k in (i..j).rev() {
        let sum: Complex64 = adj
            .row_ones(k)
            .take_while(|&m| m <= j)
            .map(|m| amp[m - i])
            .sum();
        amp[k - i] = model.hop * sum;
    }
    Ok(amp[0])
}

/// The set of chains between two events with their amplitudes and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldlineEnsemble {
    pub source: usize,
    pub target: usize,
    pub chains: Vec<Chain>,
    pub amplitudes: Vec<Complex64>,
    pub total: Complex64,
    pub weights: Vec<f64>,
    pub truncated: bool,
    pub normalization: Normalization,
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct EnsembleJson {
    source: usize,
    target: usize,
    chains: Vec<Chain>,
    weights: Vec<f64>,
    total: ComplexJson,
    truncated: bool,
}

impl WorldlineEnsemble {
    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    /// `{"source","target","chains","weights","total":{"re","im"},"truncated"}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(EnsembleJson {
            source: self.source,
            target: self.target,
            chains: self.chains.clone(),
            weights: self.weights.clone(),
            total: ComplexJson {
                re: self.total.re,
                im: self.total.im,
            },
            truncated: self.truncated,
        })
        .expect("ensemble serializes")
    }
}

/// Normalized weights for chains of the given link lengths.
///
/// Amplitudes depend only on length, so weights are computed in the log
/// domain. For `hop = 0` every amplitude vanishes; the weights are then the
/// `hop → 0` limit, uniform over the shortest chains.
pub fn chain_weights(lengths: &[usize], hop: Complex64, norm: Normalization) -> Vec<f64> {
    if lengths.is_empty() {
        return Vec::new();
    }
    let power = match norm {
        Normalization::Born => 2.0,
        Normalization::Linear => 1.0,
    };
    let log_mod = hop.norm().ln();
    let raw: Vec<f64> = if log_mod == f64::NEG_INFINITY {
        let shortest = *lengths.iter().min().expect("non-empty");
        lengths
            .iter()
            .map(|&l| if l == shortest { 1.0 } else { 0.0 })
            .collect()
    } else {
        let logs: Vec<f64> = lengths
            .iter()
            .map(|&l| power * l as f64 * log_mod)
            .collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        logs.iter().map(|&lw| (lw - max).exp()).collect()
    };
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

pub fn build_ensemble(
    adj: &BitMatrix,
    model: AmplitudeModel,
    i: usize,
    j: usize,
    cap: usize,
    norm: Normalization,
) -> Result<WorldlineEnsemble, CausalError> {
    check_adjacency(adj)?;
    let enumeration = enumerate_paths(adj, i, j, cap)?;
    let lengths: Vec<usize> = enumeration.chains.iter().map(Chain::link_len).collect();
    let amplitudes: Vec<Complex64> = lengths.iter().map(|&l| model.chain_amplitude(l)).collect();
    let total = amplitudes.iter().sum();
    let weights = chain_weights(&lengths, model.hop, norm);
    Ok(WorldlineEnsemble {
        source: i,
        target: j,
        chains: enumeration.chains,
        amplitudes,
        total,
        weights,
        truncated: enumeration.truncated,
        normalization: norm,
    })
}

/// Nilpotency index: smallest `k` with `Aᵏ = 0`, i.e. one more than the
/// longest path length.
pub fn nilpotency_index(adj: &BitMatrix) -> Result<usize, CausalError> {
    check_adjacency(adj)?;
    let n = adj.n();
    let mut height = vec![0usize; n];
    for i in (0..n).rev() {
        height[i] = adj.row_ones(i).map(|k| height[k] + 1).max().unwrap_or(0);
    }
    Ok(height.into_iter().max().map_or(0, |h| h + 1))
}
