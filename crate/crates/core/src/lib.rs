//! Causal sets in (1+1)-dimensional Minkowski space.
//!
//! - [`geometry`]: events, lightcone coordinates, interval classes, boosts.
//! - [`sprinkle`]: seeded uniform sprinkling into a causal diamond.
//! - [`causal`]: causal and link matrices, closure, reduction, chains.
//! - [`worldline`]: path counts and amplitude sums over chains.
//! - [`kcalculus`]: light-flash construction of dilation and contraction.
//! - [`schwartz`]: seminorms and position expectation of sampled functions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bitmatrix;
pub mod causal;
pub mod geometry;
pub mod kcalculus;
pub mod rng;
pub mod schwartz;
pub mod sprinkle;
pub mod worldline;

pub use bitmatrix::{BitMatrix, SparseMatrix};
pub use causal::{
    build_causal_matrix, build_link_matrix, compare_under_boost, enumerate_chains, longest_chain,
    transitive_closure, BoostComparison, CausalError, CausalMatrix, Chain, ChainEnumeration,
    LinkMatrix,
};
pub use geometry::{Event, IntervalClass, LightconePoint};
pub use sprinkle::{sprinkle, Sprinkle, SprinkleConfig, SprinkleMode};
pub use worldline::{AmplitudeModel, Normalization, WorldlineEnsemble};
