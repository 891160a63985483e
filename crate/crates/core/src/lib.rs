//! Scaling means, exact permanents, and perfect-matching statistics of
//! inhomogeneous random bipartite graphs in random environments.
//!
//! The model: two alphabets of sizes alpha and beta with sampling weights
//! `p` and `q`, and an alpha x beta matrix `F` of edge probabilities. An
//! environment draws i.i.d. symbol sequences `w` and `m`; the n x n matrix
//! `A_n` with `a_ij = F[w_i][m_j]` then drives independent Bernoulli edges
//! of a random bipartite graph. The expected number of perfect matchings of
//! that graph is exactly `per(A_n)`, and for almost every environment
//!
//! ```text
//! (per(A_n) / n!)^(1/n)  ->  sm(F)      as n -> infinity,
//! ```
//!
//! where `sm(F)` is the scaling mean of `F` with respect to `(p, q)` — the
//! same `n! c^n` growth law as an Erdos-Renyi graph with edge probability
//! `c = sm(F)`.
//!
//! Module map:
//!
//! * [`model`] — validated domain types and the JSON config format;
//! * [`scaling`] — the scaling mean: fixed-point solver, closed forms,
//!   brute-force grid oracle, Hilbert metric;
//! * [`permanent`] — exact permanents (permutation sum, Gray-code Ryser,
//!   integer Ryser) and normalized matching statistics;
//! * [`environment`] — seeded environments, probability matrices, graph
//!   sampling;
//! * [`experiments`] — reproducible sweeps with CSV emission;
//! * [`cli`] — the `pm-scaler` command-line front end.
//!
//! Every type is immutable after construction and every operation is a pure
//! function of its inputs plus an explicit seed, so all of it can be driven
//! concurrently without synchronization.

pub mod cli;
pub mod environment;
pub mod error;
pub mod experiments;
pub mod matrix;
pub mod model;
pub mod permanent;
pub mod rng;
pub mod scaling;

pub use error::{Error, Result};
pub use matrix::{Matrix, PositiveMatrix};
pub use model::{
    validate_model, validate_stochastic_vector, EdgeDistributionMatrix, ModelConfig, RawModel,
    StochasticVector,
};
pub use scaling::{solve_scaling_fixed_point, ScalingSolution, ScalingVectorPair};
