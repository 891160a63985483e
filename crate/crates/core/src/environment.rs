//! Random environments and realized graphs.
//!
//! An environment is a pair of i.i.d. symbol sequences: `w` drawn from the
//! weights `p` over {0..alpha-1} and `m` drawn from `q` over {0..beta-1}.
//! It fixes the n x n matrix `A` of edge probabilities via
//! `a_ij = F[w_i][m_j]`; graphs are then drawn edge-by-edge with independent
//! Bernoulli indicators.
//!
//! Everything is a pure function of `(inputs, seed)`. A master seed feeds
//! three sub-streams via [`mix`]: stream 1 for `w`, stream 2 for `m`,
//! stream 3 for edge draws, so environment and graph randomness never
//! overlap.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, PositiveMatrix};
use crate::model::ModelConfig;
use crate::rng::{mix, SplitMix64};

/// Sub-stream index for the `w` symbol sequence.
pub const W_STREAM: u64 = 1;
/// Sub-stream index for the `m` symbol sequence.
pub const M_STREAM: u64 = 2;
/// Sub-stream index for edge indicator draws.
pub const GRAPH_STREAM: u64 = 3;

/// The first n symbols of an environment, with the seed that produced them.
/// Symbols are 0-based indices into the model alphabets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvironmentPrefix {
    pub w: Vec<usize>,
    pub m: Vec<usize>,
    pub seed: u64,
    pub n: usize,
}

/// The n x n matrix `A` with `a_ij = F[w_i][m_j]`; entries in (0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    inner: PositiveMatrix,
}

impl ProbabilityMatrix {
    pub fn n(&self) -> usize {
        self.inner.rows()
    }

    pub fn as_positive(&self) -> &PositiveMatrix {
        &self.inner
    }

    pub fn as_matrix(&self) -> &Matrix {
        self.inner.as_matrix()
    }
}

/// A realized graph: 0/1 adjacency entries, with the seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSample {
    pub adjacency: Matrix,
    pub seed: u64,
}

/// One symbol by cumulative-weight inversion of a single uniform draw.
fn draw_symbol(weights: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    for (idx, &w) in weights.iter().enumerate() {
        cum += w;
        if u < cum {
            return idx;
        }
    }
    weights.len() - 1
}

/// Draws the first `n` symbols of both environment sequences.
///
/// Deterministic in `(model, n, seed)`, and extending `n` with the same seed
/// extends the same sequences: each symbol consumes exactly one uniform from
/// its stream.
pub fn sample_environment(model: &ModelConfig, n: usize, seed: u64) -> EnvironmentPrefix {
    let mut w_rng = SplitMix64::new(mix(seed, W_STREAM));
    let mut m_rng = SplitMix64::new(mix(seed, M_STREAM));
    let w = (0..n)
        .map(|_| draw_symbol(model.p().weights(), w_rng.next_f64()))
        .collect();
    let m = (0..n)
        .map(|_| draw_symbol(model.q().weights(), m_rng.next_f64()))
        .collect();
    EnvironmentPrefix { w, m, seed, n }
}

/// Builds `A` from an environment by exact lookup: `a_ij = F[w_i][m_j]`.
pub fn build_probability_matrix(
    model: &ModelConfig,
    env: &EnvironmentPrefix,
) -> Result<ProbabilityMatrix> {
    let f = model.edge_matrix();
    for (position, &symbol) in env.w.iter().enumerate() {
        if symbol >= f.alpha() {
            return Err(Error::SymbolOutOfRange {
                symbol,
                position,
                alphabet: f.alpha(),
            });
        }
    }
    for (position, &symbol) in env.m.iter().enumerate() {
        if symbol >= f.beta() {
            return Err(Error::SymbolOutOfRange {
                symbol,
                position,
                alphabet: f.beta(),
            });
        }
    }
    let n = env.n;
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            data.push(f.as_matrix().get(env.w[i], env.m[j]));
        }
    }
    Ok(ProbabilityMatrix {
        inner: PositiveMatrix::new(Matrix::new(n, n, data)?)?,
    })
}

/// Draws one graph: edge (i, j) is present iff the next uniform from the
/// edge stream is below `a_ij`, consumed in row-major order. Deterministic
/// in `(a, seed)`.
pub fn sample_graph(a: &ProbabilityMatrix, seed: u64) -> GraphSample {
    let mut rng = SplitMix64::new(mix(seed, GRAPH_STREAM));
    let n = a.n();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let present = rng.next_f64() < a.as_matrix().get(i, j);
            data.push(if present { 1.0 } else { 0.0 });
        }
    }
    GraphSample {
        adjacency: Matrix::new(n, n, data).expect("adjacency shape is valid by construction"),
        seed,
    }
}

/// `log P(G = K_{n,n}) = sum_ij log a_ij`: the log-probability that every
/// edge is present.
pub fn complete_graph_log_probability(a: &ProbabilityMatrix) -> f64 {
    a.as_matrix().data().iter().map(|&v| v.ln()).sum()
}
