//! Domain types and validation for the random-graph model.
//!
//! A model is the tuple (alpha, beta, p, q, F): two symbol alphabets with
//! their sampling weights and the alpha x beta matrix of edge probabilities.
//! All types are immutable after validation, so a `ModelConfig` can be shared
//! freely across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, PositiveMatrix};

/// Absolute tolerance on the sum of stochastic-vector weights.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Probability weights over a finite alphabet: strictly positive, summing
/// to 1 within [`NORMALIZATION_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticVector {
    weights: Vec<f64>,
}

impl StochasticVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        validate_stochastic_vector(weights)
    }

    /// Uniform weights over `len` symbols.
    pub fn uniform(len: usize) -> Result<Self> {
        Self::new(vec![1.0 / len as f64; len])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Validates probability weights: every weight strictly positive and finite,
/// sum equal to 1 within [`NORMALIZATION_TOL`].
///
/// Weights of exactly 0 are rejected rather than dropped; unused symbols must
/// be removed by the caller so index semantics stay stable.
pub fn validate_stochastic_vector(raw: Vec<f64>) -> Result<StochasticVector> {
    for (index, &value) in raw.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveWeight { index, value });
        }
    }
    let sum: f64 = raw.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized {
            sum,
            tol: NORMALIZATION_TOL,
        });
    }
    Ok(StochasticVector { weights: raw })
}

/// The alpha x beta matrix F of edge probabilities, every entry in (0, 1].
///
/// Entries equal to 1 are allowed (deterministic edges); entries equal to 0
/// are rejected because the limit theory and the contraction estimate both
/// require strict positivity (uniform ellipticity).
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeDistributionMatrix {
    inner: PositiveMatrix,
}

impl EdgeDistributionMatrix {
    pub fn new(matrix: Matrix) -> Result<Self> {
        for r in 0..matrix.rows() {
            for s in 0..matrix.cols() {
                let value = matrix.get(r, s);
                if !(value > 0.0 && value <= 1.0) {
                    return Err(Error::EntryOutOfRange {
                        row: r,
                        col: s,
                        value,
                    });
                }
            }
        }
        Ok(Self {
            inner: PositiveMatrix::new(matrix)?,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    /// Number of row symbols (alpha).
    pub fn alpha(&self) -> usize {
        self.inner.rows()
    }

    /// Number of column symbols (beta).
    pub fn beta(&self) -> usize {
        self.inner.cols()
    }

    pub fn as_positive(&self) -> &PositiveMatrix {
        &self.inner
    }

    pub fn as_matrix(&self) -> &Matrix {
        self.inner.as_matrix()
    }
}

/// JSON wire form of a model: `{"alpha", "beta", "p", "q", "F"}` with
/// row-major `F`. This is the single config format the CLI consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawModel {
    pub alpha: usize,
    pub beta: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    #[serde(rename = "F")]
    pub f: Vec<Vec<f64>>,
}

/// A validated model: dimensionally consistent (alpha, beta, p, q, F).
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    p: StochasticVector,
    q: StochasticVector,
    f: EdgeDistributionMatrix,
}

impl ModelConfig {
    /// Assembles and cross-validates the parts directly.
    pub fn new(p: StochasticVector, q: StochasticVector, f: EdgeDistributionMatrix) -> Result<Self> {
        if f.alpha() != p.len() {
            return Err(Error::DimensionMismatch {
                what: "rows of F vs length of p",
                expected: p.len(),
                actual: f.alpha(),
            });
        }
        if f.beta() != q.len() {
            return Err(Error::DimensionMismatch {
                what: "cols of F vs length of q",
                expected: q.len(),
                actual: f.beta(),
            });
        }
        Ok(Self { p, q, f })
    }

    pub fn alpha(&self) -> usize {
        self.p.len()
    }

    pub fn beta(&self) -> usize {
        self.q.len()
    }

    pub fn p(&self) -> &StochasticVector {
        &self.p
    }

    pub fn q(&self) -> &StochasticVector {
        &self.q
    }

    pub fn edge_matrix(&self) -> &EdgeDistributionMatrix {
        &self.f
    }

    /// Wire form with the same content; `validate_model(to_raw())` is the identity.
    pub fn to_raw(&self) -> RawModel {
        RawModel {
            alpha: self.alpha(),
            beta: self.beta(),
            p: self.p.weights().to_vec(),
            q: self.q.weights().to_vec(),
            f: self.f.as_matrix().to_rows(),
        }
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let raw: RawModel = serde_json::from_str(text).map_err(|e| e.to_string())?;
        validate_model(raw).map_err(|e| e.to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("model serialization cannot fail")
    }
}

/// Validates a raw config: every contained invariant plus dimensional
/// consistency between `alpha`, `beta`, `p`, `q` and `F`.
pub fn validate_model(raw: RawModel) -> Result<ModelConfig> {
    let p = validate_stochastic_vector(raw.p)?;
    let q = validate_stochastic_vector(raw.q)?;
    if p.len() != raw.alpha {
        return Err(Error::DimensionMismatch {
            what: "length of p vs alpha",
            expected: raw.alpha,
            actual: p.len(),
        });
    }
    if q.len() != raw.beta {
        return Err(Error::DimensionMismatch {
            what: "length of q vs beta",
            expected: raw.beta,
            actual: q.len(),
        });
    }
    let f = EdgeDistributionMatrix::from_rows(&raw.f)?;
    ModelConfig::new(p, q, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric_2x2() -> RawModel {
        RawModel {
            alpha: 2,
            beta: 2,
            p: vec![0.5, 0.5],
            q: vec![0.5, 0.5],
            f: vec![vec![0.8, 0.2], vec![0.2, 0.8]],
        }
    }

    #[test]
    fn single_symbol_vector_is_valid() {
        let v = validate_stochastic_vector(vec![1.0]).unwrap();
        assert_eq!(v.weights(), &[1.0]);
    }

    #[test]
    fn symmetric_vector_is_valid() {
        assert!(validate_stochastic_vector(vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn rejects_unnormalized_vector() {
        let err = validate_stochastic_vector(vec![0.3, 0.3]).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
    }

    #[test]
    fn rejects_zero_and_negative_weights() {
        assert!(matches!(
            validate_stochastic_vector(vec![0.0, 1.0]),
            Err(Error::NonPositiveWeight { index: 0, .. })
        ));
        assert!(matches!(
            validate_stochastic_vector(vec![1.5, -0.5]),
            Err(Error::NonPositiveWeight { index: 1, .. })
        ));
    }

    #[test]
    fn erdos_renyi_degenerate_model_is_valid() {
        let raw = RawModel {
            alpha: 1,
            beta: 1,
            p: vec![1.0],
            q: vec![1.0],
            f: vec![vec![0.3]],
        };
        let model = validate_model(raw).unwrap();
        assert_eq!(model.alpha(), 1);
        assert_eq!(model.edge_matrix().as_matrix().get(0, 0), 0.3);
    }

    #[test]
    fn running_example_model_is_valid() {
        let model = validate_model(symmetric_2x2()).unwrap();
        assert_eq!((model.alpha(), model.beta()), (2, 2));
    }

    #[test]
    fn rejects_zero_edge_probability() {
        let mut raw = symmetric_2x2();
        raw.f[1][0] = 0.0;
        let err = validate_model(raw).unwrap_err();
        assert!(matches!(
            err,
            Error::EntryOutOfRange {
                row: 1,
                col: 0,
                ..
            }
        ));
    }

    #[test]
    fn rejects_edge_probability_above_one() {
        let mut raw = symmetric_2x2();
        raw.f[0][0] = 1.2;
        assert!(matches!(
            validate_model(raw),
            Err(Error::EntryOutOfRange { .. })
        ));
    }

    #[test]
    fn unit_edge_probability_is_allowed() {
        let mut raw = symmetric_2x2();
        raw.f[0][0] = 1.0;
        assert!(validate_model(raw).is_ok());
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let mut raw = symmetric_2x2();
        raw.alpha = 3;
        assert!(matches!(
            validate_model(raw),
            Err(Error::DimensionMismatch { .. })
        ));

        let mut raw = symmetric_2x2();
        raw.f = vec![vec![0.8, 0.2]];
        assert!(matches!(
            validate_model(raw),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_identity() {
        let model = validate_model(symmetric_2x2()).unwrap();
        let back = ModelConfig::from_json(&model.to_json()).unwrap();
        assert_eq!(model, back);
    }
}
