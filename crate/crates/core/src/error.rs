//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by validation and numerical operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A stochastic vector contains a weight that is zero or negative.
    #[error("weight {value} at index {index} is not strictly positive")]
    NonPositiveWeight { index: usize, value: f64 },

    /// A stochastic vector does not sum to 1 within the tolerance.
    #[error("weights sum to {sum}, expected 1 within ±{tol}")]
    NotNormalized { sum: f64, tol: f64 },

    /// Two objects that must agree in dimension do not.
    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    /// An edge probability lies outside (0, 1].
    #[error("entry {value} at ({row}, {col}) is outside (0, 1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },

    /// Two vectors that must have equal length do not.
    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// A vector that must be strictly positive has a bad entry.
    #[error("entry {value} at index {index} is not strictly positive")]
    NonPositiveEntry { index: usize, value: f64 },

    /// A matrix that must be strictly positive has a bad entry.
    #[error("matrix entry {value} at ({row}, {col}) is not strictly positive")]
    NonPositiveMatrixEntry { row: usize, col: usize, value: f64 },

    /// A matrix does not have the shape an operation requires.
    #[error("wrong shape: expected {expected}, got {rows}x{cols}")]
    WrongShape {
        expected: &'static str,
        rows: usize,
        cols: usize,
    },

    /// Bisection could not bracket a sign change. Signals numeric pathology;
    /// unreachable for validated inputs.
    #[error("root bracketing failed on [{lo:e}, {hi:e}]")]
    RootBracketFailure { lo: f64, hi: f64 },

    /// The brute-force grid oracle was asked for dimensions it cannot cover.
    #[error("grid oracle limited to alpha + beta <= {max}, got {got}")]
    DimensionTooLarge { got: usize, max: usize },

    /// Grid resolution below the documented minimum.
    #[error("grid resolution must be at least {min}, got {got}")]
    ResolutionTooSmall { got: usize, min: usize },

    /// Matrix order exceeds the documented ceiling of an exact algorithm.
    #[error("matrix order {n} exceeds the {what} ceiling of {max}")]
    TooLarge {
        what: &'static str,
        n: usize,
        max: usize,
    },

    /// A square matrix was required.
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    /// A 0/1 matrix was required.
    #[error("entry {value} at ({row}, {col}) is not 0 or 1")]
    NotZeroOne { row: usize, col: usize, value: f64 },

    /// An environment symbol does not fit the model alphabets.
    #[error("symbol {symbol} at position {position} exceeds alphabet size {alphabet}")]
    SymbolOutOfRange {
        symbol: usize,
        position: usize,
        alphabet: usize,
    },

    /// A matrix entry is NaN or infinite.
    #[error("entry at ({row}, {col}) is not finite: {value}")]
    NotFinite { row: usize, col: usize, value: f64 },
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
