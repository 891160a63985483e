//! Scaling mean of a positive matrix.
//!
//! The scaling mean of an alpha x beta positive matrix `F` with respect to
//! stochastic weight vectors `p` and `q` is the infimum over positive scaling
//! vectors (x, y) of
//!
//! ```text
//! (prod_r x_r^-p_r) (prod_s y_s^-q_s) * sum_{r,s} x_r f_rs y_s p_r q_s
//! ```
//!
//! It lies between the minimum and maximum entries of `F` and scales linearly
//! with `F`. The infimum is attained at the fixed point of the cone map
//! `T = K1 . I2 . K2 . I1`, where `I1`, `I2` invert componentwise and
//!
//! ```text
//! (K2 x)_j = sum_i f_ij x_i p_i        (K1 y)_i = sum_j f_ij y_j q_j .
//! ```
//!
//! `T` is a strict contraction in the Hilbert projective metric with factor
//! at most `tanh^2(delta/4)`, `delta = 2 log(max f / min f)`, so the solver
//! converges exponentially fast from any positive start.
//!
//! Three independent routes cross-check the solver: a closed form for 2x2
//! matrices under uniform weights, a closed form for alpha x 2 matrices via a
//! one-dimensional root equation, and brute-force minimization of the
//! objective on a logarithmic grid.

use crate::error::{Error, Result};
use crate::matrix::PositiveMatrix;
use crate::model::StochasticVector;

/// Default stopping tolerance on the Hilbert distance between successive
/// iterates. The a-posteriori fixed-point error is bounded by
/// `tol * kappa / (1 - kappa)`.
pub const DEFAULT_TOL: f64 = 1e-13;

/// Default iteration cap; with any sane matrix the contraction factor keeps
/// the actual count two orders of magnitude below this.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Grid oracle dimension cap: alpha + beta at most this.
pub const GRID_MAX_DIM: usize = 6;

/// Grid oracle minimum points per axis.
pub const GRID_MIN_RESOLUTION: usize = 16;

/// The variational variables: strictly positive scaling vectors of lengths
/// alpha and beta.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingVectorPair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ScalingVectorPair {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_positive(&x)?;
        check_positive(&y)?;
        Ok(Self { x, y })
    }
}

/// Output of the fixed-point solver.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingSolution {
    /// The scaling mean, `prod x_i^p_i * prod y_j^q_j` at the fixed point.
    pub sm: f64,
    /// Fixed-point scaling vectors, x normalized so its first entry is 1.
    pub pair: ScalingVectorPair,
    /// Number of accepted iterate updates before the stopping rule fired.
    pub iterations: usize,
    /// Hilbert distance of the last step, `d(T(x), x)`.
    pub residual: f64,
    /// Certified contraction factor `tanh^2(delta/4)`.
    pub contraction_bound: f64,
    /// False when the iteration cap was hit first; the solution then holds
    /// the best iterate so far.
    pub converged: bool,
}

fn check_positive(v: &[f64]) -> Result<()> {
    for (index, &value) in v.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveEntry { index, value });
        }
    }
    Ok(())
}

fn check_dims(f: &PositiveMatrix, p: &StochasticVector, q: &StochasticVector) -> Result<()> {
    if f.rows() != p.len() {
        return Err(Error::DimensionMismatch {
            what: "rows of F vs length of p",
            expected: p.len(),
            actual: f.rows(),
        });
    }
    if f.cols() != q.len() {
        return Err(Error::DimensionMismatch {
            what: "cols of F vs length of q",
            expected: q.len(),
            actual: f.cols(),
        });
    }
    Ok(())
}

/// Hilbert projective (pseudo-)distance on the positive cone:
/// `d(x, z) = log(max_i x_i/z_i / min_i x_i/z_i)`.
///
/// Symmetric, nonnegative, and invariant under positive scaling of either
/// argument.
pub fn hilbert_distance(x: &[f64], z: &[f64]) -> Result<f64> {
    if x.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: z.len(),
        });
    }
    check_positive(x)?;
    check_positive(z)?;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut min_ratio = f64::INFINITY;
    for (&xi, &zi) in x.iter().zip(z) {
        let r = xi / zi;
        max_ratio = max_ratio.max(r);
        min_ratio = min_ratio.min(r);
    }
    Ok((max_ratio / min_ratio).ln())
}

/// `K2 . I1`: maps a positive x (length alpha) to y (length beta),
/// `y_j = sum_i f_ij (1/x_i) p_i`.
fn transfer_y(f: &PositiveMatrix, p: &StochasticVector, x: &[f64]) -> Vec<f64> {
    let weights = p.weights();
    (0..f.cols())
        .map(|j| {
            (0..f.rows())
                .map(|i| f.get(i, j) * weights[i] / x[i])
                .sum()
        })
        .collect()
}

/// `K1 . I2`: maps a positive y (length beta) to x (length alpha),
/// `x_i = sum_j f_ij (1/y_j) q_j`.
fn transfer_x(f: &PositiveMatrix, q: &StochasticVector, y: &[f64]) -> Vec<f64> {
    let weights = q.weights();
    (0..f.rows())
        .map(|i| {
            (0..f.cols())
                .map(|j| f.get(i, j) * weights[j] / y[j])
                .sum()
        })
        .collect()
}

/// One application of the cone map `T = K1 . I2 . K2 . I1`.
///
/// `T` is homogeneous of degree 1 and contracts the Hilbert distance by at
/// least [`contraction_bound`].
pub fn apply_t(
    f: &PositiveMatrix,
    p: &StochasticVector,
    q: &StochasticVector,
    x: &[f64],
) -> Result<Vec<f64>> {
    check_dims(f, p, q)?;
    if x.len() != p.len() {
        return Err(Error::DimensionMismatch {
            what: "length of x vs length of p",
            expected: p.len(),
            actual: x.len(),
        });
    }
    check_positive(x)?;
    Ok(transfer_x(f, q, &transfer_y(f, p, x)))
}

/// Certified contraction factor of `T` in the Hilbert metric:
/// `tanh^2(delta/4)` with `delta = 2 log(max f / min f)`. Always in [0, 1).
pub fn contraction_bound(f: &PositiveMatrix) -> f64 {
    let delta = 2.0 * (f.max_entry() / f.min_entry()).ln();
    let t = (delta / 4.0).tanh();
    t * t
}

/// `log(prod x_i^w_i)` evaluated in log space.
fn log_weighted_product(values: &[f64], weights: &[f64]) -> f64 {
    values
        .iter()
        .zip(weights)
        .map(|(&v, &w)| w * v.ln())
        .sum()
}

/// Scaling mean from a fixed point x: `y = K2(I1(x))`,
/// `sm = prod x_i^p_i * prod y_j^q_j`.
fn scaling_mean_at(f: &PositiveMatrix, p: &StochasticVector, q: &StochasticVector, x: &[f64]) -> (f64, Vec<f64>) {
    let y = transfer_y(f, p, x);
    let log_sm = log_weighted_product(x, p.weights()) + log_weighted_product(&y, q.weights());
    (log_sm.exp(), y)
}

/// Computes the scaling mean by iterating `x <- T(x) / T(x)[0]` until the
/// Hilbert distance between successive iterates drops to `tol`.
///
/// Any positive start converges; `x0 = None` uses the all-ones vector. When
/// the iteration cap is hit the best iterate so far is returned with
/// `converged = false` rather than an error.
pub fn solve_scaling_fixed_point(
    f: &PositiveMatrix,
    p: &StochasticVector,
    q: &StochasticVector,
    tol: f64,
    max_iter: usize,
    x0: Option<&[f64]>,
) -> Result<ScalingSolution> {
    check_dims(f, p, q)?;
    let kappa = contraction_bound(f);

    // 1x1 matrices have sm = f11 with fixed point x = 1, y = f11.
    if f.rows() == 1 && f.cols() == 1 {
        let value = f.get(0, 0);
        return Ok(ScalingSolution {
            sm: value,
            pair: ScalingVectorPair::new(vec![1.0], vec![value])?,
            iterations: 0,
            residual: 0.0,
            contraction_bound: kappa,
            converged: true,
        });
    }

    let mut x = match x0 {
        Some(v) => {
            if v.len() != p.len() {
                return Err(Error::DimensionMismatch {
                    what: "length of x0 vs length of p",
                    expected: p.len(),
                    actual: v.len(),
                });
            }
            check_positive(v)?;
            v.to_vec()
        }
        None => vec![1.0; p.len()],
    };
    normalize(&mut x);

    let mut iterations = 0;
    let (residual, converged) = loop {
        let tx = transfer_x(f, q, &transfer_y(f, p, &x));
        let r = hilbert_distance(&tx, &x)?;
        if r <= tol {
            x = tx;
            normalize(&mut x);
            break (r, true);
        }
        if iterations >= max_iter {
            break (r, false);
        }
        x = tx;
        normalize(&mut x);
        iterations += 1;
    };

    let (sm, y) = scaling_mean_at(f, p, q, &x);
    Ok(ScalingSolution {
        sm,
        pair: ScalingVectorPair::new(x, y)?,
        iterations,
        residual,
        contraction_bound: kappa,
        converged,
    })
}

fn normalize(x: &mut [f64]) {
    let first = x[0];
    for v in x.iter_mut() {
        *v /= first;
    }
}

/// The objective whose infimum over positive pairs is the scaling mean:
///
/// ```text
/// (prod x_r^-p_r)(prod y_s^-q_s) * sum_{r,s} x_r f_rs y_s p_r q_s
/// ```
///
/// Always at least `sm(F)`; invariant under positive rescaling of x or y.
pub fn variational_objective(
    f: &PositiveMatrix,
    p: &StochasticVector,
    q: &StochasticVector,
    pair: &ScalingVectorPair,
) -> Result<f64> {
    check_dims(f, p, q)?;
    if pair.x.len() != p.len() {
        return Err(Error::DimensionMismatch {
            what: "length of x vs length of p",
            expected: p.len(),
            actual: pair.x.len(),
        });
    }
    if pair.y.len() != q.len() {
        return Err(Error::DimensionMismatch {
            what: "length of y vs length of q",
            expected: q.len(),
            actual: pair.y.len(),
        });
    }
    let pw = p.weights();
    let qw = q.weights();
    let mut bilinear = 0.0;
    for (r, (&xr, &pr)) in pair.x.iter().zip(pw).enumerate() {
        for (s, (&ys, &qs)) in pair.y.iter().zip(qw).enumerate() {
            bilinear += xr * f.get(r, s) * ys * pr * qs;
        }
    }
    let log_normalizer =
        log_weighted_product(&pair.x, pw) + log_weighted_product(&pair.y, qw);
    Ok((bilinear.ln() - log_normalizer).exp())
}

/// Brute-force scaling mean: minimizes [`variational_objective`] over a
/// logarithmic grid.
///
/// Scale invariance pins `x_1 = y_1 = 1`; the remaining log-coordinates range
/// over `[-delta, delta]`, `delta = 2 log(max f / min f)`, with `resolution`
/// points per axis. The minimizer's log-coordinates are bounded by `delta/2`,
/// so it lies strictly inside the box.
///
/// Resolution bound: `log(objective)` is convex in log-coordinates with
/// Hessian at most `2 I`, and some grid node is within `h/2 = delta /
/// (resolution - 1)` of the minimizer per axis, so the grid minimum exceeds
/// the true scaling mean by at most a factor `exp(free_dims * h^2 / 4)` —
/// and, being an evaluation of the objective, never undercuts it.
///
/// Exponential in alpha + beta; limited to `alpha + beta <= 6`.
pub fn grid_oracle_sm(
    f: &PositiveMatrix,
    p: &StochasticVector,
    q: &StochasticVector,
    resolution: usize,
) -> Result<f64> {
    check_dims(f, p, q)?;
    let (alpha, beta) = (f.rows(), f.cols());
    if alpha + beta > GRID_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            got: alpha + beta,
            max: GRID_MAX_DIM,
        });
    }
    if resolution < GRID_MIN_RESOLUTION {
        return Err(Error::ResolutionTooSmall {
            got: resolution,
            min: GRID_MIN_RESOLUTION,
        });
    }

    let delta = 2.0 * (f.max_entry() / f.min_entry()).ln();
    let free = (alpha - 1) + (beta - 1);
    let axis: Vec<f64> = if delta == 0.0 {
        vec![0.0]
    } else {
        (0..resolution)
            .map(|k| -delta + 2.0 * delta * k as f64 / (resolution - 1) as f64)
            .collect()
    };

    let mut x = vec![1.0; alpha];
    let mut y = vec![1.0; beta];
    let mut counter = vec![0usize; free];
    let mut best = f64::INFINITY;
    loop {
        for (d, &k) in counter.iter().enumerate() {
            let t = axis[k].exp();
            if d < alpha - 1 {
                x[d + 1] = t;
            } else {
                y[d - (alpha - 1) + 1] = t;
            }
        }
        let pair = ScalingVectorPair {
            x: x.clone(),
            y: y.clone(),
        };
        let value = variational_objective(f, p, q, &pair)?;
        if value < best {
            best = value;
        }

        // mixed-radix increment; done when it wraps around
        let mut d = 0;
        loop {
            if d == free {
                return Ok(best);
            }
            counter[d] += 1;
            if counter[d] < axis.len() {
                break;
            }
            counter[d] = 0;
            d += 1;
        }
    }
}

/// Closed form for a 2x2 matrix under uniform weights p = q = (1/2, 1/2):
/// `(sqrt(f11 f22) + sqrt(f12 f21)) / 2`.
pub fn closed_form_2x2(f: &PositiveMatrix) -> Result<f64> {
    if f.rows() != 2 || f.cols() != 2 {
        return Err(Error::WrongShape {
            expected: "2x2",
            rows: f.rows(),
            cols: f.cols(),
        });
    }
    Ok(((f.get(0, 0) * f.get(1, 1)).sqrt() + (f.get(0, 1) * f.get(1, 0)).sqrt()) / 2.0)
}

/// Closed form for an alpha x 2 matrix: with `chi` the unique positive root of
///
/// ```text
/// sum_r p_r f_r1 / (f_r1 + f_r2 chi) = q_1 ,
/// ```
///
/// the scaling mean is `q1^q1 (q2/chi)^q2 prod_r (f_r1 + f_r2 chi)^p_r`.
///
/// The left side decreases strictly from 1 to 0 as `chi` runs over (0, inf)
/// and `q_1` lies strictly between, so bisection on `log chi` over the
/// bracket `[2^-60, 2^60]` is unconditionally safe; it stops at relative
/// width 1e-14.
pub fn closed_form_alpha_2(
    f: &PositiveMatrix,
    p: &StochasticVector,
    q: &StochasticVector,
) -> Result<f64> {
    if f.cols() != 2 {
        return Err(Error::WrongShape {
            expected: "alpha x 2",
            rows: f.rows(),
            cols: f.cols(),
        });
    }
    check_dims(f, p, q)?;

    let pw = p.weights();
    let (q1, q2) = (q.weights()[0], q.weights()[1]);
    let root_lhs = |log_chi: f64| -> f64 {
        let chi = log_chi.exp();
        (0..f.rows())
            .map(|r| pw[r] * f.get(r, 0) / (f.get(r, 0) + f.get(r, 1) * chi))
            .sum::<f64>()
    };

    let (mut lo, mut hi) = (-60.0 * std::f64::consts::LN_2, 60.0 * std::f64::consts::LN_2);
    if root_lhs(lo) < q1 || root_lhs(hi) > q1 {
        return Err(Error::RootBracketFailure {
            lo: lo.exp(),
            hi: hi.exp(),
        });
    }
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if root_lhs(mid) >= q1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let log_chi = 0.5 * (lo + hi);
    let chi = log_chi.exp();

    let mut log_sm = q1 * q1.ln() + q2 * (q2.ln() - log_chi);
    for (r, &pr) in pw.iter().enumerate() {
        log_sm += pr * (f.get(r, 0) + f.get(r, 1) * chi).ln();
    }
    Ok(log_sm.exp())
}
