//! C ABI for the pm-scaler library.
//!
//! Conventions:
//!
//! * A model is an opaque handle created by [`pm_model_from_json`] and
//!   released by [`pm_model_free`]. Handles are immutable and safe to share
//!   across threads.
//! * Every fallible call returns a [`PmStatus`]; outputs go through pointer
//!   arguments that are written only on `PM_STATUS_OK`.
//! * On failure, [`pm_last_error_message`] returns a thread-local,
//!   NUL-terminated description of the most recent error on this thread.
//! * Matrices cross the boundary as row-major buffers of length `n * n`.
//!
//! The matching C header lives at `include/pm_scaler.h`; `cbindgen.toml` is
//! provided to regenerate it where cbindgen is available.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use pm_scaler::environment::{build_probability_matrix, sample_environment};
use pm_scaler::error::Error;
use pm_scaler::experiments::run_convergence;
use pm_scaler::matrix::{Matrix, PositiveMatrix};
use pm_scaler::model::ModelConfig;
use pm_scaler::permanent::{count_integer_permanent, normalized_pm_root, permanent_ryser};
use pm_scaler::scaling::solve_scaling_fixed_point;

/// Status code of every fallible C-ABI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmStatus {
    /// Success; output arguments are valid.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The model JSON failed to parse or validate.
    InvalidConfig = 3,
    /// A documented size ceiling was exceeded.
    LimitExceeded = 4,
    /// Some other argument was rejected (shape, positivity, 0/1 entries...).
    InvalidArgument = 5,
}

/// Opaque, immutable model handle.
pub struct PmModel {
    inner: ModelConfig,
}

/// Scaling-mean solution in C layout.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PmScalingResult {
    pub sm: f64,
    pub iterations: u64,
    pub residual: f64,
    pub contraction_bound: f64,
    /// 1 when the tolerance was met, 0 when the iteration cap was hit.
    pub converged: u8,
}

/// One convergence-sweep record in C layout.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PmConvergenceRecord {
    pub seed: u64,
    pub n: u64,
    pub log_per: f64,
    pub root: f64,
    pub entropy: f64,
    pub sm: f64,
    pub abs_error: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<Vec<u8>>) {
    let text = CString::new(message).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn status_of(err: &Error) -> PmStatus {
    match err {
        Error::TooLarge { .. }
        | Error::DimensionTooLarge { .. }
        | Error::ResolutionTooSmall { .. } => PmStatus::LimitExceeded,
        _ => PmStatus::InvalidArgument,
    }
}

fn fail(status: PmStatus, message: impl Into<Vec<u8>>) -> PmStatus {
    set_error(message);
    status
}

fn fail_with(err: Error) -> PmStatus {
    let status = status_of(&err);
    set_error(err.to_string());
    status
}

/// Description of the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses and validates a model from its JSON form
/// `{"alpha", "beta", "p", "q", "F"}`. On success stores a new handle in
/// `*out_model`; release it with [`pm_model_free`].
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out_model` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_model_from_json(
    json: *const c_char,
    out_model: *mut *mut PmModel,
) -> PmStatus {
    if json.is_null() || out_model.is_null() {
        return fail(PmStatus::NullPointer, "json and out_model must be non-NULL");
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(t) => t,
        Err(_) => return fail(PmStatus::InvalidUtf8, "json is not valid UTF-8"),
    };
    match ModelConfig::from_json(text) {
        Ok(inner) => {
            *out_model = Box::into_raw(Box::new(PmModel { inner }));
            PmStatus::Ok
        }
        Err(message) => fail(PmStatus::InvalidConfig, message),
    }
}

/// Releases a handle created by [`pm_model_from_json`]. NULL is a no-op.
///
/// # Safety
/// `model` must be NULL or a pointer returned by [`pm_model_from_json`] that
/// has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn pm_model_free(model: *mut PmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of row symbols (alpha); 0 if `model` is NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pm_model_alpha(model: *const PmModel) -> u64 {
    model.as_ref().map_or(0, |m| m.inner.alpha() as u64)
}

/// Number of column symbols (beta); 0 if `model` is NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pm_model_beta(model: *const PmModel) -> u64 {
    model.as_ref().map_or(0, |m| m.inner.beta() as u64)
}

/// Computes the scaling mean of the model by the contraction iteration.
/// Pass `tol <= 0` and/or `max_iter == 0` to use the library defaults.
///
/// # Safety
/// `model` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pm_scaling_mean(
    model: *const PmModel,
    tol: f64,
    max_iter: u64,
    out: *mut PmScalingResult,
) -> PmStatus {
    let (Some(model), false) = (model.as_ref(), out.is_null()) else {
        return fail(PmStatus::NullPointer, "model and out must be non-NULL");
    };
    let tol = if tol > 0.0 {
        tol
    } else {
        pm_scaler::scaling::DEFAULT_TOL
    };
    let max_iter = if max_iter > 0 {
        max_iter as usize
    } else {
        pm_scaler::scaling::DEFAULT_MAX_ITER
    };
    match solve_scaling_fixed_point(
        model.inner.edge_matrix().as_positive(),
        model.inner.p(),
        model.inner.q(),
        tol,
        max_iter,
        None,
    ) {
        Ok(solution) => {
            *out = PmScalingResult {
                sm: solution.sm,
                iterations: solution.iterations as u64,
                residual: solution.residual,
                contraction_bound: solution.contraction_bound,
                converged: solution.converged as u8,
            };
            PmStatus::Ok
        }
        Err(err) => fail_with(err),
    }
}

unsafe fn matrix_from_raw(entries: *const f64, n: u64) -> Result<Matrix, PmStatus> {
    if entries.is_null() {
        return Err(fail(PmStatus::NullPointer, "entries must be non-NULL"));
    }
    if n == 0 {
        return Err(fail(PmStatus::InvalidArgument, "n must be at least 1"));
    }
    let len = (n * n) as usize;
    let data = std::slice::from_raw_parts(entries, len).to_vec();
    Matrix::new(n as usize, n as usize, data).map_err(fail_with)
}

/// Permanent of a row-major n x n matrix by the compensated Ryser formula
/// (n <= 28). Either output pointer may be NULL to skip it.
///
/// # Safety
/// `entries` must point to `n * n` doubles.
#[no_mangle]
pub unsafe extern "C" fn pm_permanent(
    entries: *const f64,
    n: u64,
    out_log_value: *mut f64,
    out_value: *mut f64,
) -> PmStatus {
    let matrix = match matrix_from_raw(entries, n) {
        Ok(m) => m,
        Err(status) => return status,
    };
    match permanent_ryser(&matrix) {
        Ok(result) => {
            if !out_log_value.is_null() {
                *out_log_value = result.log_value;
            }
            if !out_value.is_null() {
                *out_value = result.value;
            }
            PmStatus::Ok
        }
        Err(err) => fail_with(err),
    }
}

/// Exact number of perfect matchings of a bipartite graph given as a
/// row-major 0/1 adjacency buffer (n <= 24). The 128-bit count is split into
/// `*out_high * 2^64 + *out_low`; either output pointer may be NULL.
///
/// # Safety
/// `entries` must point to `n * n` bytes.
#[no_mangle]
pub unsafe extern "C" fn pm_matching_count(
    entries: *const u8,
    n: u64,
    out_high: *mut u64,
    out_low: *mut u64,
) -> PmStatus {
    if entries.is_null() {
        return fail(PmStatus::NullPointer, "entries must be non-NULL");
    }
    if n == 0 {
        return fail(PmStatus::InvalidArgument, "n must be at least 1");
    }
    let len = (n * n) as usize;
    let data: Vec<f64> = std::slice::from_raw_parts(entries, len)
        .iter()
        .map(|&b| b as f64)
        .collect();
    let matrix = match Matrix::new(n as usize, n as usize, data) {
        Ok(m) => m,
        Err(err) => return fail_with(err),
    };
    match count_integer_permanent(&matrix) {
        Ok(count) => {
            if !out_high.is_null() {
                *out_high = (count >> 64) as u64;
            }
            if !out_low.is_null() {
                *out_low = count as u64;
            }
            PmStatus::Ok
        }
        Err(err) => fail_with(err),
    }
}

/// `(per(A)/n!)^(1/n)` of a strictly positive row-major n x n matrix.
///
/// # Safety
/// `entries` must point to `n * n` doubles; `out_root` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pm_normalized_root(
    entries: *const f64,
    n: u64,
    out_root: *mut f64,
) -> PmStatus {
    if out_root.is_null() {
        return fail(PmStatus::NullPointer, "out_root must be non-NULL");
    }
    let matrix = match matrix_from_raw(entries, n) {
        Ok(m) => m,
        Err(status) => return status,
    };
    let positive = match PositiveMatrix::new(matrix) {
        Ok(m) => m,
        Err(err) => return fail_with(err),
    };
    match normalized_pm_root(&positive) {
        Ok(root) => {
            *out_root = root;
            PmStatus::Ok
        }
        Err(err) => fail_with(err),
    }
}

/// Runs the quenched-limit sweep over every (seed, n) pair and writes
/// `seed_count * n_count` records, ordered by seed then by n, into
/// `out_records`.
///
/// # Safety
/// `n_list` must point to `n_count` entries, `seeds` to `seed_count`
/// entries, and `out_records` to `seed_count * n_count` records.
#[no_mangle]
pub unsafe extern "C" fn pm_convergence_run(
    model: *const PmModel,
    n_list: *const u64,
    n_count: u64,
    seeds: *const u64,
    seed_count: u64,
    out_records: *mut PmConvergenceRecord,
) -> PmStatus {
    let Some(model) = model.as_ref() else {
        return fail(PmStatus::NullPointer, "model must be non-NULL");
    };
    if n_list.is_null() || seeds.is_null() || out_records.is_null() {
        return fail(
            PmStatus::NullPointer,
            "n_list, seeds and out_records must be non-NULL",
        );
    }
    if n_count == 0 || seed_count == 0 {
        return fail(PmStatus::InvalidArgument, "n_count and seed_count must be at least 1");
    }
    let ns: Vec<usize> = std::slice::from_raw_parts(n_list, n_count as usize)
        .iter()
        .map(|&n| n as usize)
        .collect();
    let seed_slice = std::slice::from_raw_parts(seeds, seed_count as usize);
    match run_convergence(&model.inner, &ns, seed_slice) {
        Ok(records) => {
            let out = std::slice::from_raw_parts_mut(out_records, records.len());
            for (slot, record) in out.iter_mut().zip(&records) {
                *slot = PmConvergenceRecord {
                    seed: record.seed,
                    n: record.n as u64,
                    log_per: record.log_per,
                    root: record.root,
                    entropy: record.entropy,
                    sm: record.sm,
                    abs_error: record.abs_error,
                };
            }
            PmStatus::Ok
        }
        Err(err) => fail_with(err),
    }
}

/// Samples an environment and writes the n x n probability matrix `A_n`
/// row-major into `out_entries`.
///
/// # Safety
/// `model` must be a live handle; `out_entries` must point to `n * n`
/// doubles.
#[no_mangle]
pub unsafe extern "C" fn pm_probability_matrix(
    model: *const PmModel,
    n: u64,
    seed: u64,
    out_entries: *mut f64,
) -> PmStatus {
    let Some(model) = model.as_ref() else {
        return fail(PmStatus::NullPointer, "model must be non-NULL");
    };
    if out_entries.is_null() {
        return fail(PmStatus::NullPointer, "out_entries must be non-NULL");
    }
    if n == 0 {
        return fail(PmStatus::InvalidArgument, "n must be at least 1");
    }
    let env = sample_environment(&model.inner, n as usize, seed);
    match build_probability_matrix(&model.inner, &env) {
        Ok(a) => {
            let out = std::slice::from_raw_parts_mut(out_entries, (n * n) as usize);
            out.copy_from_slice(a.as_matrix().data());
            PmStatus::Ok
        }
        Err(err) => fail_with(err),
    }
}
