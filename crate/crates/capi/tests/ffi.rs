//! Exercises the C ABI exactly as a foreign caller would: raw pointers,
//! status codes, flat buffers.

use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use pm_scaler_capi::{
    pm_convergence_run, pm_last_error_message, pm_matching_count, pm_model_alpha,
    pm_model_beta, pm_model_free, pm_model_from_json, pm_normalized_root, pm_permanent,
    pm_probability_matrix, pm_scaling_mean, pm_version, PmConvergenceRecord, PmModel,
    PmScalingResult, PmStatus,
};

const SYMMETRIC: &str = r#"{"alpha": 2, "beta": 2, "p": [0.5, 0.5], "q": [0.5, 0.5],
    "F": [[0.8, 0.2], [0.2, 0.8]]}"#;

fn load(json: &str) -> *mut PmModel {
    let text = CString::new(json).unwrap();
    let mut handle: *mut PmModel = ptr::null_mut();
    let status = unsafe { pm_model_from_json(text.as_ptr(), &mut handle) };
    assert_eq!(status, PmStatus::Ok);
    assert!(!handle.is_null());
    handle
}

#[test]
fn model_lifecycle_and_dimensions() {
    let model = load(SYMMETRIC);
    unsafe {
        assert_eq!(pm_model_alpha(model), 2);
        assert_eq!(pm_model_beta(model), 2);
        pm_model_free(model);
        pm_model_free(ptr::null_mut());
    }
}

#[test]
fn scaling_mean_of_the_symmetric_model() {
    let model = load(SYMMETRIC);
    let mut result = PmScalingResult {
        sm: 0.0,
        iterations: 0,
        residual: 0.0,
        contraction_bound: 0.0,
        converged: 0,
    };
    let status = unsafe { pm_scaling_mean(model, 0.0, 0, &mut result) };
    assert_eq!(status, PmStatus::Ok);
    assert!((result.sm - 0.5).abs() < 1e-12, "sm = {}", result.sm);
    assert_eq!(result.converged, 1);
    assert!(result.residual <= 1e-13);
    assert!(result.contraction_bound < 1.0);
    unsafe { pm_model_free(model) };
}

#[test]
fn invalid_json_reports_config_error_with_message() {
    let text = CString::new("{\"alpha\": 1}").unwrap();
    let mut handle: *mut PmModel = ptr::null_mut();
    let status = unsafe { pm_model_from_json(text.as_ptr(), &mut handle) };
    assert_eq!(status, PmStatus::InvalidConfig);
    assert!(handle.is_null());
    let message = unsafe { CStr::from_ptr(pm_last_error_message()) };
    assert!(!message.to_bytes().is_empty());
}

#[test]
fn null_pointers_are_rejected() {
    let mut handle: *mut PmModel = ptr::null_mut();
    assert_eq!(
        unsafe { pm_model_from_json(ptr::null(), &mut handle) },
        PmStatus::NullPointer
    );
    let mut out = 0.0f64;
    assert_eq!(
        unsafe { pm_normalized_root(ptr::null(), 2, &mut out) },
        PmStatus::NullPointer
    );
}

#[test]
fn permanent_of_known_matrices() {
    let entries = [0.8f64, 0.2, 0.2, 0.8];
    let mut log_value = 0.0f64;
    let mut value = 0.0f64;
    let status = unsafe { pm_permanent(entries.as_ptr(), 2, &mut log_value, &mut value) };
    assert_eq!(status, PmStatus::Ok);
    assert!((value - 0.68).abs() < 1e-15);
    assert!((log_value - 0.68f64.ln()).abs() < 1e-15);

    // ceiling is enforced
    let big = vec![0.5f64; 29 * 29];
    assert_eq!(
        unsafe { pm_permanent(big.as_ptr(), 29, &mut log_value, &mut value) },
        PmStatus::LimitExceeded
    );
}

#[test]
fn matching_count_of_complete_graph() {
    let ones = [1u8; 16];
    let mut high = 1u64;
    let mut low = 0u64;
    let status = unsafe { pm_matching_count(ones.as_ptr(), 4, &mut high, &mut low) };
    assert_eq!(status, PmStatus::Ok);
    assert_eq!((high, low), (0, 24));

    let bad = [2u8, 1, 1, 1];
    assert_eq!(
        unsafe { pm_matching_count(bad.as_ptr(), 2, &mut high, &mut low) },
        PmStatus::InvalidArgument
    );
}

#[test]
fn normalized_root_matches_hand_value() {
    let entries = [0.8f64, 0.2, 0.2, 0.8];
    let mut root = 0.0f64;
    let status = unsafe { pm_normalized_root(entries.as_ptr(), 2, &mut root) };
    assert_eq!(status, PmStatus::Ok);
    assert!((root - 0.34f64.sqrt()).abs() < 1e-12);

    let with_zero = [0.8f64, 0.0, 0.2, 0.8];
    assert_eq!(
        unsafe { pm_normalized_root(with_zero.as_ptr(), 2, &mut root) },
        PmStatus::InvalidArgument
    );
}

#[test]
fn convergence_run_fills_the_buffer_in_order() {
    let model = load(SYMMETRIC);
    let n_list = [4u64, 6];
    let seeds = [10u64, 11, 12];
    let mut records = vec![
        PmConvergenceRecord {
            seed: 0,
            n: 0,
            log_per: 0.0,
            root: 0.0,
            entropy: 0.0,
            sm: 0.0,
            abs_error: 0.0,
        };
        6
    ];
    let status = unsafe {
        pm_convergence_run(
            model,
            n_list.as_ptr(),
            2,
            seeds.as_ptr(),
            3,
            records.as_mut_ptr(),
        )
    };
    assert_eq!(status, PmStatus::Ok);
    let keys: Vec<(u64, u64)> = records.iter().map(|r| (r.seed, r.n)).collect();
    assert_eq!(keys, [(10, 4), (10, 6), (11, 4), (11, 6), (12, 4), (12, 6)]);
    for r in &records {
        assert!((r.sm - 0.5).abs() < 1e-12);
        assert!(r.root > 0.2 - 1e-12 && r.root < 0.8 + 1e-12);
        assert!((r.abs_error - (r.root - r.sm).abs()).abs() < 1e-15);
    }
    unsafe { pm_model_free(model) };
}

#[test]
fn probability_matrix_entries_come_from_the_edge_matrix() {
    let model = load(SYMMETRIC);
    let mut entries = vec![0.0f64; 25];
    let status = unsafe { pm_probability_matrix(model, 5, 42, entries.as_mut_ptr()) };
    assert_eq!(status, PmStatus::Ok);
    assert!(entries.iter().all(|&v| v == 0.8 || v == 0.2));
    unsafe { pm_model_free(model) };
}

#[test]
fn version_is_non_empty() {
    let version = unsafe { CStr::from_ptr(pm_version()) };
    assert!(!version.to_bytes().is_empty());
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/pm_scaler.h");
    let available = Command::new("cc").arg("--version").output();
    if available.is_err() {
        eprintln!("skipping: no C compiler on PATH");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let main_c = dir.path().join("smoke.c");
    std::fs::write(
        &main_c,
        format!("#include \"{header}\"\nint main(void) {{ return (int)PM_STATUS_OK; }}\n"),
    )
    .unwrap();
    let out = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&main_c)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "header does not compile: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}
