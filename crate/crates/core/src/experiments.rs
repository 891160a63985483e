//! Desk-scale experiments: the quenched-limit sweep, the Monte Carlo mean
//! check, and the Erdos-Renyi baseline.
//!
//! Each `(seed, n)` task is pure, so the sweeps fan out on the current rayon
//! pool; results are collected in input order, making record lists (and the
//! CSV derived from them) byte-identical across runs and thread counts. All
//! Monte Carlo accumulation is integer-exact for the same reason.

use rayon::prelude::*;
use serde::Serialize;

use crate::environment::{build_probability_matrix, sample_environment, sample_graph};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::ModelConfig;
use crate::permanent::{
    count_integer_permanent, entropy_from_log, log_factorial, normalized_root_from_log,
    permanent_ryser,
};
use crate::rng::mix;
use crate::scaling::{solve_scaling_fixed_point, DEFAULT_MAX_ITER, DEFAULT_TOL};

/// Monte Carlo cap: one integer permanent per trial stays cheap up to here.
pub const MONTE_CARLO_MAX_N: usize = 12;

/// One `(seed, n)` draw of the root statistic against the scaling mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRecord {
    pub seed: u64,
    pub n: usize,
    /// `log per(A_n)` for the sampled environment.
    pub log_per: f64,
    /// `(per(A_n)/n!)^(1/n)`.
    pub root: f64,
    /// `(1/n) log per(A_n) - log n`.
    pub entropy: f64,
    /// Scaling mean of the model (same for every record).
    pub sm: f64,
    /// `|root - sm|`.
    pub abs_error: f64,
}

/// Sample mean of the matching count over realized graphs against its exact
/// expectation `per(A_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloRecord {
    pub seed: u64,
    pub n: usize,
    pub trials: usize,
    pub sample_mean: f64,
    pub sample_std: f64,
    pub exact_mean: f64,
    pub z_score: f64,
}

/// Permanent of a constant matrix against the closed form `n! p^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineRecord {
    pub exact: f64,
    pub computed: f64,
    pub rel_error: f64,
}

/// Runs the quenched-limit sweep over every `(seed, n)` pair, in the order
/// given. Identical inputs produce identical record lists regardless of the
/// parallelism degree.
pub fn run_convergence(
    model: &ModelConfig,
    n_list: &[usize],
    seeds: &[u64],
) -> Result<Vec<ConvergenceRecord>> {
    let solution = solve_scaling_fixed_point(
        model.edge_matrix().as_positive(),
        model.p(),
        model.q(),
        DEFAULT_TOL,
        DEFAULT_MAX_ITER,
        None,
    )?;
    let sm = solution.sm;

    let pairs: Vec<(u64, usize)> = seeds
        .iter()
        .flat_map(|&seed| n_list.iter().map(move |&n| (seed, n)))
        .collect();

    pairs
        .par_iter()
        .map(|&(seed, n)| {
            let env = sample_environment(model, n, seed);
            let a = build_probability_matrix(model, &env)?;
            let log_per = permanent_ryser(a.as_matrix())?.log_value;
            let root = normalized_root_from_log(log_per, n);
            let entropy = entropy_from_log(log_per, n);
            Ok(ConvergenceRecord {
                seed,
                n,
                log_per,
                root,
                entropy,
                sm,
                abs_error: (root - sm).abs(),
            })
        })
        .collect()
}

/// Samples one environment, then `trials` graphs from per-trial seeds
/// `mix(seed, trial_index)`, and compares the empirical mean matching count
/// with its exact expectation `per(A_n)`.
pub fn run_monte_carlo(
    model: &ModelConfig,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloRecord> {
    if n > MONTE_CARLO_MAX_N {
        return Err(Error::TooLarge {
            what: "Monte Carlo matching count",
            n,
            max: MONTE_CARLO_MAX_N,
        });
    }
    if trials == 0 {
        return Err(Error::DimensionMismatch {
            what: "Monte Carlo trial count",
            expected: 1,
            actual: 0,
        });
    }
    let env = sample_environment(model, n, seed);
    let a = build_probability_matrix(model, &env)?;
    let exact_mean = permanent_ryser(a.as_matrix())?.value;

    // Integer sums keep the reduction exact and order-independent.
    let (sum, sum_sq) = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let graph = sample_graph(&a, mix(seed, trial));
            let pm = count_integer_permanent(&graph.adjacency)
                .expect("adjacency is square 0/1 within the integer ceiling");
            (pm, pm * pm)
        })
        .reduce(|| (0u128, 0u128), |x, y| (x.0 + y.0, x.1 + y.1));

    let t = trials as f64;
    let sample_mean = sum as f64 / t;
    let sample_std = if trials < 2 {
        0.0
    } else {
        let centered = sum_sq as f64 - t * sample_mean * sample_mean;
        (centered.max(0.0) / (t - 1.0)).sqrt()
    };
    let diff = sample_mean - exact_mean;
    let z_score = if sample_std == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        }
    } else {
        diff / (sample_std / t.sqrt())
    };

    Ok(MonteCarloRecord {
        seed,
        n,
        trials,
        sample_mean,
        sample_std,
        exact_mean,
        z_score,
    })
}

/// Erdos-Renyi baseline: the permanent of the constant-`p` n x n matrix
/// against the closed form `n! p^n` (evaluated in log space).
pub fn er_baseline(p: f64, n: usize) -> Result<BaselineRecord> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::EntryOutOfRange {
            row: 0,
            col: 0,
            value: p,
        });
    }
    let matrix = Matrix::constant(n, n, p)?;
    let computed = permanent_ryser(&matrix)?;
    let log_exact = log_factorial(n) + n as f64 * p.ln();
    let rel_error = ((computed.log_value - log_exact).exp() - 1.0).abs();
    Ok(BaselineRecord {
        exact: log_exact.exp(),
        computed: computed.value,
        rel_error,
    })
}

/// Floats are printed with 17 significant digits so that values survive a
/// text round-trip bit-exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with header `seed,n,log_per,root,entropy,sm,abs_error`.
pub fn convergence_csv(records: &[ConvergenceRecord]) -> String {
    let mut out = String::from("seed,n,log_per,root,entropy,sm,abs_error\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.seed,
            r.n,
            fmt_f64(r.log_per),
            fmt_f64(r.root),
            fmt_f64(r.entropy),
            fmt_f64(r.sm),
            fmt_f64(r.abs_error),
        ));
    }
    out
}

/// CSV with header `seed,n,trials,sample_mean,sample_std,exact_mean,z_score`.
pub fn monte_carlo_csv(records: &[MonteCarloRecord]) -> String {
    let mut out = String::from("seed,n,trials,sample_mean,sample_std,exact_mean,z_score\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.seed,
            r.n,
            r.trials,
            fmt_f64(r.sample_mean),
            fmt_f64(r.sample_std),
            fmt_f64(r.exact_mean),
            fmt_f64(r.z_score),
        ));
    }
    out
}

/// CSV with header `exact,computed,rel_error`.
pub fn baseline_csv(records: &[BaselineRecord]) -> String {
    let mut out = String::from("exact,computed,rel_error\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(r.exact),
            fmt_f64(r.computed),
            fmt_f64(r.rel_error),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_model, RawModel};

    fn er_model(p: f64) -> ModelConfig {
        validate_model(RawModel {
            alpha: 1,
            beta: 1,
            p: vec![1.0],
            q: vec![1.0],
            f: vec![vec![p]],
        })
        .unwrap()
    }

    fn symmetric_model() -> ModelConfig {
        validate_model(RawModel {
            alpha: 2,
            beta: 2,
            p: vec![0.5, 0.5],
            q: vec![0.5, 0.5],
            f: vec![vec![0.8, 0.2], vec![0.2, 0.8]],
        })
        .unwrap()
    }

    #[test]
    fn degenerate_model_has_zero_error() {
        let records = run_convergence(&er_model(0.4), &[2, 5, 9], &[1, 2]).unwrap();
        assert_eq!(records.len(), 6);
        for r in &records {
            assert!((r.root - 0.4).abs() < 1e-12, "root = {}", r.root);
            assert!(r.abs_error < 1e-12);
        }
    }

    #[test]
    fn singleton_inputs_give_one_record() {
        let records = run_convergence(&symmetric_model(), &[6], &[3]).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!((records[0].seed, records[0].n), (3, 6));
    }

    #[test]
    fn records_are_deterministic_and_ordered() {
        let model = symmetric_model();
        let a = run_convergence(&model, &[4, 8], &[10, 20, 30]).unwrap();
        let b = run_convergence(&model, &[4, 8], &[10, 20, 30]).unwrap();
        assert_eq!(a, b);
        let keys: Vec<(u64, usize)> = a.iter().map(|r| (r.seed, r.n)).collect();
        assert_eq!(keys, vec![(10, 4), (10, 8), (20, 4), (20, 8), (30, 4), (30, 8)]);
        assert_eq!(convergence_csv(&a), convergence_csv(&b));
    }

    #[test]
    fn entropy_identity_holds_per_record() {
        let records = run_convergence(&symmetric_model(), &[5, 9], &[7]).unwrap();
        for r in &records {
            let gap =
                r.entropy - r.root.ln() - log_factorial(r.n) / r.n as f64 + (r.n as f64).ln();
            assert!(gap.abs() < 1e-12);
        }
    }

    #[test]
    fn root_stays_within_entry_bounds() {
        let records = run_convergence(&symmetric_model(), &[4, 10], &[1, 2, 3]).unwrap();
        for r in &records {
            assert!(r.root >= 0.2 - 1e-12 && r.root <= 0.8 + 1e-12);
        }
    }

    #[test]
    fn deterministic_graphs_have_zero_std() {
        let record = run_monte_carlo(&er_model(1.0), 4, 100, 5).unwrap();
        assert_eq!(record.sample_std, 0.0);
        assert_eq!(record.sample_mean, 24.0);
        assert_eq!(record.exact_mean, 24.0);
        assert_eq!(record.z_score, 0.0);
    }

    #[test]
    fn single_trial_reports_that_count() {
        let record = run_monte_carlo(&symmetric_model(), 3, 1, 11).unwrap();
        assert_eq!(record.sample_mean.fract(), 0.0);
        assert_eq!(record.sample_std, 0.0);
        assert_eq!(record.trials, 1);
    }

    #[test]
    fn monte_carlo_mean_tracks_exact_mean() {
        let record = run_monte_carlo(&symmetric_model(), 5, 20_000, 1).unwrap();
        assert!(record.z_score.abs() <= 4.0, "z = {}", record.z_score);
    }

    #[test]
    fn monte_carlo_rejects_large_n() {
        assert!(matches!(
            run_monte_carlo(&er_model(0.5), 13, 10, 0),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn baseline_all_ones() {
        let r = er_baseline(1.0, 5).unwrap();
        assert_eq!(r.computed, 120.0);
        assert!((r.exact - 120.0).abs() < 1e-9);
        assert!(r.rel_error < 1e-12);
    }

    #[test]
    fn baseline_p03_n10() {
        let r = er_baseline(0.3, 10).unwrap();
        assert!((r.exact - 21.4277).abs() < 1e-3);
        assert!(r.rel_error < 1e-9, "rel_error = {}", r.rel_error);
    }

    #[test]
    fn baseline_half_n2() {
        let r = er_baseline(0.5, 2).unwrap();
        assert!((r.exact - 0.5).abs() < 1e-15);
        assert!(r.rel_error < 1e-12);
    }

    #[test]
    fn baseline_rejects_bad_p() {
        assert!(er_baseline(0.0, 3).is_err());
        assert!(er_baseline(1.5, 3).is_err());
    }

    #[test]
    fn csv_floats_have_17_significant_digits() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        let row = convergence_csv(&[ConvergenceRecord {
            seed: 3,
            n: 8,
            log_per: 1.5,
            root: 0.25,
            entropy: -1.0,
            sm: 0.5,
            abs_error: 0.25,
        }]);
        assert!(row.starts_with("seed,n,log_per,root,entropy,sm,abs_error\n3,8,"));
        assert!(row.contains("2.5000000000000000e-1"));
    }
}
