//! Command-line front end.
//!
//! Subcommands: `sm` (scaling mean with diagnostics), `converge` (quenched
//! limit sweep), `sample` (Monte Carlo mean check), `baseline` (Erdos-Renyi
//! check), `oracle` (closed-form / grid cross-checks). The model comes from
//! a JSON file and is the single source of truth; inline flags never
//! override it.
//!
//! Exit codes: 0 success, 1 validation error, 2 usage error. Failures print
//! one machine-greppable line to stderr prefixed with `E_CONFIG`, `E_USAGE`
//! or `E_LIMIT`. Identical argv (seeds included) produces byte-identical
//! stdout.

use std::fs;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;
use crate::experiments::{
    baseline_csv, convergence_csv, er_baseline, fmt_f64, monte_carlo_csv, run_convergence,
    run_monte_carlo,
};
use crate::model::ModelConfig;
use crate::scaling::{
    closed_form_2x2, closed_form_alpha_2, grid_oracle_sm, solve_scaling_fixed_point,
    ScalingSolution, DEFAULT_MAX_ITER, DEFAULT_TOL,
};

/// Env var consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "PM_SCALER_THREADS";

#[derive(Parser)]
#[command(
    name = "pm-scaler",
    version,
    about = "Scaling means, exact permanents, and perfect-matching statistics of random bipartite graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for results on stdout or --out
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Write results to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for parallel sweeps (fallback: PM_SCALER_THREADS, then
    /// all hardware threads)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the scaling mean of the model with convergence diagnostics
    Sm {
        #[command(flatten)]
        model: ModelArg,

        /// Stopping tolerance on the Hilbert distance between iterates
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,

        /// Iteration cap
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },

    /// Sweep the root statistic (per(A_n)/n!)^(1/n) against the scaling mean
    Converge {
        #[command(flatten)]
        model: ModelArg,

        /// Matrix orders to sample, e.g. --n-list 8,16,24
        #[arg(long = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,

        /// Explicit seed list, e.g. --seeds 1,2,3
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["seed", "seed_count"])]
        seeds: Option<Vec<u64>>,

        /// Base seed; combined with --seed-count generates seeds base..base+count
        #[arg(long, requires = "seed_count")]
        seed: Option<u64>,

        /// Number of consecutive seeds starting at --seed
        #[arg(long, requires = "seed")]
        seed_count: Option<u64>,
    },

    /// Monte Carlo check of E[pm(G)] = per(A_n) for one sampled environment
    Sample {
        #[command(flatten)]
        model: ModelArg,

        /// Matrix order (at most 12)
        #[arg(long)]
        n: usize,

        /// Number of sampled graphs
        #[arg(long)]
        trials: usize,

        /// Master seed for the environment and all trials
        #[arg(long)]
        seed: u64,
    },

    /// Erdos-Renyi baseline: per(constant-p matrix) against n! p^n
    Baseline {
        /// Edge probability in (0, 1]
        #[arg(long)]
        p: f64,

        /// Matrix order (at most 28)
        #[arg(long)]
        n: usize,
    },

    /// Cross-check the solver against an independent oracle
    Oracle {
        #[command(flatten)]
        model: ModelArg,

        /// Which oracle: 2x2 closed form, alpha-by-2 closed form, or grid search
        #[arg(long, value_enum)]
        mode: OracleMode,

        /// Points per grid axis (grid mode only)
        #[arg(long, default_value_t = 128)]
        resolution: usize,
    },
}

#[derive(Args)]
struct ModelArg {
    /// Path to the JSON model file {"alpha", "beta", "p", "q", "F"}
    #[arg(long)]
    model: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleMode {
    #[value(name = "2x2")]
    TwoByTwo,
    Alpha2,
    Grid,
}

#[derive(Serialize)]
struct SmRecord {
    sm: f64,
    iterations: usize,
    residual: f64,
    contraction_bound: f64,
}

#[derive(Serialize)]
struct OracleRecord {
    mode: String,
    oracle_sm: f64,
    solver_sm: f64,
    abs_diff: f64,
    rel_diff: f64,
}

struct Failure {
    prefix: &'static str,
    message: String,
    code: i32,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            prefix: "E_USAGE",
            message: message.into(),
            code: 2,
        }
    }

    fn config(message: impl Into<String>) -> Self {
        Self {
            prefix: "E_CONFIG",
            message: message.into(),
            code: 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let prefix = match err {
            Error::TooLarge { .. }
            | Error::DimensionTooLarge { .. }
            | Error::ResolutionTooSmall { .. } => "E_LIMIT",
            _ => "E_CONFIG",
        };
        Self {
            prefix,
            message: err.to_string(),
            code: 1,
        }
    }
}

/// Parses and runs one invocation; returns the process exit code.
pub fn run_cli(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err)
            if err.kind() == ErrorKind::DisplayHelp
                || err.kind() == ErrorKind::DisplayVersion =>
        {
            print!("{err}");
            return 0;
        }
        Err(err) => {
            let first_line = err.to_string().lines().next().unwrap_or_default().to_string();
            eprintln!("E_USAGE: {first_line}");
            eprint!("{err}");
            return 2;
        }
    };

    let threads = cli.threads.or_else(|| {
        std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
    });

    let run = || dispatch(&cli.command, cli.format);
    let result = match threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Failure::config(format!("cannot build thread pool: {e}"))),
        },
        None => run(),
    };

    match result {
        Ok(output) => match cli.out {
            Some(path) => match fs::write(&path, output) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("E_CONFIG: cannot write {}: {e}", path.display());
                    1
                }
            },
            None => {
                print!("{output}");
                0
            }
        },
        Err(failure) => {
            eprintln!("{}: {}", failure.prefix, failure.message);
            failure.code
        }
    }
}

fn load_model(arg: &ModelArg) -> Result<ModelConfig, Failure> {
    let text = fs::read_to_string(&arg.model)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", arg.model.display())))?;
    ModelConfig::from_json(&text)
        .map_err(|e| Failure::config(format!("invalid model {}: {e}", arg.model.display())))
}

fn solve_default(model: &ModelConfig) -> Result<ScalingSolution, Failure> {
    Ok(solve_scaling_fixed_point(
        model.edge_matrix().as_positive(),
        model.p(),
        model.q(),
        DEFAULT_TOL,
        DEFAULT_MAX_ITER,
        None,
    )?)
}

fn dispatch(command: &Command, format: Format) -> Result<String, Failure> {
    match command {
        Command::Sm {
            model,
            tol,
            max_iter,
        } => {
            let model = load_model(model)?;
            let solution = solve_scaling_fixed_point(
                model.edge_matrix().as_positive(),
                model.p(),
                model.q(),
                *tol,
                *max_iter,
                None,
            )?;
            if !solution.converged {
                eprintln!(
                    "warning: solver did not converge within {max_iter} iterations (residual {})",
                    fmt_f64(solution.residual)
                );
            }
            let record = SmRecord {
                sm: solution.sm,
                iterations: solution.iterations,
                residual: solution.residual,
                contraction_bound: solution.contraction_bound,
            };
            Ok(match format {
                Format::Csv => format!(
                    "sm,iterations,residual,contraction_bound\n{},{},{},{}\n",
                    fmt_f64(record.sm),
                    record.iterations,
                    fmt_f64(record.residual),
                    fmt_f64(record.contraction_bound),
                ),
                Format::Json => render_json(&[record])?,
            })
        }

        Command::Converge {
            model,
            n_list,
            seeds,
            seed,
            seed_count,
        } => {
            let model = load_model(model)?;
            let seeds: Vec<u64> = match (seeds, seed, seed_count) {
                (Some(list), None, None) => list.clone(),
                (None, Some(base), Some(count)) => (0..*count).map(|i| base + i).collect(),
                _ => {
                    return Err(Failure::usage(
                        "provide either --seeds or both --seed and --seed-count",
                    ))
                }
            };
            if seeds.is_empty() {
                return Err(Failure::usage("seed list is empty"));
            }
            let records = run_convergence(&model, n_list, &seeds)?;
            Ok(match format {
                Format::Csv => convergence_csv(&records),
                Format::Json => render_json(&records)?,
            })
        }

        Command::Sample {
            model,
            n,
            trials,
            seed,
        } => {
            let model = load_model(model)?;
            if *trials == 0 {
                return Err(Failure::usage("--trials must be at least 1"));
            }
            let record = run_monte_carlo(&model, *n, *trials, *seed)?;
            Ok(match format {
                Format::Csv => monte_carlo_csv(&[record]),
                Format::Json => render_json(&[record])?,
            })
        }

        Command::Baseline { p, n } => {
            let record = er_baseline(*p, *n)?;
            Ok(match format {
                Format::Csv => baseline_csv(&[record]),
                Format::Json => render_json(&[record])?,
            })
        }

        Command::Oracle {
            model,
            mode,
            resolution,
        } => {
            let model = load_model(model)?;
            let f = model.edge_matrix().as_positive();
            let (name, oracle_sm) = match mode {
                OracleMode::TwoByTwo => {
                    let uniform = model
                        .p()
                        .weights()
                        .iter()
                        .chain(model.q().weights())
                        .all(|&w| (w - 0.5).abs() <= 1e-12);
                    if !uniform {
                        return Err(Failure::config(
                            "oracle mode 2x2 requires p = q = (1/2, 1/2)",
                        ));
                    }
                    ("2x2".to_string(), closed_form_2x2(f)?)
                }
                OracleMode::Alpha2 => (
                    "alpha2".to_string(),
                    closed_form_alpha_2(f, model.p(), model.q())?,
                ),
                OracleMode::Grid => (
                    "grid".to_string(),
                    grid_oracle_sm(f, model.p(), model.q(), *resolution)?,
                ),
            };
            let solver_sm = solve_default(&model)?.sm;
            let record = OracleRecord {
                mode: name,
                oracle_sm,
                solver_sm,
                abs_diff: (oracle_sm - solver_sm).abs(),
                rel_diff: (oracle_sm - solver_sm).abs() / solver_sm,
            };
            Ok(match format {
                Format::Csv => format!(
                    "mode,oracle_sm,solver_sm,abs_diff,rel_diff\n{},{},{},{},{}\n",
                    record.mode,
                    fmt_f64(record.oracle_sm),
                    fmt_f64(record.solver_sm),
                    fmt_f64(record.abs_diff),
                    fmt_f64(record.rel_diff),
                ),
                Format::Json => render_json(&[record])?,
            })
        }
    }
}

fn render_json<T: Serialize>(records: &[T]) -> Result<String, Failure> {
    serde_json::to_string_pretty(records)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Failure::config(format!("cannot serialize records: {e}")))
}
