//! The `bmatch` command line.
//!
//! Exit codes: 0 success, 1 a failed verification, invariant check or
//! comparison run, 2 usage, file and parse errors (and an oracle that hit
//! its work limit). Data goes to stdout, diagnostics to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use bmatch_core::{
    brute_force_b_matching, generate_instance, solve_b_matching, verify_b_matching, BMatchInstance,
    InitialMatching, OracleLimits, SolverConfig,
};
use clap::{Args, Parser, Subcommand};

use crate::bench::{fit_exponent, render_tsv, run_scaling};
use crate::compare::{run_compare, write_corpus, CompareConfig, CompareError};
use crate::io::{parse_instance, parse_result, render_instance, render_matching, render_result};

#[derive(Parser, Debug)]
#[command(
    name = "bmatch",
    version,
    about = "Maximum-weight bipartite b-matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance file and print the result as JSON.
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        /// Start from a greedy matching on equality edges.
        #[arg(long)]
        greedy_init: bool,
        /// Check dual feasibility and copy symmetry throughout; report to stderr.
        #[arg(long)]
        check_invariants: bool,
    },
    /// Check a result file against an instance file.
    Verify {
        instance: PathBuf,
        result: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Exhaustive optimum of a small instance.
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = OracleLimits::default().max_states)]
        max_states: u64,
        /// Allow each pair at most once.
        #[arg(long)]
        simple_edges: bool,
    },
    /// Print a random instance.
    Gen(GenArgs),
    /// Run solver and oracle on a seeded instance stream.
    Compare(CompareArgs),
    /// Time the solver on growing instances and fit the exponent.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [128usize, 256, 512])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long)]
    s: usize,
    #[arg(long)]
    t: usize,
    #[arg(long, default_value_t = 3)]
    cap_max: u32,
    #[arg(long, default_value_t = -9.0, allow_negative_numbers = true)]
    wmin: f64,
    #[arg(long, default_value_t = 9.0, allow_negative_numbers = true)]
    wmax: f64,
    /// Draw integer weights.
    #[arg(long)]
    int: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 5)]
    max_s: usize,
    #[arg(long, default_value_t = 5)]
    max_t: usize,
    #[arg(long, default_value_t = 3)]
    cap_max: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draw weights from [-9, -1] instead of [-9, 9].
    #[arg(long)]
    all_negative: bool,
    /// Directory receiving one instance file per disagreement.
    #[arg(long)]
    corpus_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-9)]
    eps: f64,
    #[arg(long, default_value_t = OracleLimits::default().max_states)]
    max_states: u64,
}

/// An error that ends the command with a message on stderr.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<BMatchInstance, Failure> {
    parse_instance(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn check_eps(eps: f64) -> Result<(), Failure> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(usage(format!(
            "--eps must be finite and non-negative, got {eps}"
        )))
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| usage(format!("write failed: {e}"));
    match cmd {
        Command::Solve {
            file,
            eps,
            greedy_init,
            check_invariants,
        } => {
            check_eps(eps)?;
            let inst = load_instance(&file)?;
            let cfg = SolverConfig {
                eps,
                initial_matching: if greedy_init {
                    InitialMatching::GreedyEquality
                } else {
                    InitialMatching::Empty
                },
                check_invariants,
            };
            let (bm, report) = solve_b_matching(&inst, &cfg).map_err(|e| Failure {
                code: 1,
                message: e.to_string(),
            })?;
            out.write_all(render_result(&bm, &report).as_bytes())
                .map_err(io)?;
            if report.phase2_releases > 0 {
                writeln!(
                    err,
                    "note: {} second-phase search(es) ended by releasing a copy",
                    report.phase2_releases
                )
                .map_err(io)?;
            }
            for v in &report.violations {
                writeln!(err, "invariant violated: {v}").map_err(io)?;
            }
            Ok(if report.violations.is_empty() { 0 } else { 1 })
        }
        Command::Verify {
            instance,
            result,
            eps,
        } => {
            check_eps(eps)?;
            let inst = load_instance(&instance)?;
            let bm = parse_result(&read(&result)?)
                .map_err(|e| usage(format!("{}: {e}", result.display())))?;
            let report = verify_b_matching(&inst, &bm, eps);
            match report.violation {
                None => {
                    writeln!(out, "pass weight={}", report.recomputed_weight).map_err(io)?;
                    Ok(0)
                }
                Some(v) => {
                    writeln!(out, "fail: {v}").map_err(io)?;
                    Ok(1)
                }
            }
        }
        Command::Oracle {
            file,
            max_states,
            simple_edges,
        } => {
            let inst = load_instance(&file)?;
            let limits = OracleLimits {
                max_states,
                simple_edges,
            };
            let (_, bm) = brute_force_b_matching(&inst, &limits).map_err(usage)?;
            out.write_all(render_matching(&bm).as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::Gen(a) => {
            let inst = generate_instance(a.s, a.t, a.cap_max, a.wmin, a.wmax, a.int, a.seed)
                .map_err(usage)?;
            out.write_all(render_instance(&inst).as_bytes())
                .map_err(io)?;
            Ok(0)
        }
        Command::Compare(a) => {
            check_eps(a.eps)?;
            let cfg = CompareConfig {
                count: a.count,
                max_s: a.max_s,
                max_t: a.max_t,
                cap_max: a.cap_max,
                seed: a.seed,
                all_negative: a.all_negative,
                eps: a.eps,
                limits: OracleLimits {
                    max_states: a.max_states,
                    simple_edges: false,
                },
            };
            let report = match run_compare(&cfg) {
                Ok(r) => r,
                Err(e @ CompareError::BadRange) => return Err(usage(e)),
                Err(e) => {
                    return Err(Failure {
                        code: 1,
                        message: e.to_string(),
                    })
                }
            };
            if let Some(dir) = &a.corpus_dir {
                write_corpus(&report, dir).map_err(usage)?;
            }
            out.write_all(report.render().as_bytes()).map_err(io)?;
            Ok(0)
        }
        Command::Bench { sizes, reps, seed } => {
            let rows = run_scaling(&sizes, reps, seed).map_err(usage)?;
            let slope = fit_exponent(&rows).map_err(usage)?;
            out.write_all(render_tsv(&rows, slope).as_bytes())
                .map_err(io)?;
            Ok(0)
        }
    }
}
