//! Solver against oracle on a seeded instance stream.
//!
//! The stream always opens with the fixed "stress" instance, on which
//! covering both sides is not enough to reach the optimum. Every other
//! instance is labelled by its seed. Instances are solved in parallel but
//! reported in stream order, so the output bytes depend only on the flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bmatch_core::{
    brute_force_b_matching, generate_instance, solve_b_matching, BMatchInstance, BMatching,
    OracleError, OracleLimits, SolveError, SolverConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::io::render_instance;

pub const STRESS_LABEL: &str = "stress";

pub fn stress_instance() -> BMatchInstance {
    BMatchInstance::from_rows(vec![2, 1], vec![1, 2], &[vec![6.0, 1.0], vec![2.0, 5.0]])
}

#[derive(Clone, Debug)]
pub struct CompareConfig {
    pub count: usize,
    pub max_s: usize,
    pub max_t: usize,
    pub cap_max: u32,
    pub seed: u64,
    pub all_negative: bool,
    pub eps: f64,
    pub limits: OracleLimits,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            count: 100,
            max_s: 5,
            max_t: 5,
            cap_max: 3,
            seed: 0,
            all_negative: false,
            eps: 1e-9,
            limits: OracleLimits::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("--max-s, --max-t and --cap-max must be at least 1")]
    BadRange,
    #[error("solver failed on {label}: {source}")]
    Solve { label: String, source: SolveError },
    #[error("oracle failed on {label}: {source}")]
    Oracle { label: String, source: OracleError },
    #[error("cannot write {path}: {source}", path = .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Agree,
    Disagree,
    /// The oracle hit its work limit.
    Skipped,
}

#[derive(Clone, Debug)]
pub struct CaseResult {
    pub label: String,
    pub instance: BMatchInstance,
    pub solver: BMatching,
    pub oracle: Option<BMatching>,
    pub outcome: Outcome,
}

impl CaseResult {
    pub fn line(&self) -> String {
        match &self.oracle {
            Some(o) => format!(
                "{} {} {} {}",
                self.label,
                self.solver.total_weight,
                o.total_weight,
                if self.outcome == Outcome::Agree {
                    "yes"
                } else {
                    "no"
                }
            ),
            None => format!("{} {} - skipped", self.label, self.solver.total_weight),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CompareReport {
    pub cases: Vec<CaseResult>,
}

impl CompareReport {
    fn count(&self, outcome: Outcome) -> usize {
        self.cases.iter().filter(|c| c.outcome == outcome).count()
    }

    pub fn agreed(&self) -> usize {
        self.count(Outcome::Agree)
    }

    pub fn disagreed(&self) -> usize {
        self.count(Outcome::Disagree)
    }

    pub fn skipped(&self) -> usize {
        self.count(Outcome::Skipped)
    }

    /// Agreements over compared (non-skipped) instances.
    pub fn agreement_rate(&self) -> f64 {
        let compared = self.agreed() + self.disagreed();
        if compared == 0 {
            return 1.0;
        }
        self.agreed() as f64 / compared as f64
    }

    pub fn disagreements(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| c.outcome == Outcome::Disagree)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            out.push_str(&c.line());
            out.push('\n');
        }
        writeln!(
            out,
            "summary instances={} agree={} disagree={} skipped={} agreement_rate={:.6}",
            self.cases.len(),
            self.agreed(),
            self.disagreed(),
            self.skipped(),
            self.agreement_rate()
        )
        .unwrap();
        out
    }
}

/// Instance `k` of the random part of the stream, seeded by `seed + k`.
pub fn stream_instance(cfg: &CompareConfig, inst_seed: u64) -> BMatchInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(inst_seed);
    let s = rng.gen_range(1..=cfg.max_s);
    let t = rng.gen_range(1..=cfg.max_t);
    let (lo, hi) = if cfg.all_negative {
        (-9.0, -1.0)
    } else {
        (-9.0, 9.0)
    };
    generate_instance(s, t, cfg.cap_max, lo, hi, true, inst_seed)
        .expect("ranges were checked before generation")
}

fn run_case(
    label: String,
    instance: BMatchInstance,
    cfg: &CompareConfig,
) -> Result<CaseResult, CompareError> {
    let solver_cfg = SolverConfig {
        eps: cfg.eps,
        ..SolverConfig::default()
    };
    let (solver, _) =
        solve_b_matching(&instance, &solver_cfg).map_err(|source| CompareError::Solve {
            label: label.clone(),
            source,
        })?;
    let (oracle, outcome) = match brute_force_b_matching(&instance, &cfg.limits) {
        Ok((w, bm)) => {
            let outcome = if (solver.total_weight - w).abs() <= cfg.eps {
                Outcome::Agree
            } else {
                Outcome::Disagree
            };
            (Some(bm), outcome)
        }
        Err(OracleError::TooLarge { .. }) => (None, Outcome::Skipped),
        Err(source) => {
            return Err(CompareError::Oracle { label, source });
        }
    };
    Ok(CaseResult {
        label,
        instance,
        solver,
        oracle,
        outcome,
    })
}

pub fn run_compare(cfg: &CompareConfig) -> Result<CompareReport, CompareError> {
    if cfg.max_s == 0 || cfg.max_t == 0 || cfg.cap_max == 0 {
        return Err(CompareError::BadRange);
    }
    let mut jobs = vec![(STRESS_LABEL.to_string(), stress_instance())];
    for k in 0..cfg.count {
        let inst_seed = cfg.seed.wrapping_add(k as u64);
        jobs.push((inst_seed.to_string(), stream_instance(cfg, inst_seed)));
    }
    let cases = jobs
        .into_par_iter()
        .map(|(label, inst)| run_case(label, inst, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CompareReport { cases })
}

/// The text of a corpus file: the instance preceded by `#` lines giving
/// both weights and edge lists, so the file still parses as an instance.
pub fn corpus_entry(case: &CaseResult) -> String {
    let mut out = String::new();
    let edges = |bm: &BMatching| {
        bm.edges
            .iter()
            .map(|e| format!("({},{},{})", e.left, e.right, e.multiplicity))
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(out, "# instance {}", case.label).unwrap();
    writeln!(
        out,
        "# solver {} {}",
        case.solver.total_weight,
        edges(&case.solver)
    )
    .unwrap();
    if let Some(o) = &case.oracle {
        writeln!(out, "# oracle {} {}", o.total_weight, edges(o)).unwrap();
    }
    out.push_str(&render_instance(&case.instance));
    out
}

/// Writes one `<label>.txt` per disagreement and returns the paths.
pub fn write_corpus(report: &CompareReport, dir: &Path) -> Result<Vec<PathBuf>, CompareError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CompareError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for case in report.disagreements() {
        let path = dir.join(format!("{}.txt", case.label));
        std::fs::write(&path, corpus_entry(case)).map_err(io_err(&path))?;
        written.push(path);
    }
    Ok(written)
}
