//! Runtime scaling of the solver.
//!
//! Each size `n` is timed on `reps` generated instances with `s = t = n/2`,
//! capacities in `[1, 3]` and integer weights in `[-99, 99]`. One extra
//! warm-up solve per size is thrown away. The exponent is the least-squares
//! slope of `ln(median)` against `ln(n)`.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use bmatch_core::{
    generate_instance, solve_b_matching_with_clock, BMatchInstance, Clock, SolveError, SolverConfig,
};
use rayon::prelude::*;
use thiserror::Error;

/// Monotonic wall clock measured from construction.
pub struct InstantClock(Instant);

impl InstantClock {
    pub fn new() -> Self {
        InstantClock(Instant::now())
    }
}

impl Default for InstantClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for InstantClock {
    fn now(&self) -> Duration {
        self.0.elapsed()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    pub reps: usize,
    pub median_s: f64,
    pub per_rep_s: Vec<f64>,
}

#[derive(Debug, Error, PartialEq)]
pub enum BenchError {
    #[error("sizes must be ascending and at least 16 (got {0:?})")]
    BadSizes(Vec<usize>),
    #[error("need at least one repetition")]
    NoReps,
    #[error("a least-squares fit needs at least two rows with positive, distinct sizes and positive medians")]
    DegenerateFit,
    #[error("solver failed: {0}")]
    Solve(#[from] SolveError),
}

/// The instance stream timed for size `n`; index 0 is the warm-up.
pub fn scaling_instances(n: usize, reps: usize, seed: u64) -> Vec<BMatchInstance> {
    let half = n / 2;
    (0..=reps)
        .into_par_iter()
        .map(|r| {
            let k = seed
                .wrapping_add((n as u64).wrapping_mul(1_000_003))
                .wrapping_add(r as u64);
            generate_instance(half, half, 3, -99.0, 99.0, true, k)
                .expect("fixed generator ranges are valid")
        })
        .collect()
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    if v.len() % 2 == 1 {
        v[k]
    } else {
        (v[k - 1] + v[k]) / 2.0
    }
}

pub fn run_scaling(sizes: &[usize], reps: usize, seed: u64) -> Result<Vec<ScalingRow>, BenchError> {
    if reps == 0 {
        return Err(BenchError::NoReps);
    }
    if sizes.iter().any(|&n| n < 16) || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(BenchError::BadSizes(sizes.to_vec()));
    }
    let cfg = SolverConfig::default();
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let instances = scaling_instances(n, reps, seed);
        let mut per_rep_s = Vec::with_capacity(reps);
        for (r, inst) in instances.iter().enumerate() {
            let clock = InstantClock::new();
            let start = clock.now();
            solve_b_matching_with_clock(inst, &cfg, &clock)?;
            let secs = (clock.now() - start).as_secs_f64();
            if r > 0 {
                per_rep_s.push(secs);
            }
        }
        rows.push(ScalingRow {
            n,
            reps,
            median_s: median(&per_rep_s),
            per_rep_s,
        });
    }
    Ok(rows)
}

pub fn fit_exponent(rows: &[ScalingRow]) -> Result<f64, BenchError> {
    if rows.len() < 2
        || rows
            .iter()
            .any(|r| r.median_s.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || r.n == 0)
    {
        return Err(BenchError::DegenerateFit);
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.median_s.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(BenchError::DegenerateFit);
    }
    Ok(sxy / sxx)
}

pub fn render_tsv(rows: &[ScalingRow], slope: f64) -> String {
    let mut out = String::from("n\treps\tmedian_s\n");
    for r in rows {
        writeln!(out, "{}\t{}\t{:.6}", r.n, r.reps, r.median_s).unwrap();
    }
    writeln!(out, "slope {slope:.3}").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(f: impl Fn(f64) -> f64) -> Vec<ScalingRow> {
        [128usize, 256, 512]
            .iter()
            .map(|&n| ScalingRow {
                n,
                reps: 3,
                median_s: f(n as f64),
                per_rep_s: vec![],
            })
            .collect()
    }

    #[test]
    fn exact_power_laws() {
        let cubic = fit_exponent(&rows(|n| 1e-9 * n * n * n)).unwrap();
        assert!((cubic - 3.0).abs() < 1e-9);
        let square = fit_exponent(&rows(|n| 2e-7 * n * n)).unwrap();
        assert!((square - 2.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_fits() {
        assert_eq!(fit_exponent(&rows(|_| 0.0)), Err(BenchError::DegenerateFit));
        assert_eq!(
            fit_exponent(&rows(|n| n)[..1]),
            Err(BenchError::DegenerateFit)
        );
    }

    #[test]
    fn medians() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn instance_stream_is_seeded() {
        let a = scaling_instances(32, 3, 7);
        assert_eq!(a.len(), 4);
        assert_eq!(a, scaling_instances(32, 3, 7));
        assert_ne!(a, scaling_instances(32, 3, 8));
        assert!(a.iter().all(|i| i.s == 16 && i.t == 16));
        assert!(a
            .iter()
            .all(|i| i.alpha.iter().chain(&i.beta).all(|&c| (1..=3).contains(&c))));
    }

    #[test]
    fn one_size_three_timings() {
        let r = run_scaling(&[16], 3, 1).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].per_rep_s.len(), 3);
        assert!(render_tsv(&r, 3.0).starts_with("n\treps\tmedian_s\n16\t3\t"));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(
            run_scaling(&[8], 3, 1),
            Err(BenchError::BadSizes(_))
        ));
        assert!(matches!(
            run_scaling(&[32, 16], 3, 1),
            Err(BenchError::BadSizes(_))
        ));
        assert_eq!(run_scaling(&[16], 0, 1), Err(BenchError::NoReps));
    }
}
