//! Exact reference solvers for small instances.
//!
//! [`brute_force_b_matching`] optimises over every multiplicity vector
//! `m[i][j] in [0, min(alpha[i], beta[j])]` that satisfies the degree
//! bounds. Rows are processed one at a time with the vector of right
//! degrees so far as the state, so equal partial states are solved once;
//! nothing here shares code with the Hungarian search.

use alloc::vec::Vec;
use core::fmt;

use crate::expand::{BEdge, BMatching};
use crate::instance::{validate_instance, BMatchInstance, ValidationError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Cap on (right-degree state, row option) evaluations.
    pub max_states: u64,
    /// Restrict every multiplicity to at most one.
    pub simple_edges: bool,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_states: 10_000_000,
            simple_edges: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleError {
    TooLarge { work: u64, limit: u64 },
    InfeasibleInstance,
    InvalidInstance(ValidationError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::TooLarge { work, limit } => {
                write!(f, "instance too large for the oracle: {work} > {limit}")
            }
            OracleError::InfeasibleInstance => f.write_str("no assignment meets the degree bounds"),
            OracleError::InvalidInstance(e) => write!(f, "invalid instance: {e}"),
        }
    }
}

impl core::error::Error for OracleError {}

/// A row's multiplicity vector together with its weight and state offset.
struct RowOption {
    mult: Vec<u32>,
    weight: f64,
    offset: usize,
}

fn checked_work(a: u64, b: u64, limit: u64) -> Result<u64, OracleError> {
    match a.checked_mul(b) {
        Some(w) if w <= limit => Ok(w),
        Some(w) => Err(OracleError::TooLarge { work: w, limit }),
        None => Err(OracleError::TooLarge {
            work: u64::MAX,
            limit,
        }),
    }
}

/// Maximum-weight b-matching by exhaustive search over multiplicities.
/// Ties go to the lexicographically smallest row-major multiplicity vector.
pub fn brute_force_b_matching(
    inst: &BMatchInstance,
    limits: &OracleLimits,
) -> Result<(f64, BMatching), OracleError> {
    match validate_instance(inst) {
        Ok(()) => {}
        Err(ValidationError::Infeasible { .. }) => return Err(OracleError::InfeasibleInstance),
        Err(e) => return Err(OracleError::InvalidInstance(e)),
    }
    let (s, t) = (inst.s, inst.t);
    let limit = limits.max_states;

    let mut radix = Vec::with_capacity(t);
    let mut states: u64 = 1;
    for &b in &inst.beta {
        radix.push(states as usize);
        states = checked_work(states, u64::from(b) + 1, limit)?;
    }

    let bounds: Vec<Vec<u32>> = (0..s)
        .map(|i| {
            (0..t)
                .map(|j| {
                    let b = inst.alpha[i].min(inst.beta[j]);
                    if limits.simple_edges {
                        b.min(1)
                    } else {
                        b
                    }
                })
                .collect()
        })
        .collect();
    let mut total_options: u64 = 0;
    for row in &bounds {
        let raw = row
            .iter()
            .try_fold(1u64, |acc, &b| checked_work(acc, u64::from(b) + 1, limit))?;
        total_options = total_options.saturating_add(raw);
    }
    checked_work(states, total_options, limit)?;

    let options: Vec<Vec<RowOption>> = (0..s)
        .map(|i| row_options(inst, i, &bounds[i], &radix))
        .collect();

    let states = states as usize;
    let digits = |mut state: usize| -> Vec<u32> {
        inst.beta
            .iter()
            .map(|&b| {
                let d = state % (b as usize + 1);
                state /= b as usize + 1;
                d as u32
            })
            .collect()
    };
    let fits = |deg: &[u32], o: &RowOption| {
        deg.iter()
            .zip(&o.mult)
            .zip(&inst.beta)
            .all(|((&d, &m), &b)| d + m <= b)
    };

    // value[i][state]: best weight of rows i.. given right degrees `state`.
    let mut value = alloc::vec![alloc::vec![f64::NEG_INFINITY; states]; s + 1];
    for (state, v) in value[s].iter_mut().enumerate() {
        if digits(state).iter().all(|&d| d >= 1) {
            *v = 0.0;
        }
    }
    for i in (0..s).rev() {
        for state in 0..states {
            let deg = digits(state);
            let mut best = f64::NEG_INFINITY;
            for o in &options[i] {
                if !fits(&deg, o) {
                    continue;
                }
                let rest = value[i + 1][state + o.offset];
                if rest == f64::NEG_INFINITY {
                    continue;
                }
                let cand = o.weight + rest;
                if cand > best {
                    best = cand;
                }
            }
            value[i][state] = best;
        }
    }
    if value[0][0] == f64::NEG_INFINITY {
        return Err(OracleError::InfeasibleInstance);
    }

    let mut edges = Vec::new();
    let mut state = 0;
    for i in 0..s {
        let deg = digits(state);
        let target = value[i][state];
        let chosen = options[i]
            .iter()
            .find(|o| {
                fits(&deg, o) && {
                    let rest = value[i + 1][state + o.offset];
                    rest != f64::NEG_INFINITY && o.weight + rest == target
                }
            })
            .expect("optimal row option exists");
        for (j, &m) in chosen.mult.iter().enumerate() {
            if m > 0 {
                edges.push(BEdge {
                    left: i,
                    right: j,
                    multiplicity: m,
                });
            }
        }
        state += chosen.offset;
    }
    let total_weight = edges
        .iter()
        .map(|e| f64::from(e.multiplicity) * inst.weight(e.left, e.right))
        .sum();
    Ok((
        total_weight,
        BMatching {
            edges,
            total_weight,
        },
    ))
}

/// Every vector `m <= bound` with `1 <= sum(m) <= alpha[i]`, in
/// lexicographic order.
fn row_options(inst: &BMatchInstance, i: usize, bound: &[u32], radix: &[usize]) -> Vec<RowOption> {
    let t = bound.len();
    let mut out = Vec::new();
    let mut mult = alloc::vec![0u32; t];
    loop {
        let sum: u32 = mult.iter().sum();
        if sum >= 1 && sum <= inst.alpha[i] {
            let weight = mult
                .iter()
                .enumerate()
                .map(|(j, &m)| f64::from(m) * inst.weight(i, j))
                .sum();
            let offset = mult.iter().zip(radix).map(|(&m, &r)| m as usize * r).sum();
            out.push(RowOption {
                mult: mult.clone(),
                weight,
                offset,
            });
        }
        // Odometer with the last column fastest: lexicographic order.
        let mut j = t;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if mult[j] < bound[j] {
                mult[j] += 1;
                mult[j + 1..].iter_mut().for_each(|m| *m = 0);
                break;
            }
        }
    }
}

/// Largest matrix accepted by [`brute_force_assignment`].
pub const MAX_ASSIGNMENT_SIZE: usize = 8;

/// Maximum of `sum_i W[i][sigma(i)]` over all permutations `sigma`.
pub fn brute_force_assignment(weights: &[Vec<f64>]) -> Result<f64, OracleError> {
    let n = weights.len();
    if n > MAX_ASSIGNMENT_SIZE {
        let mut work: u64 = 1;
        for k in 1..=n as u64 {
            work = work.saturating_mul(k);
        }
        return Err(OracleError::TooLarge {
            work,
            limit: 40_320,
        });
    }
    if weights.iter().any(|r| r.len() != n) {
        return Err(OracleError::InvalidInstance(
            ValidationError::ShapeMismatch {
                reason: "assignment matrix is not square",
            },
        ));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = f64::NEG_INFINITY;
    permute(weights, &mut perm, n, &mut best);
    Ok(if n == 0 { 0.0 } else { best })
}

// Heap's algorithm.
fn permute(w: &[Vec<f64>], perm: &mut [usize], k: usize, best: &mut f64) {
    if k <= 1 {
        let total: f64 = perm.iter().enumerate().map(|(i, &j)| w[i][j]).sum();
        if total > *best {
            *best = total;
        }
        return;
    }
    for i in 0..k - 1 {
        permute(w, perm, k - 1, best);
        if k.is_multiple_of(2) {
            perm.swap(i, k - 1);
        } else {
            perm.swap(0, k - 1);
        }
    }
    permute(w, perm, k - 1, best);
}
