//! Problem instances, validation and seeded random generation.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::float::{ceil_i64, floor_i64};

/// A b-matching problem on the complete bipartite graph `K_{s,t}`.
///
/// `weights` is stored row-major, `s` rows of `t` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct BMatchInstance {
    pub s: usize,
    pub t: usize,
    /// Left capacities (`alpha`), one per left vertex.
    pub alpha: Vec<u32>,
    /// Right capacities (`beta`), one per right vertex.
    pub beta: Vec<u32>,
    pub weights: Vec<f64>,
}

impl BMatchInstance {
    /// Builds an instance from nested rows. No validation is performed.
    pub fn from_rows(alpha: Vec<u32>, beta: Vec<u32>, rows: &[Vec<f64>]) -> Self {
        let s = alpha.len();
        let t = beta.len();
        let weights = rows.iter().flat_map(|r| r.iter().copied()).collect();
        BMatchInstance {
            s,
            t,
            alpha,
            beta,
            weights,
        }
    }

    /// The all-capacities-one instance over a square or rectangular matrix.
    pub fn unit_capacity(rows: &[Vec<f64>]) -> Self {
        let s = rows.len();
        let t = rows.first().map_or(0, Vec::len);
        Self::from_rows(alloc::vec![1; s], alloc::vec![1; t], rows)
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.t + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.t..(i + 1) * self.t]
    }

    pub fn alpha_sum(&self) -> u64 {
        self.alpha.iter().map(|&a| u64::from(a)).sum()
    }

    pub fn beta_sum(&self) -> u64 {
        self.beta.iter().map(|&b| u64::from(b)).sum()
    }

    /// Whether every capacity equals one.
    pub fn is_unit_capacity(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|&c| c == 1)
    }
}

/// Which side of the bipartition a validation message refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Left,
    Right,
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::Left => "left",
            Part::Right => "right",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ValidationError {
    NonPositiveCapacity {
        side: Part,
        index: usize,
    },
    ShapeMismatch {
        reason: &'static str,
    },
    NonFiniteWeight {
        row: usize,
        col: usize,
    },
    /// `side` has more vertices than the opposite side has capacity.
    Infeasible {
        side: Part,
        count: usize,
        capacity: u64,
    },
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationError::NonPositiveCapacity { side, index } => {
                write!(f, "{side} vertex {index} has capacity 0")
            }
            ValidationError::ShapeMismatch { reason } => write!(f, "shape mismatch: {reason}"),
            ValidationError::NonFiniteWeight { row, col } => {
                write!(f, "weight at ({row}, {col}) is not finite")
            }
            ValidationError::Infeasible {
                side,
                count,
                capacity,
            } => write!(
                f,
                "infeasible: {count} {side} vertices but the other side has total capacity {capacity}"
            ),
        }
    }
}

impl core::error::Error for ValidationError {}

/// Checks the structural rules and the counting condition
/// `s <= sum(beta)` and `t <= sum(alpha)`, reporting the first failure.
pub fn validate_instance(inst: &BMatchInstance) -> Result<(), ValidationError> {
    if inst.s == 0 || inst.t == 0 {
        return Err(ValidationError::ShapeMismatch {
            reason: "both sides need at least one vertex",
        });
    }
    if inst.alpha.len() != inst.s {
        return Err(ValidationError::ShapeMismatch {
            reason: "left capacity count differs from s",
        });
    }
    if inst.beta.len() != inst.t {
        return Err(ValidationError::ShapeMismatch {
            reason: "right capacity count differs from t",
        });
    }
    if inst.weights.len() != inst.s * inst.t {
        return Err(ValidationError::ShapeMismatch {
            reason: "weight matrix is not s by t",
        });
    }
    if let Some(index) = inst.alpha.iter().position(|&a| a == 0) {
        return Err(ValidationError::NonPositiveCapacity {
            side: Part::Left,
            index,
        });
    }
    if let Some(index) = inst.beta.iter().position(|&b| b == 0) {
        return Err(ValidationError::NonPositiveCapacity {
            side: Part::Right,
            index,
        });
    }
    if let Some(k) = inst.weights.iter().position(|w| !w.is_finite()) {
        return Err(ValidationError::NonFiniteWeight {
            row: k / inst.t,
            col: k % inst.t,
        });
    }
    let beta_sum = inst.beta_sum();
    if inst.s as u64 > beta_sum {
        return Err(ValidationError::Infeasible {
            side: Part::Left,
            count: inst.s,
            capacity: beta_sum,
        });
    }
    let alpha_sum = inst.alpha_sum();
    if inst.t as u64 > alpha_sum {
        return Err(ValidationError::Infeasible {
            side: Part::Right,
            count: inst.t,
            capacity: alpha_sum,
        });
    }
    Ok(())
}

/// How the two-phase solver seeds its matching before Phase I.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitialMatching {
    #[default]
    Empty,
    /// Match each left original to the lowest-index tight free frontier vertex.
    GreedyEquality,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Absolute tolerance for equality-edge and feasibility tests.
    pub eps: f64,
    pub initial_matching: InitialMatching,
    /// Record invariant violations at every dual update and loop boundary.
    pub check_invariants: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps: 1e-9,
            initial_matching: InitialMatching::Empty,
            check_invariants: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GenerateError {
    BadRange(&'static str),
}

impl fmt::Display for GenerateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenerateError::BadRange(why) => write!(f, "bad generator range: {why}"),
        }
    }
}

impl core::error::Error for GenerateError {}

/// Draws a random feasible instance.
///
/// Capacities are uniform in `[1, cap_max]` and then raised round-robin,
/// one unit at a time, until `s <= sum(beta)` and `t <= sum(alpha)`.
/// With `integer_weights` the weights are uniform over the integers in
/// `[weight_lo, weight_hi]`; otherwise uniform reals. The output depends
/// only on the arguments.
pub fn generate_instance(
    s: usize,
    t: usize,
    cap_max: u32,
    weight_lo: f64,
    weight_hi: f64,
    integer_weights: bool,
    seed: u64,
) -> Result<BMatchInstance, GenerateError> {
    if s == 0 || t == 0 {
        return Err(GenerateError::BadRange("s and t must be at least 1"));
    }
    if cap_max == 0 {
        return Err(GenerateError::BadRange("cap_max must be at least 1"));
    }
    if !weight_lo.is_finite() || !weight_hi.is_finite() || weight_lo > weight_hi {
        return Err(GenerateError::BadRange(
            "need finite weight_lo <= weight_hi",
        ));
    }
    let int_range = if integer_weights {
        let lo = ceil_i64(weight_lo);
        let hi = floor_i64(weight_hi);
        if lo > hi {
            return Err(GenerateError::BadRange(
                "no integer inside the weight range",
            ));
        }
        Some((lo, hi))
    } else {
        None
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut alpha: Vec<u32> = (0..s).map(|_| rng.gen_range(1..=cap_max)).collect();
    let mut beta: Vec<u32> = (0..t).map(|_| rng.gen_range(1..=cap_max)).collect();
    raise_round_robin(&mut beta, s as u64);
    raise_round_robin(&mut alpha, t as u64);

    let weights = (0..s * t)
        .map(|_| match int_range {
            Some((lo, hi)) => rng.gen_range(lo..=hi) as f64,
            None => rng.gen_range(weight_lo..=weight_hi),
        })
        .collect();

    Ok(BMatchInstance {
        s,
        t,
        alpha,
        beta,
        weights,
    })
}

fn raise_round_robin(caps: &mut [u32], needed: u64) {
    let mut total: u64 = caps.iter().map(|&c| u64::from(c)).sum();
    let mut k = 0;
    while total < needed {
        caps[k] += 1;
        total += 1;
        k = (k + 1) % caps.len();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn minimal_instance_is_valid() {
        let inst = BMatchInstance::from_rows(vec![1], vec![1], &[vec![5.0]]);
        assert_eq!(validate_instance(&inst), Ok(()));
    }

    #[test]
    fn too_many_left_vertices() {
        let inst = BMatchInstance::from_rows(vec![1, 1], vec![1], &[vec![1.0], vec![2.0]]);
        assert_eq!(
            validate_instance(&inst),
            Err(ValidationError::Infeasible {
                side: Part::Left,
                count: 2,
                capacity: 1
            })
        );
    }

    #[test]
    fn too_many_right_vertices() {
        let inst = BMatchInstance::from_rows(vec![1], vec![1, 1], &[vec![1.0, 2.0]]);
        assert!(matches!(
            validate_instance(&inst),
            Err(ValidationError::Infeasible {
                side: Part::Right,
                ..
            })
        ));
    }

    #[test]
    fn zero_capacity() {
        let inst = BMatchInstance::from_rows(vec![0], vec![1], &[vec![1.0]]);
        assert_eq!(
            validate_instance(&inst),
            Err(ValidationError::NonPositiveCapacity {
                side: Part::Left,
                index: 0
            })
        );
    }

    #[test]
    fn shape_and_finiteness() {
        let mut inst = BMatchInstance::from_rows(vec![1], vec![1], &[vec![1.0]]);
        inst.weights.push(2.0);
        assert!(matches!(
            validate_instance(&inst),
            Err(ValidationError::ShapeMismatch { .. })
        ));
        let inst = BMatchInstance::from_rows(vec![1], vec![1], &[vec![f64::NAN]]);
        assert_eq!(
            validate_instance(&inst),
            Err(ValidationError::NonFiniteWeight { row: 0, col: 0 })
        );
        let empty = BMatchInstance::from_rows(vec![], vec![1], &[]);
        assert!(matches!(
            validate_instance(&empty),
            Err(ValidationError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn degenerate_generator_ranges() {
        for seed in [0, 7, u64::MAX] {
            let inst = generate_instance(1, 1, 1, 0.0, 0.0, true, seed).unwrap();
            assert_eq!(inst.alpha, vec![1]);
            assert_eq!(inst.beta, vec![1]);
            assert_eq!(inst.weights, vec![0.0]);
        }
    }

    #[test]
    fn generator_is_deterministic() {
        let a = generate_instance(4, 3, 3, -9.0, 9.0, true, 42).unwrap();
        let b = generate_instance(4, 3, 3, -9.0, 9.0, true, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(4, 3, 3, -1.5, 2.5, false, 42).unwrap();
        let d = generate_instance(4, 3, 3, -1.5, 2.5, false, 42).unwrap();
        assert_eq!(c, d);
        assert!(c.weights.iter().all(|&w| (-1.5..=2.5).contains(&w)));
    }

    #[test]
    fn generator_repairs_feasibility() {
        let inst = generate_instance(3, 1, 1, 0.0, 1.0, true, 5).unwrap();
        assert_eq!(inst.beta, vec![3]);
        assert_eq!(inst.alpha, vec![1, 1, 1]);
        let inst = generate_instance(1, 4, 1, 0.0, 1.0, true, 5).unwrap();
        assert_eq!(inst.alpha, vec![4]);
        let inst = generate_instance(2, 5, 1, 0.0, 1.0, true, 5).unwrap();
        assert_eq!(inst.alpha, vec![3, 2]);
    }

    #[test]
    fn generator_rejects_bad_ranges() {
        assert!(generate_instance(0, 1, 1, 0.0, 1.0, true, 0).is_err());
        assert!(generate_instance(1, 1, 0, 0.0, 1.0, true, 0).is_err());
        assert!(generate_instance(1, 1, 1, 2.0, 1.0, false, 0).is_err());
        assert!(generate_instance(1, 1, 1, 0.2, 0.8, true, 0).is_err());
        assert!(generate_instance(1, 1, 1, f64::NEG_INFINITY, 0.0, false, 0).is_err());
    }

    #[test]
    fn integer_weights_cover_the_range() {
        let inst = generate_instance(5, 5, 3, -9.0, 9.0, true, 1).unwrap();
        assert!(inst
            .weights
            .iter()
            .all(|&w| w == (w as i64) as f64 && (-9.0..=9.0).contains(&w)));
    }
}
