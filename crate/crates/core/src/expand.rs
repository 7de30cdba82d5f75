//! The capacity-expanded graph, projection of its matchings back onto the
//! original vertices, and an independent b-matching verifier.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::float::abs;
use crate::hungarian::{MatchingState, SolveError};
use crate::instance::BMatchInstance;

/// Each original vertex `i` becomes a contiguous block of `alpha[i]` left
/// vertices (right: `beta[j]`); the first vertex of a block is the original,
/// the rest are its copies. Weights are looked up through the owner maps, so
/// every copy sees exactly the row (column) of its original.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpandedGraph {
    s: usize,
    t: usize,
    weights: Vec<f64>,
    left_owner: Vec<usize>,
    right_owner: Vec<usize>,
    left_start: Vec<usize>,
    right_start: Vec<usize>,
}

fn block_layout(caps: &[u32]) -> (Vec<usize>, Vec<usize>) {
    let mut start = Vec::with_capacity(caps.len() + 1);
    let mut owner = Vec::new();
    start.push(0);
    for (i, &c) in caps.iter().enumerate() {
        owner.extend(core::iter::repeat_n(i, c as usize));
        start.push(owner.len());
    }
    (start, owner)
}

/// Builds the expanded graph. The instance is expected to be validated.
pub fn expand(inst: &BMatchInstance) -> ExpandedGraph {
    let (left_start, left_owner) = block_layout(&inst.alpha);
    let (right_start, right_owner) = block_layout(&inst.beta);
    ExpandedGraph {
        s: inst.s,
        t: inst.t,
        weights: inst.weights.clone(),
        left_owner,
        right_owner,
        left_start,
        right_start,
    }
}

impl ExpandedGraph {
    /// Number of expanded left vertices, `sum(alpha)`.
    #[inline]
    pub fn p(&self) -> usize {
        self.left_owner.len()
    }

    /// Number of expanded right vertices, `sum(beta)`.
    #[inline]
    pub fn q(&self) -> usize {
        self.right_owner.len()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    #[inline]
    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.weights[self.left_owner[x] * self.t + self.right_owner[y]]
    }

    #[inline]
    pub fn original_weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.t + j]
    }

    pub fn left_owner(&self) -> &[usize] {
        &self.left_owner
    }

    pub fn right_owner(&self) -> &[usize] {
        &self.right_owner
    }

    /// Expanded indices of left group `i`; the first one is the original.
    pub fn left_group(&self, i: usize) -> Range<usize> {
        self.left_start[i]..self.left_start[i + 1]
    }

    pub fn right_group(&self, j: usize) -> Range<usize> {
        self.right_start[j]..self.right_start[j + 1]
    }

    /// Expanded index of left original `i`.
    pub fn left_original(&self, i: usize) -> usize {
        self.left_start[i]
    }

    pub fn right_original(&self, j: usize) -> usize {
        self.right_start[j]
    }

    pub fn is_left_original(&self, x: usize) -> bool {
        self.left_start[self.left_owner[x]] == x
    }

    pub fn is_right_original(&self, y: usize) -> bool {
        self.right_start[self.right_owner[y]] == y
    }
}

/// One owner-pair edge of a b-matching with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct BEdge {
    pub left: usize,
    pub right: usize,
    pub multiplicity: u32,
}

/// A degree-constrained edge multiset on the original vertices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BMatching {
    /// Sorted by `(left, right)`, pairs unique.
    pub edges: Vec<BEdge>,
    pub total_weight: f64,
}

impl BMatching {
    pub fn left_degrees(&self, s: usize) -> Vec<u64> {
        let mut deg = alloc::vec![0u64; s];
        for e in &self.edges {
            if e.left < s {
                deg[e.left] += u64::from(e.multiplicity);
            }
        }
        deg
    }

    pub fn right_degrees(&self, t: usize) -> Vec<u64> {
        let mut deg = alloc::vec![0u64; t];
        for e in &self.edges {
            if e.right < t {
                deg[e.right] += u64::from(e.multiplicity);
            }
        }
        deg
    }
}

/// Projects a matching on `g` to owner pairs. Each matched expanded edge
/// adds one to the multiplicity of its owner pair; the total is the sum of
/// matched expanded weights taken in increasing left index.
pub fn collapse(g: &ExpandedGraph, m: &MatchingState) -> Result<BMatching, SolveError> {
    if m.left.len() != g.p() || m.right.len() != g.q() || !m.is_consistent() {
        return Err(SolveError::InconsistentMatching);
    }
    let mut counts: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut total_weight = 0.0;
    for (x, y) in m.pairs() {
        *counts
            .entry((g.left_owner[x], g.right_owner[y]))
            .or_insert(0) += 1;
        total_weight += g.weight(x, y);
    }
    let edges = counts
        .into_iter()
        .map(|((left, right), multiplicity)| BEdge {
            left,
            right,
            multiplicity,
        })
        .collect();
    Ok(BMatching {
        edges,
        total_weight,
    })
}

/// The first rule a candidate b-matching breaks.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    EdgeOutOfRange {
        left: usize,
        right: usize,
    },
    DuplicateEdge {
        left: usize,
        right: usize,
    },
    ZeroMultiplicity {
        left: usize,
        right: usize,
    },
    MultiplicityTooLarge {
        left: usize,
        right: usize,
        multiplicity: u32,
        bound: u32,
    },
    LeftDegreeTooLow {
        vertex: usize,
        degree: u64,
    },
    LeftDegreeTooHigh {
        vertex: usize,
        degree: u64,
        capacity: u32,
    },
    RightDegreeTooLow {
        vertex: usize,
        degree: u64,
    },
    RightDegreeTooHigh {
        vertex: usize,
        degree: u64,
        capacity: u32,
    },
    WeightMismatch {
        stated: f64,
        recomputed: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::EdgeOutOfRange { left, right } => {
                write!(f, "edge ({left}, {right}) is out of range")
            }
            Violation::DuplicateEdge { left, right } => {
                write!(f, "edge ({left}, {right}) is listed twice")
            }
            Violation::ZeroMultiplicity { left, right } => {
                write!(f, "edge ({left}, {right}) has multiplicity 0")
            }
            Violation::MultiplicityTooLarge {
                left,
                right,
                multiplicity,
                bound,
            } => write!(
                f,
                "edge ({left}, {right}) has multiplicity {multiplicity} > {bound}"
            ),
            Violation::LeftDegreeTooLow { vertex, degree } => {
                write!(f, "left vertex {vertex} has degree {degree} < 1")
            }
            Violation::LeftDegreeTooHigh {
                vertex,
                degree,
                capacity,
            } => write!(
                f,
                "left vertex {vertex} has degree {degree} > capacity {capacity}"
            ),
            Violation::RightDegreeTooLow { vertex, degree } => {
                write!(f, "right vertex {vertex} has degree {degree} < 1")
            }
            Violation::RightDegreeTooHigh {
                vertex,
                degree,
                capacity,
            } => write!(
                f,
                "right vertex {vertex} has degree {degree} > capacity {capacity}"
            ),
            Violation::WeightMismatch { stated, recomputed } => {
                write!(
                    f,
                    "weight mismatch: stated {stated}, recomputed {recomputed}"
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub violation: Option<Violation>,
    pub recomputed_weight: f64,
}

impl VerifyReport {
    pub fn is_pass(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks edge ranges, uniqueness and multiplicity bounds, then left
/// degrees, right degrees and finally the stated weight (absolute `eps`).
pub fn verify_b_matching(inst: &BMatchInstance, bm: &BMatching, eps: f64) -> VerifyReport {
    let mut recomputed = 0.0;
    let mut seen = BTreeMap::new();
    let mut first = None;
    for e in &bm.edges {
        let (left, right) = (e.left, e.right);
        let v = if left >= inst.s || right >= inst.t {
            Some(Violation::EdgeOutOfRange { left, right })
        } else if seen.insert((left, right), ()).is_some() {
            Some(Violation::DuplicateEdge { left, right })
        } else if e.multiplicity == 0 {
            Some(Violation::ZeroMultiplicity { left, right })
        } else {
            let bound = inst.alpha[left].min(inst.beta[right]);
            if e.multiplicity > bound {
                Some(Violation::MultiplicityTooLarge {
                    left,
                    right,
                    multiplicity: e.multiplicity,
                    bound,
                })
            } else {
                None
            }
        };
        if v.is_some() {
            first = first.or(v);
            continue;
        }
        recomputed += f64::from(e.multiplicity) * inst.weight(left, right);
    }
    if first.is_none() {
        first = degree_violation(inst, bm);
    }
    if first.is_none() && abs(recomputed - bm.total_weight) > eps {
        first = Some(Violation::WeightMismatch {
            stated: bm.total_weight,
            recomputed,
        });
    }
    VerifyReport {
        violation: first,
        recomputed_weight: recomputed,
    }
}

fn degree_violation(inst: &BMatchInstance, bm: &BMatching) -> Option<Violation> {
    for (vertex, (&degree, &capacity)) in
        bm.left_degrees(inst.s).iter().zip(&inst.alpha).enumerate()
    {
        if degree < 1 {
            return Some(Violation::LeftDegreeTooLow { vertex, degree });
        }
        if degree > u64::from(capacity) {
            return Some(Violation::LeftDegreeTooHigh {
                vertex,
                degree,
                capacity,
            });
        }
    }
    for (vertex, (&degree, &capacity)) in
        bm.right_degrees(inst.t).iter().zip(&inst.beta).enumerate()
    {
        if degree < 1 {
            return Some(Violation::RightDegreeTooLow { vertex, degree });
        }
        if degree > u64::from(capacity) {
            return Some(Violation::RightDegreeTooHigh {
                vertex,
                degree,
                capacity,
            });
        }
    }
    None
}
