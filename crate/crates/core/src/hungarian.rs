//! Slack-array Hungarian machinery: feasible labelings, the alternating
//! tree search with its dual step, augmentation, and a plain assignment
//! solver built from the same pieces.
//!
//! A search is rooted on one side (`Side::Left` roots scan right vertices,
//! `Side::Right` roots scan left vertices). The scanned vertices are the
//! search *frontier*; it is the whole opposite side for the assignment
//! solver and a reduced set (see [`crate::bmatch::Frontier`]) for the
//! b-matching solver.

use alloc::vec::Vec;
use core::fmt;

use crate::expand::{expand, ExpandedGraph};
use crate::float::abs;
use crate::instance::{validate_instance, BMatchInstance, ValidationError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveError {
    InvalidInstance(ValidationError),
    /// Every frontier vertex is already in the tree and none is free.
    ExhaustedFrontier,
    /// Predecessor links did not lead back to the root.
    BrokenTree,
    InconsistentMatching,
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::InvalidInstance(e) => write!(f, "invalid instance: {e}"),
            SolveError::ExhaustedFrontier => f.write_str("search frontier exhausted"),
            SolveError::BrokenTree => f.write_str("alternating tree does not reach its root"),
            SolveError::InconsistentMatching => f.write_str("partner maps disagree"),
        }
    }
}

impl core::error::Error for SolveError {}

impl From<ValidationError> for SolveError {
    fn from(e: ValidationError) -> Self {
        SolveError::InvalidInstance(e)
    }
}

/// Dual values on the expanded vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Labeling {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
    pub eps: f64,
}

/// Right labels zero, each left label the maximum of its row.
pub fn initial_labeling(g: &ExpandedGraph, eps: f64) -> Labeling {
    let left = (0..g.p())
        .map(|x| {
            (0..g.q())
                .map(|y| g.weight(x, y))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Labeling {
        left,
        right: alloc::vec![0.0; g.q()],
        eps,
    }
}

impl Labeling {
    /// `l(x) + l(y) - w(x, y)`; nonnegative (up to eps) when feasible.
    #[inline]
    pub fn reduced_cost(&self, g: &ExpandedGraph, x: usize, y: usize) -> f64 {
        self.left[x] + self.right[y] - g.weight(x, y)
    }

    pub fn is_equality_edge(&self, g: &ExpandedGraph, x: usize, y: usize) -> bool {
        abs(self.reduced_cost(g, x, y)) <= self.eps
    }

    /// First pair (row-major) with reduced cost below `-eps`.
    pub fn first_infeasible_pair(&self, g: &ExpandedGraph) -> Option<(usize, usize)> {
        (0..g.p())
            .flat_map(|x| (0..g.q()).map(move |y| (x, y)))
            .find(|&(x, y)| self.reduced_cost(g, x, y) < -self.eps)
    }

    pub fn is_feasible(&self, g: &ExpandedGraph) -> bool {
        self.first_infeasible_pair(g).is_none()
    }

    pub fn total(&self) -> f64 {
        self.left.iter().chain(&self.right).sum()
    }

    pub fn side(&self, side: Side) -> &[f64] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    fn side_mut(&mut self, side: Side) -> &mut [f64] {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    /// Reduced cost of the edge between root-side `u` and opposite `v`.
    #[inline]
    fn oriented_reduced(&self, g: &ExpandedGraph, side: Side, u: usize, v: usize) -> f64 {
        match side {
            Side::Left => self.reduced_cost(g, u, v),
            Side::Right => self.reduced_cost(g, v, u),
        }
    }
}

/// A one-to-one matching on the expanded graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingState {
    pub left: Vec<Option<usize>>,
    pub right: Vec<Option<usize>>,
}

impl MatchingState {
    pub fn empty(p: usize, q: usize) -> Self {
        MatchingState {
            left: alloc::vec![None; p],
            right: alloc::vec![None; q],
        }
    }

    pub fn partner(&self, side: Side, v: usize) -> Option<usize> {
        match side {
            Side::Left => self.left[v],
            Side::Right => self.right[v],
        }
    }

    pub fn is_free(&self, side: Side, v: usize) -> bool {
        self.partner(side, v).is_none()
    }

    /// Matches `x` to `y`, overwriting both partner slots.
    pub fn link(&mut self, x: usize, y: usize) {
        self.left[x] = Some(y);
        self.right[y] = Some(x);
    }

    fn link_oriented(&mut self, side: Side, u: usize, v: usize) {
        match side {
            Side::Left => self.link(u, v),
            Side::Right => self.link(v, u),
        }
    }

    /// Removes the pair containing left vertex `x`, if any.
    pub fn unlink_left(&mut self, x: usize) {
        if let Some(y) = self.left[x].take() {
            self.right[y] = None;
        }
    }

    /// Matched pairs `(x, y)` in increasing `x`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.left
            .iter()
            .enumerate()
            .filter_map(|(x, y)| y.map(|y| (x, y)))
    }

    pub fn len(&self) -> usize {
        self.left.iter().filter(|y| y.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_consistent(&self) -> bool {
        let q = self.right.len();
        let p = self.left.len();
        self.left
            .iter()
            .enumerate()
            .all(|(x, y)| y.is_none_or(|y| y < q && self.right[y] == Some(x)))
            && self
                .right
                .iter()
                .enumerate()
                .all(|(y, x)| x.is_none_or(|x| x < p && self.left[x] == Some(y)))
    }
}

/// State of one alternating-tree search.
///
/// Frontier vertices are addressed by their position in `frontier`, which
/// is sorted by expanded index so that "lowest position" is "lowest index".
#[derive(Clone, Debug, PartialEq)]
pub struct SearchState {
    pub root: usize,
    pub side: Side,
    /// Root-side tree vertices (S), in insertion order.
    pub tree_s: Vec<usize>,
    /// Opposite-side vertices scanned by this search, ascending.
    pub frontier: Vec<usize>,
    /// Frontier positions currently in T.
    pub in_t: Vec<bool>,
    /// Frontier positions in T, in insertion order.
    pub tree_t: Vec<usize>,
    pub slack: Vec<f64>,
    /// The S vertex attaining `slack[pos]`; the tree predecessor of `pos`.
    pub slack_arg: Vec<usize>,
    /// Last dual step.
    pub alpha_l: f64,
}

impl SearchState {
    pub fn new(root: usize, side: Side, frontier: Vec<usize>) -> Self {
        debug_assert!(frontier.windows(2).all(|w| w[0] < w[1]));
        let n = frontier.len();
        SearchState {
            root,
            side,
            tree_s: alloc::vec![root],
            frontier,
            in_t: alloc::vec![false; n],
            tree_t: Vec::new(),
            slack: alloc::vec![0.0; n],
            slack_arg: alloc::vec![root; n],
            alpha_l: 0.0,
        }
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.frontier.binary_search(&v).ok()
    }

    /// Lowest frontier position outside T whose slack is at most `eps`.
    /// `None` is the `N(S) = T` condition.
    pub fn tight_vertex(&self, eps: f64) -> Option<usize> {
        (0..self.frontier.len()).find(|&k| !self.in_t[k] && self.slack[k] <= eps)
    }
}

/// Slacks of every frontier vertex against the root alone.
pub fn init_slack(st: &mut SearchState, l: &Labeling, g: &ExpandedGraph) {
    let root = st.root;
    for (k, &v) in st.frontier.iter().enumerate() {
        st.slack[k] = l.oriented_reduced(g, st.side, root, v);
        st.slack_arg[k] = root;
    }
}

/// Minimum slack over frontier vertices outside T (linear scan).
pub fn compute_alpha(st: &SearchState) -> Result<f64, SolveError> {
    st.slack
        .iter()
        .zip(&st.in_t)
        .filter(|(_, &t)| !t)
        .map(|(&s, _)| s)
        .reduce(f64::min)
        .ok_or(SolveError::ExhaustedFrontier)
}

/// Lowers S labels and raises T labels by `alpha`, shifting the slacks of
/// frontier vertices outside T to match.
pub fn dual_update(l: &mut Labeling, st: &mut SearchState, alpha: f64) {
    let side = st.side;
    {
        let root_labels = l.side_mut(side);
        for &u in &st.tree_s {
            root_labels[u] -= alpha;
        }
    }
    let other = l.side_mut(side.opposite());
    for &k in &st.tree_t {
        other[st.frontier[k]] += alpha;
    }
    for (slack, &t) in st.slack.iter_mut().zip(&st.in_t) {
        if !t {
            *slack -= alpha;
        }
    }
    st.alpha_l = alpha;
}

/// Moves the tight matched frontier vertex at `pos` into T and its partner
/// `z` into S, then relaxes the remaining slacks through `z`.
pub fn extend_tree(st: &mut SearchState, pos: usize, z: usize, l: &Labeling, g: &ExpandedGraph) {
    st.in_t[pos] = true;
    st.tree_t.push(pos);
    st.tree_s.push(z);
    let side = st.side;
    for k in 0..st.frontier.len() {
        if st.in_t[k] {
            continue;
        }
        let candidate = l.oriented_reduced(g, side, z, st.frontier[k]);
        if candidate < st.slack[k] {
            st.slack[k] = candidate;
            st.slack_arg[k] = z;
        }
    }
}

/// Flips the alternating path that ends at the free frontier vertex at
/// `end` and runs back to the root through `slack_arg` and partner links.
pub fn augment(m: &mut MatchingState, st: &SearchState, end: usize) -> Result<(), SolveError> {
    let side = st.side;
    let mut pos = end;
    for _ in 0..st.tree_s.len() {
        let v = st.frontier[pos];
        let u = st.slack_arg[pos];
        let previous = m.partner(side, u);
        m.link_oriented(side, u, v);
        if u == st.root {
            return Ok(());
        }
        let w = previous.ok_or(SolveError::BrokenTree)?;
        pos = st.position(w).ok_or(SolveError::BrokenTree)?;
        if !st.in_t[pos] {
            return Err(SolveError::BrokenTree);
        }
    }
    Err(SolveError::BrokenTree)
}

/// A property the search is expected to maintain, found broken.
#[derive(Clone, Debug, PartialEq)]
pub enum InvariantViolation {
    InfeasibleLabel {
        x: usize,
        y: usize,
        reduced: f64,
    },
    NotEqualityEdge {
        x: usize,
        y: usize,
        reduced: f64,
    },
    StaleSlack {
        side: Side,
        vertex: usize,
        stored: f64,
        recomputed: f64,
    },
    NoNewTightVertex,
    UnequalCopyLabels {
        side: Side,
        group: usize,
        a: usize,
        b: usize,
    },
    UnequalCopySlacks {
        side: Side,
        group: usize,
        a: usize,
        b: usize,
        against: usize,
    },
    OriginalUnmatched {
        side: Side,
        vertex: usize,
    },
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InvariantViolation::InfeasibleLabel { x, y, reduced } => {
                write!(f, "labeling infeasible at ({x}, {y}): reduced cost {reduced}")
            }
            InvariantViolation::NotEqualityEdge { x, y, reduced } => {
                write!(f, "matched edge ({x}, {y}) has reduced cost {reduced}")
            }
            InvariantViolation::StaleSlack {
                side,
                vertex,
                stored,
                recomputed,
            } => write!(
                f,
                "slack of {side} vertex {vertex} is {stored}, recomputed {recomputed}"
            ),
            InvariantViolation::NoNewTightVertex => {
                f.write_str("dual update produced no tight vertex outside T")
            }
            InvariantViolation::UnequalCopyLabels { side, group, a, b } => write!(
                f,
                "free {side} copies {a} and {b} of group {group} have different labels"
            ),
            InvariantViolation::UnequalCopySlacks {
                side,
                group,
                a,
                b,
                against,
            } => write!(
                f,
                "free {side} copies {a} and {b} of group {group} have different slacks against {against}"
            ),
            InvariantViolation::OriginalUnmatched { side, vertex } => {
                write!(f, "{side} original {vertex} lost its partner")
            }
        }
    }
}

/// Collects invariant violations when enabled; a no-op otherwise.
#[derive(Clone, Debug, Default)]
pub struct Checker {
    pub enabled: bool,
    pub violations: Vec<InvariantViolation>,
}

impl Checker {
    pub fn new(enabled: bool) -> Self {
        Checker {
            enabled,
            violations: Vec::new(),
        }
    }

    pub fn record(&mut self, v: Option<InvariantViolation>) {
        if let Some(v) = v {
            self.violations.push(v);
        }
    }
}

/// Recomputes every slack outside T from the S set and compares it, and
/// its witness, with the stored values.
pub fn check_slack(
    st: &SearchState,
    l: &Labeling,
    g: &ExpandedGraph,
) -> Option<InvariantViolation> {
    let other = st.side.opposite();
    for (k, &v) in st.frontier.iter().enumerate() {
        if st.in_t[k] {
            continue;
        }
        let recomputed = st
            .tree_s
            .iter()
            .map(|&u| l.oriented_reduced(g, st.side, u, v))
            .fold(f64::INFINITY, f64::min);
        let witness = l.oriented_reduced(g, st.side, st.slack_arg[k], v);
        if abs(recomputed - st.slack[k]) > l.eps
            || abs(witness - st.slack[k]) > l.eps
            || !st.tree_s.contains(&st.slack_arg[k])
        {
            return Some(InvariantViolation::StaleSlack {
                side: other,
                vertex: v,
                stored: st.slack[k],
                recomputed,
            });
        }
    }
    None
}

pub fn check_feasible(l: &Labeling, g: &ExpandedGraph) -> Option<InvariantViolation> {
    l.first_infeasible_pair(g)
        .map(|(x, y)| InvariantViolation::InfeasibleLabel {
            x,
            y,
            reduced: l.reduced_cost(g, x, y),
        })
}

pub fn check_equality_edges(
    m: &MatchingState,
    l: &Labeling,
    g: &ExpandedGraph,
) -> Option<InvariantViolation> {
    m.pairs()
        .find(|&(x, y)| !l.is_equality_edge(g, x, y))
        .map(|(x, y)| InvariantViolation::NotEqualityEdge {
            x,
            y,
            reduced: l.reduced_cost(g, x, y),
        })
}

/// How a search ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchEnd {
    /// A free frontier vertex (by position) became tight.
    Free(usize),
    /// The frontier ran out before a free vertex was reached.
    Exhausted,
}

/// Grows the alternating tree from `st.root` until a free frontier vertex
/// becomes tight, applying dual updates whenever no tight vertex is left
/// outside T. Does not augment.
pub fn grow_tree(
    g: &ExpandedGraph,
    m: &MatchingState,
    l: &mut Labeling,
    st: &mut SearchState,
    dual_updates: &mut u64,
    checker: &mut Checker,
) -> SearchEnd {
    let eps = l.eps;
    let other = st.side.opposite();
    init_slack(st, l, g);
    if checker.enabled {
        checker.record(check_slack(st, l, g));
    }
    loop {
        let pos = match st.tight_vertex(eps) {
            Some(pos) => pos,
            None => {
                let alpha = match compute_alpha(st) {
                    Ok(alpha) => alpha,
                    Err(_) => return SearchEnd::Exhausted,
                };
                dual_update(l, st, alpha);
                *dual_updates += 1;
                let next = st.tight_vertex(eps);
                if checker.enabled {
                    checker.record(check_feasible(l, g));
                    checker.record(check_slack(st, l, g));
                    if next.is_none() {
                        checker.record(Some(InvariantViolation::NoNewTightVertex));
                    }
                }
                match next {
                    Some(pos) => pos,
                    None => continue,
                }
            }
        };
        let v = st.frontier[pos];
        match m.partner(other, v) {
            None => return SearchEnd::Free(pos),
            Some(z) => {
                extend_tree(st, pos, z, l, g);
                if checker.enabled {
                    checker.record(check_slack(st, l, g));
                }
            }
        }
    }
}

/// Result of [`solve_assignment`].
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    /// `mate[i]` is the column assigned to row `i`.
    pub mate: Vec<usize>,
    pub weight: f64,
    pub labeling: Labeling,
    pub dual_updates: u64,
}

/// Maximum-weight perfect matching of a square matrix, starting from the
/// empty matching and growing one augmenting path per row.
pub fn solve_assignment(weights: &[Vec<f64>], eps: f64) -> Result<Assignment, SolveError> {
    let n = weights.len();
    if weights.iter().any(|r| r.len() != n) {
        return Err(SolveError::InvalidInstance(
            ValidationError::ShapeMismatch {
                reason: "assignment matrix is not square",
            },
        ));
    }
    let inst = BMatchInstance::unit_capacity(weights);
    validate_instance(&inst)?;
    let g = expand(&inst);
    let mut l = initial_labeling(&g, eps);
    let mut m = MatchingState::empty(n, n);
    let mut dual_updates = 0;
    let mut checker = Checker::new(false);
    for root in 0..n {
        let mut st = SearchState::new(root, Side::Left, (0..n).collect());
        match grow_tree(&g, &m, &mut l, &mut st, &mut dual_updates, &mut checker) {
            SearchEnd::Free(end) => augment(&mut m, &st, end)?,
            SearchEnd::Exhausted => return Err(SolveError::ExhaustedFrontier),
        }
    }
    let mate: Vec<usize> = m
        .left
        .iter()
        .map(|y| y.ok_or(SolveError::InconsistentMatching))
        .collect::<Result<_, _>>()?;
    let weight = mate.iter().enumerate().map(|(i, &j)| weights[i][j]).sum();
    Ok(Assignment {
        mate,
        weight,
        labeling: l,
        dual_updates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::BMatchInstance;
    use alloc::vec;

    fn graph(alpha: Vec<u32>, beta: Vec<u32>, rows: &[Vec<f64>]) -> ExpandedGraph {
        expand(&BMatchInstance::from_rows(alpha, beta, rows))
    }

    #[test]
    fn initial_labels_are_row_maxima() {
        let g = graph(vec![1], vec![1, 1], &[vec![5.0, 3.0]]);
        let l = initial_labeling(&g, 1e-9);
        assert_eq!(l.left, vec![5.0]);
        assert_eq!(l.right, vec![0.0, 0.0]);
        assert!(l.is_feasible(&g));

        let g = graph(vec![1, 1], vec![1], &[vec![0.0], vec![0.0]]);
        let l = initial_labeling(&g, 1e-9);
        assert_eq!(l.total(), 0.0);

        let g = graph(vec![2], vec![1], &[vec![7.0]]);
        assert_eq!(initial_labeling(&g, 1e-9).left, vec![7.0, 7.0]);
    }

    // Root with label 4 and a two-vertex frontier with weights [4, 2].
    fn two_column() -> (ExpandedGraph, Labeling, SearchState) {
        let g = graph(vec![1, 1], vec![1, 1], &[vec![4.0, 2.0], vec![4.0, 0.0]]);
        let l = initial_labeling(&g, 1e-9);
        let st = SearchState::new(0, Side::Left, vec![0, 1]);
        (g, l, st)
    }

    #[test]
    fn slack_from_root() {
        let (g, l, mut st) = two_column();
        init_slack(&mut st, &l, &g);
        assert_eq!(st.slack, vec![0.0, 2.0]);
        assert_eq!(st.slack_arg, vec![0, 0]);

        let g = graph(vec![1], vec![1, 1], &[vec![0.0, 0.0]]);
        let l = initial_labeling(&g, 0.0);
        let mut st = SearchState::new(0, Side::Left, vec![0, 1]);
        init_slack(&mut st, &l, &g);
        assert_eq!(st.slack, vec![0.0, 0.0]);

        let mut st = SearchState::new(0, Side::Left, vec![1]);
        init_slack(&mut st, &l, &g);
        assert_eq!(st.slack.len(), 1);
    }

    #[test]
    fn alpha_is_the_minimum_outside_t() {
        let (g, l, mut st) = two_column();
        init_slack(&mut st, &l, &g);
        assert_eq!(compute_alpha(&st), Ok(0.0));
        st.in_t[0] = true;
        st.tree_t.push(0);
        assert_eq!(compute_alpha(&st), Ok(2.0));
        st.in_t[1] = true;
        st.tree_t.push(1);
        assert_eq!(compute_alpha(&st), Err(SolveError::ExhaustedFrontier));
    }

    #[test]
    fn dual_update_by_zero_is_identity() {
        let (g, mut l, mut st) = two_column();
        init_slack(&mut st, &l, &g);
        let (l0, s0) = (l.clone(), st.slack.clone());
        dual_update(&mut l, &mut st, 0.0);
        assert_eq!(l, l0);
        assert_eq!(st.slack, s0);
    }

    #[test]
    fn dual_update_opens_the_next_edge() {
        // Root 0 is tight with column 0, which is matched to row 1.
        let (g, mut l, mut st) = two_column();
        let mut m = MatchingState::empty(2, 2);
        m.link(1, 0);
        init_slack(&mut st, &l, &g);
        extend_tree(&mut st, 0, 1, &l, &g);
        assert_eq!(st.tree_s, vec![0, 1]);
        assert_eq!(st.slack[1], 2.0);
        let alpha = compute_alpha(&st).unwrap();
        assert_eq!(alpha, 2.0);
        dual_update(&mut l, &mut st, alpha);
        assert_eq!(l.left, vec![2.0, 2.0]);
        assert_eq!(l.right, vec![2.0, 0.0]);
        assert_eq!(st.slack[1], 0.0);
        assert!(l.is_feasible(&g));
        assert_eq!(check_slack(&st, &l, &g), None);
        assert_eq!(st.tight_vertex(1e-9), Some(1));
    }

    #[test]
    fn extend_tree_keeps_smaller_slacks() {
        let g = graph(
            vec![1, 1],
            vec![1, 1, 1],
            &[vec![5.0, 1.0, 1.0], vec![5.0, 0.0, 0.0]],
        );
        let l = initial_labeling(&g, 1e-9);
        let mut st = SearchState::new(0, Side::Left, vec![0, 1, 2]);
        init_slack(&mut st, &l, &g);
        let before = st.clone();
        extend_tree(&mut st, 0, 1, &l, &g);
        assert_eq!(st.slack[1..], before.slack[1..]);
        assert_eq!(st.slack_arg, vec![0, 0, 0]);
        assert_eq!((st.tree_s.len(), st.tree_t.len()), (2, 1));
    }

    #[test]
    fn extend_tree_takes_smaller_candidates() {
        let g = graph(
            vec![1, 1],
            vec![1, 1, 1],
            &[vec![5.0, 1.0, 1.0], vec![5.0, 4.0, 0.0]],
        );
        let l = initial_labeling(&g, 1e-9);
        let mut st = SearchState::new(0, Side::Left, vec![0, 1, 2]);
        init_slack(&mut st, &l, &g);
        assert_eq!(st.slack, vec![0.0, 4.0, 4.0]);
        extend_tree(&mut st, 0, 1, &l, &g);
        assert_eq!(st.slack[1], 1.0);
        assert_eq!(st.slack_arg[1], 1);
        assert_eq!(st.slack[2], 4.0);
        assert_eq!(st.slack_arg[2], 0);
        assert_eq!(check_slack(&st, &l, &g), None);
    }

    #[test]
    fn augment_single_edge() {
        let g = graph(vec![1], vec![1], &[vec![3.0]]);
        let l = initial_labeling(&g, 1e-9);
        let mut st = SearchState::new(0, Side::Left, vec![0]);
        init_slack(&mut st, &l, &g);
        let mut m = MatchingState::empty(1, 1);
        augment(&mut m, &st, 0).unwrap();
        assert_eq!(m.left, vec![Some(0)]);
        assert_eq!(m.right, vec![Some(0)]);
    }

    #[test]
    fn augment_three_edge_path() {
        // root 0 -> y0 (matched to x1) -> y1 free.
        let g = graph(vec![1, 1], vec![1, 1], &[vec![4.0, 0.0], vec![4.0, 2.0]]);
        let mut l = initial_labeling(&g, 1e-9);
        let mut m = MatchingState::empty(2, 2);
        m.link(1, 0);
        let mut st = SearchState::new(0, Side::Left, vec![0, 1]);
        let mut updates = 0;
        let end = grow_tree(
            &g,
            &m,
            &mut l,
            &mut st,
            &mut updates,
            &mut Checker::new(true),
        );
        assert_eq!(end, SearchEnd::Free(1));
        assert_eq!(updates, 1);
        let before = m.len();
        augment(&mut m, &st, 1).unwrap();
        assert_eq!(m.len(), before + 1);
        assert_eq!(m.left, vec![Some(0), Some(1)]);
        assert_eq!(m.right, vec![Some(0), Some(1)]);
        assert!(m.is_consistent());
        assert_eq!(check_equality_edges(&m, &l, &g), None);
    }

    #[test]
    fn augment_detects_broken_links() {
        let st = SearchState {
            root: 0,
            side: Side::Left,
            tree_s: vec![0, 1],
            frontier: vec![0, 1],
            in_t: vec![false, false],
            tree_t: vec![],
            slack: vec![0.0, 0.0],
            slack_arg: vec![0, 1],
            alpha_l: 0.0,
        };
        // Row 1 claims to be in S but has no partner.
        let mut m = MatchingState::empty(2, 2);
        assert_eq!(augment(&mut m, &st, 1), Err(SolveError::BrokenTree));
    }

    #[test]
    fn right_rooted_search_mirrors_left() {
        // Transposed version of the three-edge path above.
        let g = graph(vec![1, 1], vec![1, 1], &[vec![4.0, 4.0], vec![0.0, 2.0]]);
        let mut l = Labeling {
            left: vec![0.0, 0.0],
            right: vec![4.0, 4.0],
            eps: 1e-9,
        };
        let mut m = MatchingState::empty(2, 2);
        m.link(0, 1);
        let mut st = SearchState::new(0, Side::Right, vec![0, 1]);
        let mut updates = 0;
        let mut checker = Checker::new(true);
        let end = grow_tree(&g, &m, &mut l, &mut st, &mut updates, &mut checker);
        assert_eq!(end, SearchEnd::Free(1));
        augment(&mut m, &st, 1).unwrap();
        assert_eq!(m.right, vec![Some(0), Some(1)]);
        assert!(checker.violations.is_empty(), "{:?}", checker.violations);
        assert_eq!(check_equality_edges(&m, &l, &g), None);
    }

    #[test]
    fn assignment_small_cases() {
        let a = solve_assignment(&[vec![5.0]], 1e-9).unwrap();
        assert_eq!((a.mate.clone(), a.weight), (vec![0], 5.0));
        let a = solve_assignment(&[vec![3.0, 1.0], vec![2.0, 4.0]], 1e-9).unwrap();
        assert_eq!(a.weight, 7.0);
        assert_eq!(a.mate, vec![0, 1]);
        assert_eq!(a.labeling.total(), 7.0);
        let a = solve_assignment(&[vec![1.0, 0.0], vec![0.0, 1.0]], 1e-9).unwrap();
        assert_eq!(a.weight, 2.0);
        assert!(solve_assignment(&[vec![1.0, 2.0]], 1e-9).is_err());
    }
}
