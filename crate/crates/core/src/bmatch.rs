//! The two-phase b-matching solver on the expanded graph.
//!
//! Phase I roots searches at free left originals until all of them are
//! matched; Phase II does the same from the right side, reusing the labels
//! of Phase I. Each search scans only a [`Frontier`]: every original on the
//! opposite side, every matched copy, and one free copy per group. Free
//! copies of a group never enter the tree, so their labels (and therefore
//! their slacks) stay equal and the lowest-index one stands in for all.
//!
//! Phase II can run out of frontier: when every left vertex is matched but
//! some right original is still free, no augmenting path exists. The search
//! then ends at the lowest tree vertex whose partner is a root-side copy,
//! flips the tight path to it and releases that copy. Cardinality is
//! unchanged, one more original is covered and every matched edge stays
//! tight. The released copy takes the common label of its group's other
//! free copies, which is feasible because they share its weights.

use alloc::vec::Vec;
use core::time::Duration;

use crate::expand::{collapse, expand, BMatching, ExpandedGraph};
use crate::float::abs;
pub use crate::hungarian::InvariantViolation;
use crate::hungarian::{
    augment, check_equality_edges, check_feasible, grow_tree, initial_labeling, Checker, Labeling,
    MatchingState, SearchEnd, SearchState, Side, SolveError,
};
use crate::instance::{validate_instance, BMatchInstance, InitialMatching, SolverConfig};

/// Opposite-side vertices scanned by one search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Frontier {
    /// Every original of the scanned side.
    pub originals: Vec<usize>,
    /// Copies that are currently matched.
    pub matched_copies: Vec<usize>,
    /// The lowest-index free copy of each group that has one.
    pub representatives: Vec<usize>,
}

impl Frontier {
    /// All frontier vertices, ascending.
    pub fn vertices(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .originals
            .iter()
            .chain(&self.matched_copies)
            .chain(&self.representatives)
            .copied()
            .collect();
        all.sort_unstable();
        all
    }

    pub fn len(&self) -> usize {
        self.originals.len() + self.matched_copies.len() + self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn group(g: &ExpandedGraph, side: Side, k: usize) -> core::ops::Range<usize> {
    match side {
        Side::Left => g.left_group(k),
        Side::Right => g.right_group(k),
    }
}

fn group_count(g: &ExpandedGraph, side: Side) -> usize {
    match side {
        Side::Left => g.s(),
        Side::Right => g.t(),
    }
}

fn owner(g: &ExpandedGraph, side: Side, v: usize) -> usize {
    match side {
        Side::Left => g.left_owner()[v],
        Side::Right => g.right_owner()[v],
    }
}

fn is_original(g: &ExpandedGraph, side: Side, v: usize) -> bool {
    match side {
        Side::Left => g.is_left_original(v),
        Side::Right => g.is_right_original(v),
    }
}

/// Frontier for searches rooted on `root_side`; it is built over the
/// groups of the opposite side.
pub fn build_frontier(g: &ExpandedGraph, m: &MatchingState, root_side: Side) -> Frontier {
    let side = root_side.opposite();
    let mut f = Frontier::default();
    for k in 0..group_count(g, side) {
        let block = group(g, side, k);
        f.originals.push(block.start);
        let mut have_rep = false;
        for v in block.start + 1..block.end {
            if !m.is_free(side, v) {
                f.matched_copies.push(v);
            } else if !have_rep {
                f.representatives.push(v);
                have_rep = true;
            }
        }
    }
    f
}

/// Counters and checker state shared by the phases of one solve.
#[derive(Clone, Debug, Default)]
pub struct RunLog {
    pub augmentations: u64,
    /// Phase II searches that ended by releasing a copy.
    pub releases: u64,
    pub dual_updates: u64,
    pub checker: Checker,
}

impl RunLog {
    pub fn new(check_invariants: bool) -> Self {
        RunLog {
            checker: Checker::new(check_invariants),
            ..RunLog::default()
        }
    }
}

fn lowest_free_original(g: &ExpandedGraph, m: &MatchingState, side: Side) -> Option<usize> {
    (0..group_count(g, side))
        .map(|k| group(g, side, k).start)
        .find(|&v| m.is_free(side, v))
}

/// Runs alternating-tree searches rooted at the free originals of `target`
/// (lowest index first) until all of them are matched.
pub fn modified_hungarian(
    g: &ExpandedGraph,
    target: Side,
    m: &mut MatchingState,
    l: &mut Labeling,
    log: &mut RunLog,
) -> Result<(), SolveError> {
    let tracked = matched_originals(g, m);
    loop {
        if log.checker.enabled {
            boundary_checks(g, m, l, &tracked, &mut log.checker);
        }
        let Some(root) = lowest_free_original(g, m, target) else {
            return Ok(());
        };
        let frontier = build_frontier(g, m, target);
        let mut st = SearchState::new(root, target, frontier.vertices());
        match grow_tree(g, m, l, &mut st, &mut log.dual_updates, &mut log.checker) {
            SearchEnd::Free(end) => augment(m, &st, end)?,
            SearchEnd::Exhausted => {
                release_copy(g, m, l, &st)?;
                log.releases += 1;
            }
        }
        log.augmentations += 1;
    }
}

/// Ends an exhausted search at the lowest tree vertex matched to a
/// root-side copy: that copy is released and the tight tree path is
/// flipped so the root gets a partner.
fn release_copy(
    g: &ExpandedGraph,
    m: &mut MatchingState,
    l: &mut Labeling,
    st: &SearchState,
) -> Result<(), SolveError> {
    let side = st.side;
    let other = side.opposite();
    let (pos, freed) = (0..st.frontier.len())
        .filter(|&k| st.in_t[k])
        .find_map(|k| {
            m.partner(other, st.frontier[k])
                .filter(|&u| !is_original(g, side, u))
                .map(|u| (k, u))
        })
        .ok_or(SolveError::ExhaustedFrontier)?;
    match side {
        Side::Left => m.unlink_left(freed),
        Side::Right => m.unlink_left(st.frontier[pos]),
    }
    augment(m, st, pos)?;

    let block = group(g, side, owner(g, side, freed));
    let sibling = (block.start + 1..block.end).find(|&v| v != freed && m.is_free(side, v));
    if let Some(v) = sibling {
        let labels = match side {
            Side::Left => &mut l.left,
            Side::Right => &mut l.right,
        };
        labels[freed] = labels[v];
    }
    Ok(())
}

fn matched_originals(g: &ExpandedGraph, m: &MatchingState) -> Vec<(Side, usize)> {
    let mut out = Vec::new();
    for side in [Side::Left, Side::Right] {
        for k in 0..group_count(g, side) {
            let v = group(g, side, k).start;
            if !m.is_free(side, v) {
                out.push((side, v));
            }
        }
    }
    out
}

fn boundary_checks(
    g: &ExpandedGraph,
    m: &MatchingState,
    l: &Labeling,
    tracked: &[(Side, usize)],
    checker: &mut Checker,
) {
    checker.record(check_feasible(l, g));
    checker.record(check_equality_edges(m, l, g));
    checker
        .violations
        .extend(check_observations(g, m, l, l.eps));
    if let Some(&(side, vertex)) = tracked.iter().find(|&&(side, v)| m.is_free(side, v)) {
        checker.record(Some(InvariantViolation::OriginalUnmatched { side, vertex }));
    }
}

/// Free copies of every group must share one label, and so one slack
/// against every vertex of the other side.
pub fn check_observations(
    g: &ExpandedGraph,
    m: &MatchingState,
    l: &Labeling,
    eps: f64,
) -> Vec<InvariantViolation> {
    let mut out = Vec::new();
    for side in [Side::Left, Side::Right] {
        let labels = l.side(side);
        let other = side.opposite();
        let other_count = match other {
            Side::Left => g.p(),
            Side::Right => g.q(),
        };
        for k in 0..group_count(g, side) {
            let block = group(g, side, k);
            let mut free = (block.start + 1..block.end).filter(|&v| m.is_free(side, v));
            let Some(first) = free.next() else { continue };
            for v in free {
                if abs(labels[v] - labels[first]) > eps {
                    out.push(InvariantViolation::UnequalCopyLabels {
                        side,
                        group: k,
                        a: first,
                        b: v,
                    });
                    continue;
                }
                let slack = |copy: usize, u: usize| match side {
                    Side::Left => l.reduced_cost(g, copy, u),
                    Side::Right => l.reduced_cost(g, u, copy),
                };
                if let Some(against) =
                    (0..other_count).find(|&u| abs(slack(first, u) - slack(v, u)) > eps)
                {
                    out.push(InvariantViolation::UnequalCopySlacks {
                        side,
                        group: k,
                        a: first,
                        b: v,
                        against,
                    });
                }
            }
        }
    }
    out
}

/// Seeds the matching with tight edges: each free left original takes the
/// lowest-index tight vertex among the frontier's free vertices.
fn greedy_equality(g: &ExpandedGraph, m: &mut MatchingState, l: &Labeling) -> u64 {
    let mut matched = 0;
    for i in 0..g.s() {
        let x = g.left_original(i);
        if !m.is_free(Side::Left, x) {
            continue;
        }
        let pick = (0..g.t())
            .filter_map(|j| g.right_group(j).find(|&y| m.is_free(Side::Right, y)))
            .find(|&y| l.reduced_cost(g, x, y) <= l.eps);
        if let Some(y) = pick {
            m.link(x, y);
            matched += 1;
        }
    }
    matched
}

/// Source of monotonic timestamps for per-phase timing.
pub trait Clock {
    fn now(&self) -> Duration;
}

/// A clock that always reads zero.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> Duration {
        Duration::ZERO
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveReport {
    pub total_weight: f64,
    /// Equals `s`; includes edges placed by the greedy initial matching.
    pub phase1_augmentations: u64,
    /// Equals the number of right originals left free by Phase I.
    pub phase2_augmentations: u64,
    /// Phase II searches that ended by releasing a copy.
    pub phase2_releases: u64,
    pub dual_updates: u64,
    pub phase1_time: Duration,
    pub phase2_time: Duration,
    /// Empty unless invariant checking was enabled.
    pub violations: Vec<InvariantViolation>,
}

pub fn solve_b_matching(
    inst: &BMatchInstance,
    cfg: &SolverConfig,
) -> Result<(BMatching, SolveReport), SolveError> {
    solve_b_matching_with_clock(inst, cfg, &NoClock)
}

/// Validates, expands, labels, runs Phase I (left originals) and Phase II
/// (right originals), then collapses the matching to owner pairs.
pub fn solve_b_matching_with_clock(
    inst: &BMatchInstance,
    cfg: &SolverConfig,
    clock: &impl Clock,
) -> Result<(BMatching, SolveReport), SolveError> {
    validate_instance(inst)?;
    let g = expand(inst);
    let run = solve_expanded(&g, cfg, clock)?;
    let bm = collapse(&g, &run.matching)?;
    let mut report = run.report;
    report.total_weight = bm.total_weight;
    Ok((bm, report))
}

/// Final state of a two-phase run on an expanded graph.
#[derive(Clone, Debug)]
pub struct ExpandedSolution {
    pub matching: MatchingState,
    pub labeling: Labeling,
    /// `total_weight` is left at zero; see [`collapse`].
    pub report: SolveReport,
}

/// The two phases on an already expanded graph.
pub fn solve_expanded(
    g: &ExpandedGraph,
    cfg: &SolverConfig,
    clock: &impl Clock,
) -> Result<ExpandedSolution, SolveError> {
    let t0 = clock.now();
    let mut l = initial_labeling(g, cfg.eps);
    let mut m = MatchingState::empty(g.p(), g.q());

    let mut phase1 = RunLog::new(cfg.check_invariants);
    if cfg.initial_matching == InitialMatching::GreedyEquality {
        phase1.augmentations += greedy_equality(g, &mut m, &l);
    }
    modified_hungarian(g, Side::Left, &mut m, &mut l, &mut phase1)?;
    let t1 = clock.now();

    let mut phase2 = RunLog::new(cfg.check_invariants);
    modified_hungarian(g, Side::Right, &mut m, &mut l, &mut phase2)?;
    let t2 = clock.now();

    let mut violations = phase1.checker.violations;
    violations.extend(phase2.checker.violations);
    Ok(ExpandedSolution {
        matching: m,
        labeling: l,
        report: SolveReport {
            total_weight: 0.0,
            phase1_augmentations: phase1.augmentations,
            phase2_augmentations: phase2.augmentations,
            phase2_releases: phase2.releases,
            dual_updates: phase1.dual_updates + phase2.dual_updates,
            phase1_time: t1.saturating_sub(t0),
            phase2_time: t2.saturating_sub(t1),
            violations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expand::BEdge;
    use alloc::vec;

    fn edge(left: usize, right: usize, multiplicity: u32) -> BEdge {
        BEdge {
            left,
            right,
            multiplicity,
        }
    }

    fn checked() -> SolverConfig {
        SolverConfig {
            check_invariants: true,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn frontier_without_copies_is_the_originals() {
        let g = expand(&BMatchInstance::unit_capacity(&[
            vec![1.0, 2.0],
            vec![3.0, 4.0],
        ]));
        let m = MatchingState::empty(2, 2);
        let f = build_frontier(&g, &m, Side::Left);
        assert_eq!(f.originals, vec![0, 1]);
        assert!(f.matched_copies.is_empty() && f.representatives.is_empty());
        assert_eq!(build_frontier(&g, &m, Side::Right).vertices(), vec![0, 1]);
    }

    #[test]
    fn frontier_two_copy_states() {
        let g = expand(&BMatchInstance::from_rows(
            vec![1, 1],
            vec![2],
            &[vec![1.0], vec![1.0]],
        ));
        let mut m = MatchingState::empty(2, 2);
        let f = build_frontier(&g, &m, Side::Left);
        assert_eq!(f.representatives, vec![1]);
        assert!(f.matched_copies.is_empty());
        m.link(0, 1);
        let f = build_frontier(&g, &m, Side::Left);
        assert_eq!(f.matched_copies, vec![1]);
        assert!(f.representatives.is_empty());
    }

    #[test]
    fn frontier_mixed_group() {
        let g = expand(&BMatchInstance::from_rows(vec![1], vec![3], &[vec![1.0]]));
        let mut m = MatchingState::empty(1, 3);
        m.link(0, 1);
        let f = build_frontier(&g, &m, Side::Left);
        assert_eq!(f.originals, vec![0]);
        assert_eq!(f.matched_copies, vec![1]);
        assert_eq!(f.representatives, vec![2]);
        assert_eq!(f.vertices(), vec![0, 1, 2]);
    }

    #[test]
    fn left_side_frontier_for_right_roots() {
        let g = expand(&BMatchInstance::from_rows(
            vec![3, 2],
            vec![1],
            &[vec![1.0], vec![2.0]],
        ));
        let mut m = MatchingState::empty(5, 1);
        m.link(2, 0);
        let f = build_frontier(&g, &m, Side::Right);
        assert_eq!(f.originals, vec![0, 3]);
        assert_eq!(f.matched_copies, vec![2]);
        assert_eq!(f.representatives, vec![1, 4]);
    }

    #[test]
    fn modified_hungarian_noop_when_target_matched() {
        let g = expand(&BMatchInstance::unit_capacity(&[vec![5.0]]));
        let mut l = initial_labeling(&g, 1e-9);
        let mut m = MatchingState::empty(1, 1);
        m.link(0, 0);
        let mut log = RunLog::new(true);
        modified_hungarian(&g, Side::Left, &mut m, &mut l, &mut log).unwrap();
        assert_eq!(log.augmentations, 0);
        assert_eq!(log.dual_updates, 0);
    }

    #[test]
    fn modified_hungarian_single_pair() {
        let g = expand(&BMatchInstance::unit_capacity(&[vec![5.0]]));
        let mut l = initial_labeling(&g, 1e-9);
        let mut m = MatchingState::empty(1, 1);
        let mut log = RunLog::new(true);
        modified_hungarian(&g, Side::Left, &mut m, &mut l, &mut log).unwrap();
        assert_eq!(collapse(&g, &m).unwrap().total_weight, 5.0);
    }

    #[test]
    fn modified_hungarian_two_by_two() {
        let g = expand(&BMatchInstance::unit_capacity(&[
            vec![3.0, 1.0],
            vec![2.0, 4.0],
        ]));
        let mut l = initial_labeling(&g, 1e-9);
        let mut m = MatchingState::empty(2, 2);
        let mut log = RunLog::new(true);
        modified_hungarian(&g, Side::Left, &mut m, &mut l, &mut log).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(collapse(&g, &m).unwrap().total_weight, 7.0);
        assert!(log.checker.violations.is_empty());
    }

    #[test]
    fn forced_instance() {
        let inst = BMatchInstance::from_rows(vec![2], vec![1, 1], &[vec![5.0, 3.0]]);
        let (bm, report) = solve_b_matching(&inst, &checked()).unwrap();
        assert_eq!(bm.edges, vec![edge(0, 0, 1), edge(0, 1, 1)]);
        assert_eq!(bm.total_weight, 8.0);
        assert_eq!(report.phase1_augmentations, 1);
        assert_eq!(report.phase2_augmentations, 1);
        assert!(report.violations.is_empty(), "{:?}", report.violations);
    }

    #[test]
    fn unit_square_instance() {
        let inst = BMatchInstance::unit_capacity(&[vec![3.0, 1.0], vec![2.0, 4.0]]);
        let (bm, report) = solve_b_matching(&inst, &checked()).unwrap();
        assert_eq!(bm.total_weight, 7.0);
        assert_eq!(report.phase2_augmentations, 0);
    }

    #[test]
    fn stress_instance_stops_at_covering() {
        // Covering both sides gives 11; the best b-matching (6 + 1 + 5) is 12.
        let inst =
            BMatchInstance::from_rows(vec![2, 1], vec![1, 2], &[vec![6.0, 1.0], vec![2.0, 5.0]]);
        let (bm, report) = solve_b_matching(&inst, &checked()).unwrap();
        assert_eq!(bm.edges, vec![edge(0, 0, 1), edge(1, 1, 1)]);
        assert_eq!(bm.total_weight, 11.0);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn exhausted_phase_two_releases_a_copy() {
        // Both rows prefer column 0, which has room for two. Column 1 then
        // has no free left vertex to reach.
        let inst =
            BMatchInstance::from_rows(vec![1, 1], vec![2, 1], &[vec![9.0, 0.0], vec![8.0, 1.0]]);
        let (bm, report) = solve_b_matching(&inst, &checked()).unwrap();
        assert_eq!(report.phase2_releases, 1);
        assert_eq!(report.phase2_augmentations, 1);
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        assert_eq!(bm.edges, vec![edge(0, 0, 1), edge(1, 1, 1)]);
        assert_eq!(bm.total_weight, 10.0);
    }

    #[test]
    fn greedy_start_matches_empty_start_invariants() {
        let inst = BMatchInstance::from_rows(
            vec![2, 1, 3],
            vec![1, 2],
            &[vec![6.0, 1.0], vec![2.0, 5.0], vec![-3.0, 4.0]],
        );
        let cfg = SolverConfig {
            initial_matching: InitialMatching::GreedyEquality,
            ..checked()
        };
        let (bm, report) = solve_b_matching(&inst, &cfg).unwrap();
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        assert_eq!(report.phase1_augmentations, 3);
        assert!(crate::expand::verify_b_matching(&inst, &bm, 1e-9).is_pass());
    }

    #[test]
    fn observations_hold_after_initialisation() {
        let g = expand(&BMatchInstance::from_rows(
            vec![3],
            vec![2, 3],
            &[vec![4.0, 1.0]],
        ));
        let l = initial_labeling(&g, 1e-9);
        let m = MatchingState::empty(g.p(), g.q());
        assert!(check_observations(&g, &m, &l, 1e-9).is_empty());
        assert!(l.right.iter().all(|&v| v == 0.0));
        assert!(l.left.iter().all(|&v| v == 4.0));
    }

    #[test]
    fn observations_flag_unequal_copy_labels() {
        let g = expand(&BMatchInstance::from_rows(vec![1], vec![3], &[vec![4.0]]));
        let mut l = initial_labeling(&g, 1e-9);
        l.right[2] = 1.0;
        let m = MatchingState::empty(g.p(), g.q());
        let v = check_observations(&g, &m, &l, 1e-9);
        assert_eq!(
            v,
            vec![InvariantViolation::UnequalCopyLabels {
                side: Side::Right,
                group: 0,
                a: 1,
                b: 2
            }]
        );
    }

    #[test]
    fn invalid_instance_is_rejected() {
        let inst = BMatchInstance::from_rows(vec![1, 1], vec![1], &[vec![1.0], vec![1.0]]);
        assert!(matches!(
            solve_b_matching(&inst, &SolverConfig::default()),
            Err(SolveError::InvalidInstance(_))
        ));
    }
}
