//! Maximum-weight b-matching on complete weighted bipartite graphs.
//!
//! Every left vertex `i` must receive between 1 and `alpha[i]` partners and
//! every right vertex `j` between 1 and `beta[j]`. The solver expands each
//! vertex into a block of capacity-many copies with replicated weights,
//! then runs a slack-array Hungarian search twice: first until every left
//! original is matched, then (with the sides swapped) until every right
//! original is matched. Only one free copy per block is ever scanned.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and
//! the command line live in the `bmatch` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bmatch;
pub mod expand;
pub mod hungarian;
pub mod instance;
pub mod oracle;

mod float;

pub use crate::bmatch::{
    build_frontier, check_observations, modified_hungarian, solve_b_matching,
    solve_b_matching_with_clock, solve_expanded, Clock, ExpandedSolution, Frontier,
    InvariantViolation, NoClock, SolveReport,
};
pub use crate::expand::{
    collapse, expand, verify_b_matching, BEdge, BMatching, ExpandedGraph, VerifyReport, Violation,
};
pub use crate::hungarian::{
    initial_labeling, solve_assignment, Assignment, Labeling, MatchingState, SearchState, Side,
    SolveError,
};
pub use crate::instance::{
    generate_instance, validate_instance, BMatchInstance, GenerateError, InitialMatching,
    SolverConfig, ValidationError,
};
pub use crate::oracle::{
    brute_force_assignment, brute_force_b_matching, OracleError, OracleLimits,
};
