//! File formats, the solver-versus-oracle harness, scaling benchmarks and
//! the command line for [`bmatch_core`].

pub mod bench;
pub mod cli;
pub mod compare;
pub mod io;

pub use bmatch_core as core;
