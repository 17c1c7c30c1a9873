//! File formats, worker pools, property suites and the `edgestat` command line
//! on top of `edgestat-core`.

pub mod cli;
pub mod format;
pub mod parallel;
pub mod reproduce;
pub mod suites;

pub use edgestat_core as core;
