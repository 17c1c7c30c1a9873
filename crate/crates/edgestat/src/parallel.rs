//! Worker pool and parallel versions of the core drivers. Every merge is
//! order-independent or index-ordered, so results do not depend on the
//! number of workers.

use edgestat_core::gm::{branches, enumerate_branch, GmFamily};
use edgestat_core::rational::to_f64;
use edgestat_core::dist::WeightProfile;
use edgestat_core::verify::{optimize_from_scan, OptimizeResult, ProfileTable};
use edgestat_core::{Caps, Rational, Result};
use rayon::prelude::*;

pub const WORKERS_ENV: &str = "EDGESTAT_WORKERS";

/// Explicit count, else `EDGESTAT_WORKERS`, else one per core.
pub fn worker_count(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var(WORKERS_ENV).ok()?.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
}

pub fn enumerate_gm(m: u32) -> Result<GmFamily> {
    let parts = branches(m)?
        .into_par_iter()
        .map(enumerate_branch)
        .collect::<Result<Vec<_>>>()?;
    Ok(GmFamily::from_parts(m, parts))
}

pub fn profile_table(family: &GmFamily, caps: &Caps) -> Result<ProfileTable> {
    let members: Vec<_> = family.members().collect();
    let entries = members
        .par_iter()
        .map(|(key, g)| Ok((**key, WeightProfile::of(g.poly(), caps)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ProfileTable::from_entries(family.m(), entries))
}

pub fn optimize_p(table: &ProfileTable, grid: &[Rational], ell_min: i64) -> Result<OptimizeResult> {
    let scan: Vec<f64> = grid
        .par_iter()
        .map(|p| table.bound_f64(to_f64(p), ell_min))
        .collect();
    optimize_from_scan(table, grid, &scan, ell_min)
}
