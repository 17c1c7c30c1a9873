use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::Witness;
use crate::dist::{binmax, weighted_sum_f64, BernoulliPowers, WeightProfile};
use crate::error::{Error, Result};
use crate::gm::{enumerate_gm, GmFamily};
use crate::poly::CanonicalKey;
use crate::rational::{rat, to_f64, Rational};
use crate::Caps;

/// Weight profiles of every class of a family, in key order.
#[derive(Clone, Debug)]
pub struct ProfileTable {
    m: u32,
    family_size: usize,
    entries: Vec<(CanonicalKey, WeightProfile)>,
}

impl ProfileTable {
    pub fn new(family: &GmFamily, caps: &Caps) -> Result<Self> {
        let entries = family
            .members()
            .map(|(key, g)| Ok((*key, WeightProfile::of(g.poly(), caps)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_entries(family.m(), entries))
    }

    /// Builds a table from profiles computed elsewhere; entries are re-sorted by key.
    pub fn from_entries(m: u32, mut entries: Vec<(CanonicalKey, WeightProfile)>) -> Self {
        entries.sort_by_key(|a| a.0);
        entries.dedup_by(|a, b| a.0 == b.0);
        ProfileTable {
            m,
            family_size: entries.len(),
            entries,
        }
    }

    pub fn for_m(m: u32, caps: &Caps) -> Result<Self> {
        Self::new(&enumerate_gm(m)?, caps)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn family_size(&self) -> usize {
        self.family_size
    }

    pub fn entries(&self) -> &[(CanonicalKey, WeightProfile)] {
        &self.entries
    }

    /// Floating-point version of the reduction bound, for scanning.
    pub fn bound_f64(&self, p: f64, ell_min: i64) -> f64 {
        let mut best = binmax_f64(self.m, p);
        for (_, profile) in &self.entries {
            for v in profile.values().filter(|&v| v >= ell_min) {
                let counts = profile.weight_counts(v).expect("listed value");
                best = best.max(weighted_sum_f64(counts, p, profile.num_vars()));
            }
        }
        best
    }
}

fn binmax_f64(m: u32, p: f64) -> f64 {
    let m = m as usize;
    let mut best: f64 = 0.0;
    let mut c = 1.0;
    for j in 0..=m {
        if j > 0 {
            c = c * (m + 1 - j) as f64 / j as f64;
        }
        let mut counts = alloc::vec![0u64; m + 1];
        counts[j] = 1;
        best = best.max(c * weighted_sum_f64(&counts, p, m));
    }
    best
}

/// `max(binmax(m, p), max_{g ∈ G(m), ℓ ≥ ℓ_min} Pr[g(ξ(p)) = ℓ])` with its parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionBound {
    pub m: u32,
    pub p: Rational,
    pub ell_min: i64,
    pub bound: Rational,
    pub binmax: Rational,
    pub family_max: Rational,
    /// Smallest key, then smallest value, attaining `family_max`.
    pub witness: Option<Witness>,
}

fn check_inputs(p: &Rational, ell_min: i64) -> Result<()> {
    if !p.is_positive() || *p >= Rational::one() {
        return Err(Error::ProbabilityOutOfRange(format!(
            "reduction bound needs 0 < p < 1, got {}",
            crate::rational::fraction_string(p)
        )));
    }
    if ell_min < 1 {
        return Err(Error::Precondition(format!("need ell_min >= 1, got {ell_min}")));
    }
    Ok(())
}

pub fn reduction_bound_with(table: &ProfileTable, p: &Rational, ell_min: i64) -> Result<ReductionBound> {
    check_inputs(p, ell_min)?;
    let top = table.entries.iter().map(|(_, f)| f.num_vars()).max().unwrap_or(0);
    let powers = BernoulliPowers::new(p, top);
    let mut best: Option<(BigInt, Witness)> = None;
    for (key, profile) in &table.entries {
        let scale = powers.denominator(top - profile.num_vars());
        for ell in profile.values().filter(|&v| v >= ell_min) {
            let counts = profile.weight_counts(ell).expect("listed value");
            let scaled = powers.numerator(counts) * &scale;
            if best.as_ref().is_none_or(|(b, _)| scaled > *b) {
                best = Some((scaled, Witness { key: *key, ell }));
            }
        }
    }
    let (family_max, witness) = match best {
        Some((num, w)) => (Rational::new(num, powers.denominator(top)), Some(w)),
        None => (Rational::zero(), None),
    };
    let binmax = binmax(u64::from(table.m), p);
    Ok(ReductionBound {
        m: table.m,
        p: p.clone(),
        ell_min,
        bound: binmax.clone().max(family_max.clone()),
        binmax,
        family_max,
        witness,
    })
}

/// `max(binmax(m, p), max_{g ∈ G(m)} Pr[g(ξ(p)) = ℓ])` for a single `ℓ`.
pub fn reduction_bound_at(table: &ProfileTable, p: &Rational, ell: i64) -> Result<Rational> {
    check_inputs(p, ell)?;
    let mut best = binmax(u64::from(table.m), p);
    for (_, profile) in &table.entries {
        best = best.max(profile.probability(ell, p));
    }
    Ok(best)
}

/// `reduction_bound_at` for every `ℓ` in `1..=max_ell`, sharing one set of powers.
pub fn reduction_bounds_upto(table: &ProfileTable, p: &Rational, max_ell: i64) -> Result<Vec<Rational>> {
    check_inputs(p, 1)?;
    let top = table.entries.iter().map(|(_, f)| f.num_vars()).max().unwrap_or(0);
    let powers = BernoulliPowers::new(p, top);
    let len = max_ell.max(0) as usize;
    let mut best = alloc::vec![BigInt::zero(); len];
    for (_, profile) in &table.entries {
        let scale = powers.denominator(top - profile.num_vars());
        for ell in profile.values().filter(|&v| v >= 1 && v <= max_ell) {
            let counts = profile.weight_counts(ell).expect("listed value");
            let scaled = powers.numerator(counts) * &scale;
            let slot = &mut best[ell as usize - 1];
            if scaled > *slot {
                *slot = scaled;
            }
        }
    }
    let binmax = binmax(u64::from(table.m), p);
    let den = powers.denominator(top);
    Ok(best
        .into_iter()
        .map(|num| binmax.clone().max(Rational::new(num, den.clone())))
        .collect())
}

/// Enumerates `G(m)` and evaluates the bound at `p`.
pub fn reduction_bound(m: u32, p: &Rational, ell_min: i64, caps: &Caps) -> Result<ReductionBound> {
    check_inputs(p, ell_min)?;
    reduction_bound_with(&ProfileTable::for_m(m, caps)?, p, ell_min)
}

/// Denominator of the default grid `{k/300 : 0 < k < 300}`.
pub const DEFAULT_GRID_DENOMINATOR: u32 = 300;

/// `{k/den : 0 < k < den}` in increasing order.
pub fn default_grid(den: u32) -> Vec<Rational> {
    (1..den).map(|k| rat(k.into(), den.into())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimizeResult {
    pub best: ReductionBound,
    /// Grid points whose floating-point bound was within tolerance of the minimum.
    pub confirmed: usize,
    pub scanned: usize,
}

/// Tolerance used to decide which scan results are re-evaluated exactly.
const SCAN_TOLERANCE: f64 = 1e-9;

/// Minimises the reduction bound over `grid`: floating-point scan, then exact
/// evaluation of every near-minimal point. Ties go to the larger `p`.
pub fn optimize_p(table: &ProfileTable, grid: &[Rational], ell_min: i64) -> Result<OptimizeResult> {
    let scan: Vec<f64> = grid.iter().map(|p| table.bound_f64(to_f64(p), ell_min)).collect();
    optimize_from_scan(table, grid, &scan, ell_min)
}

/// Exact confirmation step of `optimize_p`, given precomputed scan values.
pub fn optimize_from_scan(
    table: &ProfileTable,
    grid: &[Rational],
    scan: &[f64],
    ell_min: i64,
) -> Result<OptimizeResult> {
    if grid.is_empty() || grid.len() != scan.len() {
        return Err(Error::InvalidInput("grid must be non-empty and match the scan".into()));
    }
    let min = scan.iter().copied().fold(f64::INFINITY, f64::min);
    let mut near: Vec<&Rational> = grid
        .iter()
        .zip(scan)
        .filter(|(_, &v)| v <= min + SCAN_TOLERANCE)
        .map(|(p, _)| p)
        .collect();
    near.sort();
    let mut best: Option<ReductionBound> = None;
    for p in &near {
        let exact = reduction_bound_with(table, p, ell_min)?;
        if best.as_ref().is_none_or(|b| exact.bound <= b.bound) {
            best = Some(exact);
        }
    }
    Ok(OptimizeResult {
        best: best.expect("grid is non-empty"),
        confirmed: near.len(),
        scanned: grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::point_probability;
    use crate::gm::enumerate_gm;
    use crate::poly::{canonical_key, GPolynomial};

    #[test]
    fn spec_examples() {
        let caps = Caps::default();
        assert_eq!(reduction_bound(2, &rat(2, 3), 2, &caps).unwrap().bound, rat(4, 9));
        assert_eq!(reduction_bound(3, &rat(1, 2), 2, &caps).unwrap().bound, rat(3, 8));
        assert_eq!(reduction_bound(4, &rat(2, 5), 2, &caps).unwrap().bound, rat(216, 625));
        assert!(reduction_bound(9, &rat(1, 2), 2, &caps).is_err());
        assert!(reduction_bound(3, &rat(0, 1), 2, &caps).is_err());
        assert!(reduction_bound(3, &rat(1, 2), 0, &caps).is_err());
    }

    #[test]
    fn prop033_witness() {
        let caps = Caps::default();
        let r = reduction_bound(5, &rat(1, 3), 2, &caps).unwrap();
        assert_eq!(r.bound, rat(80, 243));
        assert_eq!(r.binmax, r.family_max);
        let star = GPolynomial::new(5, &[1, 2, 3, 4], &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(w.ell, 2);
        assert_eq!(w.key, canonical_key(&star).unwrap());
    }

    #[test]
    fn family_max_agrees_with_direct_evaluation() {
        let caps = Caps::default();
        let family = enumerate_gm(4).unwrap();
        let table = ProfileTable::new(&family, &caps).unwrap();
        for p in [rat(1, 3), rat(2, 5), rat(7, 10)] {
            let r = reduction_bound_with(&table, &p, 2).unwrap();
            let mut direct = Rational::zero();
            for (_, g) in family.members() {
                for ell in 2..=12 {
                    direct = direct.max(point_probability(g.poly(), &p, ell, &caps).unwrap());
                }
            }
            assert_eq!(r.family_max, direct);
            let w = r.witness.unwrap();
            let g = family.get(&w.key).unwrap();
            assert_eq!(point_probability(g.poly(), &p, w.ell, &caps).unwrap(), r.family_max);
            assert!((table.bound_f64(to_f64(&p), 2) - to_f64(&r.bound)).abs() < 1e-12);
        }
    }

    #[test]
    fn optimum_on_small_grids() {
        let caps = Caps::default();
        let table = ProfileTable::for_m(2, &caps).unwrap();
        let r = optimize_p(&table, &default_grid(DEFAULT_GRID_DENOMINATOR), 2).unwrap();
        assert_eq!(r.best.p, rat(2, 3));
        assert_eq!(r.best.bound, rat(4, 9));
        let r = optimize_p(&table, &[rat(1, 2), rat(2, 3)], 2).unwrap();
        assert_eq!(r.best.p, rat(2, 3));
        assert!(optimize_p(&table, &[], 2).is_err());
    }

    #[test]
    fn single_value_bound_is_below_the_tail_bound() {
        let table = ProfileTable::for_m(3, &Caps::default()).unwrap();
        let p = rat(1, 2);
        let tail = reduction_bound_with(&table, &p, 1).unwrap().bound;
        for ell in 1..6 {
            assert!(reduction_bound_at(&table, &p, ell).unwrap() <= tail);
        }
        assert_eq!(reduction_bound_at(&table, &p, 40).unwrap(), binmax(3, &p));
        let all = reduction_bounds_upto(&table, &p, 8).unwrap();
        for (i, b) in all.iter().enumerate() {
            assert_eq!(*b, reduction_bound_at(&table, &p, i as i64 + 1).unwrap());
        }
    }

    #[test]
    fn ties_prefer_larger_p() {
        let caps = Caps::default();
        let table = ProfileTable::for_m(2, &caps).unwrap();
        // binmax(2, p) = 4/9 at both points; the family part is 1/9 at p = 1/3
        let low = reduction_bound_with(&table, &rat(1, 3), 2).unwrap();
        assert_eq!(low.bound, rat(4, 9));
        assert_eq!(low.family_max, rat(1, 9));
        let r = optimize_p(&table, &[rat(2, 3), rat(1, 3), rat(1, 3)], 2).unwrap();
        assert_eq!(r.best.p, rat(2, 3));
        assert_eq!(r.confirmed, 3);
    }
}
