use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::{
    default_grid, optimize_p, reduction_bound, Check, ProfileTable, Relation, VerificationReport,
    DEFAULT_GRID_DENOMINATOR,
};
use crate::dist::{binmax, binmaxplus, binomial_pmf, point_probability};
#[cfg(test)]
use crate::dist::binomial_mode;
use crate::error::{Error, Result};
use crate::poly::MultilinearPoly;
use crate::rational::{check_probability, fraction_string, int, rat, Rational};
use crate::Caps;

fn fixed(name: &str, value: Rational, rel: Relation, bound: Rational) -> Check {
    Check::new(name, value, rel, bound)
}

/// `max(binmax(5, 1/3), G(5) max over ℓ ≥ 2) < 0.3293`, with both parts equal.
pub fn verify_prop_033(caps: &Caps) -> Result<VerificationReport> {
    let p = rat(1, 3);
    let r = reduction_bound(5, &p, 2, caps)?;
    let threshold = rat(3293, 10000);
    let mut report = VerificationReport::new("prop033");
    report.input("m", 5).input("p", "1/3").input("ell_min", 2);
    report
        .value("binmax", r.binmax.clone())
        .value("gm_max", r.family_max.clone())
        .value("max", r.bound.clone());
    report.threshold = Some(threshold.clone());
    report.witness = r.witness;
    report
        .check(fixed("bound < 3293/10000", r.bound.clone(), Relation::Lt, threshold))
        .check(fixed("binmax == gm_max", r.binmax, Relation::Eq, r.family_max));
    Ok(report)
}

/// Analytic certificate at `p = 213/500`: no enumeration of `G(8)`.
pub fn verify_prop_027() -> VerificationReport {
    prop027_report(&rat(213, 500))
}

pub fn prop027_report(p: &Rational) -> VerificationReport {
    let threshold = rat(27, 100);
    let b = binmax(8, p);
    let expectation = p * p * int(70) + p * int(8);
    let markov = &expectation / int(60);
    let mut report = VerificationReport::new("prop027");
    report.input("m", 8).input("p", fraction_string(p));
    report
        .value("binmax", b.clone())
        .value("expectation_bound", expectation.clone())
        .value("markov", markov.clone());
    report.threshold = Some(threshold.clone());
    report
        .check(fixed("binmax(8,p) < 27/100", b, Relation::Lt, threshold.clone()))
        .check(fixed("70p^2 + 8p < 16112/1000", expectation, Relation::Lt, rat(16112, 1000)))
        .check(fixed("(70p^2 + 8p)/60 < 27/100", markov, Relation::Lt, threshold));
    report
}

/// One row of the computational table: optimal grid `p` for `m` and its bound.
pub fn table_report(table: &ProfileTable, grid: &[Rational]) -> Result<VerificationReport> {
    let opt = optimize_p(table, grid, 2)?;
    Ok(table_report_from(table, &opt, grid))
}

pub fn table_report_from(
    table: &ProfileTable,
    opt: &super::OptimizeResult,
    grid: &[Rational],
) -> VerificationReport {
    let den = grid
        .iter()
        .map(|p| p.denom().clone())
        .max()
        .unwrap_or_else(num_bigint::BigInt::one);
    let best = &opt.best;
    let mut report = VerificationReport::new("table");
    report
        .input("m", table.m())
        .input("grid_denominator", den)
        .input("ell_min", 2);
    report
        .value("count", int(table.family_size() as i64))
        .value("p_star", best.p.clone())
        .value("binmax", best.binmax.clone())
        .value("gm_max", best.family_max.clone())
        .value("max", best.bound.clone());
    report.witness = best.witness;
    report.value("gm_max - binmax", &best.family_max - &best.binmax);
    report
}

pub const BETTER34_P: (i64, i64) = (97, 250);

/// The displayed inequalities of the better-than-3/4 argument at `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Better34 {
    pub p: Rational,
    pub binmaxplus_small: [Rational; 3],
    pub combined: Rational,
    pub multipartite: Rational,
    /// Largest `Pr[Bin(s,p) ∈ {ℓ1, ℓ2}]` over nonzero values, for `s = 1, 2, 3`.
    pub two_layer_small: [Rational; 3],
    pub two_layer_tail: Rational,
    pub report: VerificationReport,
}

pub fn check_better34_inequalities(p: &Rational) -> Result<Better34> {
    check_probability(p)?;
    if p.is_zero() || p.is_one() {
        return Err(Error::ProbabilityOutOfRange("need 0 < p < 1".into()));
    }
    let one = Rational::one();
    let cut = rat(19, 40);
    let target = rat(29, 40);
    let layer_cut = rat(713, 1000);
    let mut report = VerificationReport::new("better34");
    report.input("p", fraction_string(p));

    let small = [binmaxplus(0, p), binmaxplus(1, p), binmaxplus(2, p)];
    let two_p_q = int(2) * p * (&one - p);
    report.value("2p(1-p)", two_p_q.clone());
    report.check(fixed("2p(1-p) < 19/40", two_p_q, Relation::Lt, cut.clone()));
    for (m, v) in small.iter().enumerate() {
        report.check(fixed(&format!("binmaxplus({m},p) < 19/40"), v.clone(), Relation::Lt, cut.clone()));
    }
    // binmaxplus(m) = binmax(m) <= binmax(2) for m >= 2 once the mode is positive
    report.check(fixed("1 <= 3p", one.clone(), Relation::Le, int(3) * p));
    report.check(fixed("binmax(2,p) == binmaxplus(2,p)", binmax(2, p), Relation::Eq, small[2].clone()));

    let combined = (&one - &cut) * (&one - p) + &cut * (&one - p * p);
    let multipartite = &one - (&one - &cut) * (&one - &cut);
    report.value("combined", combined.clone()).value("multipartite", multipartite.clone());
    report
        .check(fixed("combined < 29/40", combined.clone(), Relation::Lt, target.clone()))
        .check(fixed("multipartite < 29/40", multipartite.clone(), Relation::Lt, target));

    let mut two_layer_small = [Rational::zero(), Rational::zero(), Rational::zero()];
    for s in 1..=3u64 {
        let masses: Vec<Rational> = (1..=s).map(|j| binomial_pmf(s, j, p)).collect();
        let mut best = Rational::zero();
        for a in 0..masses.len() {
            best = best.clone().max(masses[a].clone());
            for b in a + 1..masses.len() {
                best = best.clone().max(&masses[a] + &masses[b]);
            }
        }
        report.check(fixed(&format!("two-layers s={s} < 713/1000"), best.clone(), Relation::Lt, layer_cut.clone()));
        two_layer_small[s as usize - 1] = best;
    }
    let tail = int(2) * binmax(4, p);
    report.value("2binmax(4,p)", tail.clone());
    report.check(fixed("2binmax(4,p) < 713/1000", tail.clone(), Relation::Lt, layer_cut));

    Ok(Better34 {
        p: p.clone(),
        binmaxplus_small: small,
        combined,
        multipartite,
        two_layer_small,
        two_layer_tail: tail,
        report,
    })
}

pub fn better34_report(p: &Rational) -> VerificationReport {
    match check_better34_inequalities(p) {
        Ok(b) => b.report,
        Err(e) => {
            let mut report = VerificationReport::new("better34");
            report.input("p", fraction_string(p)).input("error", e);
            report.passed = false;
            report
        }
    }
}

/// Exhaustive search over reduced polynomials `ℓ - ℓ Σ x_i + Σ_{ij ∈ G} x_i x_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarSearch {
    pub max_vars: usize,
    pub ells: Vec<i64>,
    pub p: Rational,
    pub max_prob: Rational,
    pub witness: MultilinearPoly,
    pub witness_ell: i64,
    pub polynomials: u64,
}

impl StarSearch {
    pub fn report(&self) -> VerificationReport {
        let mut report = VerificationReport::new("star_zero");
        let ells: Vec<String> = self.ells.iter().map(|e| format!("{e}")).collect();
        report
            .input("max_vars", self.max_vars)
            .input("ells", ells.join(","))
            .input("p", fraction_string(&self.p))
            .input("witness", &self.witness);
        report.value("max", self.max_prob.clone());
        report.threshold = Some(rat(29, 40));
        report.check(fixed("max Pr[f = 0] < 29/40", self.max_prob.clone(), Relation::Lt, rat(29, 40)));
        report
    }
}

pub fn star_zero_probability_search(
    max_vars: usize,
    ells: &[i64],
    p: &Rational,
    caps: &Caps,
) -> Result<StarSearch> {
    check_probability(p)?;
    if max_vars == 0 || max_vars > 5 {
        return Err(Error::Precondition(format!("max_vars must be in 1..=5, got {max_vars}")));
    }
    if ells.is_empty() || ells.iter().any(|&l| l == 0 || l.abs() > 4) {
        return Err(Error::Precondition("need nonzero ell values with |ell| <= 4".into()));
    }
    let mut best: Option<(Rational, MultilinearPoly, i64)> = None;
    let mut polynomials = 0u64;
    for s in 1..=max_vars {
        let pairs: Vec<(usize, usize)> = (0..s).flat_map(|i| (i + 1..s).map(move |j| (i, j))).collect();
        for &ell in ells {
            for edges in 0u64..1 << pairs.len() {
                let f = MultilinearPoly::from_terms(
                    s,
                    ell,
                    (0..s).map(|i| (i, -ell)),
                    pairs
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| edges >> k & 1 == 1)
                        .map(|(_, &(i, j))| (i, j, 1)),
                )?;
                polynomials += 1;
                let prob = point_probability(&f, p, 0, caps)?;
                if best.as_ref().is_none_or(|(b, _, _)| prob > *b) {
                    best = Some((prob, f, ell));
                }
            }
        }
    }
    let (max_prob, witness, witness_ell) = best.expect("at least one polynomial");
    Ok(StarSearch {
        max_vars,
        ells: ells.to_vec(),
        p: p.clone(),
        max_prob,
        witness,
        witness_ell,
        polynomials,
    })
}

/// Default table: every `m` in `2..=5` over the `k/300` grid.
pub fn default_table(caps: &Caps) -> Result<Vec<VerificationReport>> {
    (2..=5)
        .map(|m| table_report(&ProfileTable::for_m(m, caps)?, &default_grid(DEFAULT_GRID_DENOMINATOR)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{decimal_string, to_f64};

    #[test]
    fn prop027_values() {
        let r = verify_prop_027();
        assert!(r.passed && r.is_self_consistent());
        // 70·0.426² + 8·0.426 = 12.70332 + 3.408
        assert_eq!(r.get_value("expectation_bound").unwrap(), &rat(1611132, 100000));
        assert_eq!(decimal_string(r.get_value("expectation_bound").unwrap(), 5), "16.11132");
        let b = to_f64(r.get_value("binmax").unwrap());
        assert!((b - 0.26976).abs() < 1e-5);
        assert_eq!(binomial_mode(8, &rat(213, 500)), 3);
        assert!((to_f64(r.get_value("markov").unwrap()) - 0.26852).abs() < 1e-5);
    }

    #[test]
    fn better34_values() {
        let b = check_better34_inequalities(&rat(97, 250)).unwrap();
        assert!(b.report.passed && b.report.is_self_consistent());
        assert_eq!(b.report.get_value("2p(1-p)").unwrap(), &rat(474912, 1000000));
        assert_eq!(b.binmaxplus_small[1], rat(97, 250));
        assert!(b.binmaxplus_small[0].is_zero());
        assert_eq!(b.multipartite, rat(1159, 1600));
        // 0.525·0.612 + 0.475·(1 - 0.388²)
        assert_eq!(b.combined, rat(7247916, 10000000));
        // the mode of Bin(4, 0.388) is 1, so 2·binmax = 8p(1-p)³
        assert_eq!(b.two_layer_tail, int(8) * rat(97, 250) * rat(153, 250).pow(3));
        assert!((to_f64(&b.two_layer_tail) - 0.711_501_760_512).abs() < 1e-15);
        // s = 2: Pr[1] + Pr[2] = 1 - (1-p)²
        assert_eq!(b.two_layer_small[1], Rational::one() - rat(153, 250).pow(2));
        assert!(!better34_report(&rat(1, 2)).passed);
        assert!(check_better34_inequalities(&Rational::one()).is_err());
    }

    #[test]
    fn star_examples() {
        let caps = Caps::default();
        let p = rat(97, 250);
        let r = star_zero_probability_search(1, &[1], &p, &caps).unwrap();
        assert_eq!(r.max_prob, p);
        let r = star_zero_probability_search(2, &[1], &p, &caps).unwrap();
        assert_eq!(r.max_prob, Rational::one() - rat(153, 250).pow(2));
        assert_eq!(r.witness.quadratic_coeff(0, 1), 1);
        let r = star_zero_probability_search(5, &[1, -1, 2, -2], &p, &caps).unwrap();
        assert!(r.max_prob < rat(29, 40));
        assert_eq!(r.polynomials, 4 * (1 + 2 + 8 + 64 + 1024));
        assert!(r.report().passed);
        assert!(star_zero_probability_search(6, &[1], &p, &caps).is_err());
        assert!(star_zero_probability_search(3, &[0], &p, &caps).is_err());
        assert!(star_zero_probability_search(3, &[5], &p, &caps).is_err());
    }

    #[test]
    fn prop033_report() {
        let r = verify_prop_033(&Caps::default()).unwrap();
        assert!(r.passed && r.is_self_consistent());
        assert_eq!(r.get_value("max").unwrap(), &rat(80, 243));
        assert_eq!(r.witness.unwrap().ell, 2);
        let again = super::super::rerun(&r, &Caps::default()).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn table_rows_for_small_m() {
        let caps = Caps::default();
        let grid = default_grid(DEFAULT_GRID_DENOMINATOR);
        for (m, p, bound) in [(2, rat(2, 3), rat(4, 9)), (3, rat(1, 2), rat(3, 8)), (4, rat(2, 5), rat(216, 625))] {
            let r = table_report(&ProfileTable::for_m(m, &caps).unwrap(), &grid).unwrap();
            assert_eq!(r.get_value("p_star").unwrap(), &p, "m = {m}");
            assert_eq!(r.get_value("max").unwrap(), &bound, "m = {m}");
        }
    }
}
