//! Seeded random property suites for the lemma oracles and the finite reduction.
//! Instance `i` draws from its own ChaCha stream, so the outcome is the same
//! for any number of workers.

use edgestat_core::dist::{poisson_tv_check, product_slice_tv, SliceSpec, WeightProfile};
use edgestat_core::gm::GmFamily;
use edgestat_core::rational::{fraction_string, int, rat};
use edgestat_core::verify::{
    antichain_expectation_check, blym_check, elo_max, large_linear_part_check, reduction_bound_with,
    reduction_bounds_upto, Check, Relation, VerificationReport,
};
use edgestat_core::{Caps, GPolynomial, MultilinearPoly, Rational, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const DEFAULT_SEED: u64 = 0x0ed6_e57a_7000_2026;
pub const DEFAULT_CASES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub seed: u64,
    pub cases: usize,
    pub failed: usize,
    /// Descriptions of the first few failures.
    pub examples: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    pub fn report(&self) -> VerificationReport {
        let mut r = VerificationReport::new(&format!("suite:{}", self.name));
        r.input("seed", self.seed).input("cases", self.cases);
        for (i, e) in self.examples.iter().enumerate() {
            r.input(&format!("failure{i}"), e);
        }
        r.value("cases", int(self.cases as i64)).value("failed", int(self.failed as i64));
        r.check(Check::new("failures == 0", int(self.failed as i64), Relation::Eq, int(0)));
        r
    }
}

fn rng_for(seed: u64, case: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64);
    rng
}

/// Runs `check` on every case in parallel; `Ok(None)` is a pass, `Ok(Some(msg))` a failure.
fn run(
    name: &'static str,
    seed: u64,
    cases: usize,
    check: impl Fn(&mut ChaCha8Rng) -> Result<Option<String>> + Sync,
) -> Result<SuiteOutcome> {
    let results = (0..cases)
        .into_par_iter()
        .map(|i| check(&mut rng_for(seed, i)).map(|r| r.map(|msg| format!("case {i}: {msg}"))))
        .collect::<Result<Vec<_>>>()?;
    let failures: Vec<String> = results.into_iter().flatten().collect();
    Ok(SuiteOutcome {
        name,
        seed,
        cases,
        failed: failures.len(),
        examples: failures.into_iter().take(5).collect(),
    })
}

/// Rejection-sampled antichain of subsets of `[n]`.
fn random_antichain(rng: &mut ChaCha8Rng, n: usize) -> Vec<u64> {
    let attempts = rng.gen_range(0..=24);
    let mut sets: Vec<u64> = Vec::new();
    for _ in 0..attempts {
        let a = rng.gen_range(0..1u64 << n);
        if sets.iter().all(|&b| a & b != a && a & b != b) {
            sets.push(a);
        }
    }
    sets
}

pub fn blym_suite(seed: u64, cases: usize) -> Result<SuiteOutcome> {
    run("blym", seed, cases, |rng| {
        let n = rng.gen_range(1..=12);
        let sets = random_antichain(rng, n);
        let r = blym_check(n, &sets)?;
        Ok((!r.ok).then(|| format!("N = {n}, sum = {}", fraction_string(&r.sum))))
    })
}

pub fn antichain_expectation_suite(seed: u64, cases: usize) -> Result<SuiteOutcome> {
    run("antichain_expectation", seed, cases, |rng| {
        let n = rng.gen_range(1..=12);
        let phi: Vec<(u64, Rational)> = random_antichain(rng, n)
            .into_iter()
            .map(|a| (a, rat(rng.gen_range(0..=20), 20)))
            .collect();
        let p = rat(rng.gen_range(0..=50), 50);
        let r = antichain_expectation_check(n, &phi, &p)?;
        Ok((!r.ok).then(|| format!("N = {n}, p = {}, lhs = {}", fraction_string(&p), fraction_string(&r.lhs))))
    })
}

pub fn elo_suite(seed: u64, cases: usize) -> Result<SuiteOutcome> {
    run("elo", seed, cases, |rng| {
        let n = rng.gen_range(1..=12);
        let coeffs: Vec<Rational> = (0..n)
            .map(|_| {
                let num = rng.gen_range(1..=20) * if rng.gen_bool(0.5) { 1 } else { -1 };
                rat(num, rng.gen_range(1..=10))
            })
            .collect();
        let r = elo_max(&coeffs)?;
        Ok((!r.ok).then(|| format!("n = {n}, max = {}", fraction_string(&r.max_prob))))
    })
}

/// Every `1 <= N <= 50` against every `p = j/50`, `1 <= j <= 25`.
pub fn poisson_suite() -> Result<SuiteOutcome> {
    let grid: Vec<(u64, i64)> = (1..=50u64).flat_map(|n| (1..=25).map(move |j| (n, j))).collect();
    let failures = grid
        .par_iter()
        .map(|&(n, j)| {
            let r = poisson_tv_check(n, &rat(j, 50))?;
            Ok((!r.ok).then(|| format!("N = {n}, p = {j}/50, deviation <= {}", fraction_string(&r.max_deviation))))
        })
        .collect::<Result<Vec<_>>>()?;
    let failures: Vec<String> = failures.into_iter().flatten().collect();
    Ok(SuiteOutcome {
        name: "poisson",
        seed: 0,
        cases: grid.len(),
        failed: failures.len(),
        examples: failures.into_iter().take(5).collect(),
    })
}

fn random_poly(rng: &mut ChaCha8Rng, vars: usize, lo: i64, hi: i64) -> MultilinearPoly {
    let mut f = MultilinearPoly::zero(vars);
    f.add_constant(rng.gen_range(lo..=hi));
    for i in 0..vars {
        f.add_linear(i, rng.gen_range(lo..=hi)).expect("in range");
        for j in i + 1..vars {
            if rng.gen_bool(0.4) {
                f.add_quadratic(i, j, rng.gen_range(lo..=hi)).expect("in range");
            }
        }
    }
    f
}

pub fn product_slice_suite(seed: u64, cases: usize, caps: &Caps) -> Result<SuiteOutcome> {
    run("product_slice", seed, cases, |rng| {
        let n = rng.gen_range(2..=16);
        let k = rng.gen_range(1..=n / 2);
        let s = rng.gen_range(0..=n.min(6));
        let f = random_poly(rng, s, -2, 2).with_num_vars(n)?;
        let r = product_slice_tv(&f, s, SliceSpec::new(n, k)?, caps)?;
        let sharp = r.tv <= r.sharp_bound;
        Ok((!r.ok || !sharp).then(|| format!("n = {n}, k = {k}, s = {s}, tv = {}", fraction_string(&r.tv))))
    })
}

pub fn large_linear_suite(seed: u64, cases: usize, caps: &Caps) -> Result<SuiteOutcome> {
    run("large_linear", seed, cases, |rng| {
        let n = rng.gen_range(1..=10);
        let mut f = random_poly(rng, n, 0, 3);
        if f.linear_term_count() == 0 {
            f.add_linear(0, 1)?;
        }
        let m = rng.gen_range(1..=f.linear_term_count()) as u32;
        let p = rat(rng.gen_range(0..=20), 20);
        let ell = if rng.gen_bool(0.9) {
            let bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            f.evaluate(&bits)?
        } else {
            rng.gen_range(0..=f.constant() + 3 * (n as i64) * (n as i64))
        };
        let r = large_linear_part_check(&f, m, &p, ell, caps)?;
        Ok((!r.ok).then(|| format!("{f}, m = {m}, ell = {ell}, prob = {}", fraction_string(&r.prob))))
    })
}

fn random_g(rng: &mut ChaCha8Rng) -> GPolynomial {
    let n = rng.gen_range(1..=8);
    let mut f = MultilinearPoly::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.35) {
                f.add_quadratic(i, j, 1).expect("in range");
            }
        }
    }
    for i in 0..n {
        if rng.gen_bool(0.5) || !f.uses_var(i) {
            f.add_linear(i, 1).expect("in range");
        }
    }
    GPolynomial::from_poly(f).expect("every variable used")
}

/// Spot checks of the finite reduction on random members of the 0/1 family
/// with at most eight variables, for `m` in `2..=5` and `p` in `{1/3, 1/2}`.
pub fn reduction_suite(families: &[GmFamily], seed: u64, cases: usize, caps: &Caps) -> Result<SuiteOutcome> {
    const MAX_ELL: i64 = 8 + 28;
    let mut bounds = Vec::new();
    for family in families {
        let table = crate::parallel::profile_table(family, caps)?;
        for p in [rat(1, 3), rat(1, 2)] {
            let per_value = reduction_bounds_upto(&table, &p, MAX_ELL)?;
            let tail = reduction_bound_with(&table, &p, 1)?.bound;
            bounds.push((family.m(), p, per_value, tail));
        }
    }
    run("reduction", seed, cases, |rng| {
        let g = random_g(rng);
        let profile = WeightProfile::of(g.poly(), caps)?;
        let values: Vec<i64> = profile.values().filter(|&v| v >= 1).collect();
        let ell = if values.is_empty() || rng.gen_bool(0.1) {
            rng.gen_range(1..=MAX_ELL)
        } else {
            values[rng.gen_range(0..values.len())]
        };
        for (m, p, per_value, tail) in &bounds {
            let prob = profile.probability(ell, p);
            let at = &per_value[ell as usize - 1];
            if prob > *at || prob > *tail {
                return Ok(Some(format!(
                    "{} at ell = {ell}, m = {m}, p = {}: {} exceeds the bound",
                    g.poly(),
                    fraction_string(p),
                    fraction_string(&prob)
                )));
            }
        }
        Ok(None)
    })
}

/// All property suites with the default seed and sizes.
pub fn all_suites(families: &[GmFamily], caps: &Caps) -> Result<Vec<SuiteOutcome>> {
    Ok(vec![
        blym_suite(DEFAULT_SEED, DEFAULT_CASES)?,
        antichain_expectation_suite(DEFAULT_SEED, DEFAULT_CASES)?,
        elo_suite(DEFAULT_SEED, DEFAULT_CASES)?,
        poisson_suite()?,
        product_slice_suite(DEFAULT_SEED, DEFAULT_CASES, caps)?,
        large_linear_suite(DEFAULT_SEED, DEFAULT_CASES, caps)?,
        reduction_suite(families, DEFAULT_SEED, DEFAULT_CASES, caps)?,
    ])
}

/// Re-runs a suite named in a report.
pub fn rerun_suite(report: &VerificationReport, families: impl FnOnce() -> Result<Vec<GmFamily>>, caps: &Caps) -> Result<SuiteOutcome> {
    let int_input = |k: &str| -> Result<u64> {
        report
            .get_input(k)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| edgestat_core::Error::Parse(format!("report lacks integer input {k}")))
    };
    let name = report.name.strip_prefix("suite:").unwrap_or(&report.name);
    let seed = int_input("seed")?;
    let cases = int_input("cases")? as usize;
    match name {
        "blym" => blym_suite(seed, cases),
        "antichain_expectation" => antichain_expectation_suite(seed, cases),
        "elo" => elo_suite(seed, cases),
        "poisson" => poisson_suite(),
        "product_slice" => product_slice_suite(seed, cases, caps),
        "large_linear" => large_linear_suite(seed, cases, caps),
        "reduction" => reduction_suite(&families()?, seed, cases, caps),
        other => Err(edgestat_core::Error::InvalidInput(format!("no suite named {other:?}"))),
    }
}
