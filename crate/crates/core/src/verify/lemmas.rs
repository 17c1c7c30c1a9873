use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::dist::{binmax, point_probability, transcendental_slack};
use crate::error::{Error, Result};
use crate::poly::MultilinearPoly;
use crate::rational::{binomial, check_probability, poisson_mode_constant, pow, to_integers, Rational, EXP_DIGITS};
use crate::Caps;

fn check_antichain(n: usize, sets: &[u64]) -> Result<()> {
    if n > 63 {
        return Err(Error::InvalidInput(format!("ground set of size {n} is too large")));
    }
    for (i, &a) in sets.iter().enumerate() {
        if a >> n != 0 {
            return Err(Error::InvalidInput(format!("set {a:#b} is not a subset of [{n}]")));
        }
        for &b in &sets[i + 1..] {
            if a & b == a || a & b == b {
                return Err(Error::NotAntichain(format!("{a:#b} and {b:#b} are comparable")));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlymCheck {
    pub sum: Rational,
    pub ok: bool,
}

/// `Σ_{A} 1/C(N, |A|)` over an antichain of subsets of `[N]`, given as bitmasks.
pub fn blym_check(n: usize, antichain: &[u64]) -> Result<BlymCheck> {
    check_antichain(n, antichain)?;
    let sum: Rational = antichain
        .iter()
        .map(|a| Rational::new(BigInt::one(), BigInt::from(binomial(n as u64, u64::from(a.count_ones())))))
        .sum();
    let ok = sum <= Rational::one();
    Ok(BlymCheck { sum, ok })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntichainCheck {
    pub lhs: Rational,
    /// Enclosure of `max_A |A|^|A|/(e^|A| |A|!) φ(A) + p`.
    pub rhs_lower: Rational,
    pub rhs_upper: Rational,
    pub ok: bool,
}

/// `E[φ(B_p)] <= max_A |A|^|A|/(e^|A| |A|!) φ(A) + p` for `φ` supported on an antichain.
pub fn antichain_expectation_check(
    n: usize,
    phi: &[(u64, Rational)],
    p: &Rational,
) -> Result<AntichainCheck> {
    check_probability(p)?;
    if n > 20 {
        return Err(Error::Precondition(format!("ground set of size {n} exceeds 20")));
    }
    if let Some((_, v)) = phi.iter().find(|(_, v)| !crate::rational::is_probability(v)) {
        return Err(Error::InvalidInput(format!(
            "φ takes the value {} outside [0, 1]",
            crate::rational::fraction_string(v)
        )));
    }
    let support: Vec<(u64, &Rational)> =
        phi.iter().filter(|(_, v)| !v.is_zero()).map(|(a, v)| (*a, v)).collect();
    let masks: Vec<u64> = support.iter().map(|(a, _)| *a).collect();
    check_antichain(n, &masks)?;
    let q = Rational::one() - p;
    let mut lhs = Rational::zero();
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    for (a, v) in &support {
        let size = a.count_ones();
        lhs += pow(p, size) * pow(&q, n as u32 - size) * *v;
        let (c_lo, c_hi) = poisson_mode_constant(size, EXP_DIGITS);
        lo = lo.max(c_lo * *v);
        hi = hi.max(c_hi * *v);
    }
    let rhs_lower = lo + p;
    let rhs_upper = hi + p;
    let ok = lhs <= &rhs_lower + transcendental_slack();
    Ok(AntichainCheck {
        lhs,
        rhs_lower,
        rhs_upper,
        ok,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EloCheck {
    pub max_prob: Rational,
    pub bound: Rational,
    pub ok: bool,
}

/// Largest point probability of `Σ ε_i a_i` with independent uniform signs.
pub fn elo_max(coeffs: &[Rational]) -> Result<EloCheck> {
    let n = coeffs.len();
    if n > 20 {
        return Err(Error::Precondition(format!("{n} coefficients exceed 20")));
    }
    if coeffs.iter().any(Zero::is_zero) {
        return Err(Error::InvalidInput("coefficients must be nonzero".into()));
    }
    let (ints, _) = to_integers(coeffs);
    let ints: Vec<i128> = ints
        .iter()
        .map(|c| c.to_i128().filter(|v| v.unsigned_abs() < 1 << 100))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidInput("coefficients too large after scaling".into()))?;
    let mut sums: Vec<i128> = Vec::with_capacity(1 << n);
    let mut current: i128 = -ints.iter().sum::<i128>();
    let mut signs = 0u32;
    sums.push(current);
    for step in 1u32..(1 << n) {
        let j = step.trailing_zeros();
        signs ^= 1 << j;
        if signs >> j & 1 == 1 {
            current += 2 * ints[j as usize];
        } else {
            current -= 2 * ints[j as usize];
        }
        sums.push(current);
    }
    sums.sort_unstable();
    let mut best = 0usize;
    let mut run = 0usize;
    for (i, s) in sums.iter().enumerate() {
        run = if i > 0 && sums[i - 1] == *s { run + 1 } else { 1 };
        best = best.max(run);
    }
    let total = BigInt::one() << n;
    let max_prob = Rational::new(BigInt::from(best), total.clone());
    let bound = Rational::new(BigInt::from(binomial(n as u64, n as u64 / 2)), total);
    let ok = max_prob <= bound;
    Ok(EloCheck { max_prob, bound, ok })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LargeLinearCheck {
    pub prob: Rational,
    pub bound: Rational,
    pub ok: bool,
}

/// `Pr[f(ξ(p)) = ℓ] <= binmax(m, p)` for `f` with non-negative coefficients and
/// at least `m` linear terms.
pub fn large_linear_part_check(
    f: &MultilinearPoly,
    m: u32,
    p: &Rational,
    ell: i64,
    caps: &Caps,
) -> Result<LargeLinearCheck> {
    if f.num_vars() > 20 {
        return Err(Error::Precondition(format!("{} variables exceed 20", f.num_vars())));
    }
    if !f.is_nonnegative() {
        return Err(Error::Precondition("coefficients must be non-negative".into()));
    }
    if f.linear_term_count() < m as usize {
        return Err(Error::Precondition(format!(
            "{} linear terms, need at least {m}",
            f.linear_term_count()
        )));
    }
    let prob = point_probability(f, p, ell, caps)?;
    let bound = binmax(u64::from(m), p);
    let ok = prob <= bound;
    Ok(LargeLinearCheck { prob, bound, ok })
}
