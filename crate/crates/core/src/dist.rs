//! Exact value distributions of polynomials under the product-Bernoulli and
//! uniform-slice models, binomial and Poisson kernels, and total variation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{Compiled, MultilinearPoly};
use crate::rational::{self, binomial, check_probability, int, Rational, EXP_DIGITS};
use crate::Caps;

/// An exact law on finitely many integers. Masses are positive and sum to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueDist {
    masses: BTreeMap<i64, Rational>,
}

impl ValueDist {
    pub fn point(value: i64) -> Self {
        ValueDist {
            masses: BTreeMap::from([(value, Rational::one())]),
        }
    }

    /// Merges repeated values and drops zero masses; the total must be exactly one.
    pub fn from_masses(masses: impl IntoIterator<Item = (i64, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<i64, Rational> = BTreeMap::new();
        for (v, mass) in masses {
            if mass.is_negative() {
                return Err(Error::InvalidInput(format!("negative mass at value {v}")));
            }
            *merged.entry(v).or_insert_with(Rational::zero) += mass;
        }
        merged.retain(|_, m| !m.is_zero());
        let total: Rational = merged.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidInput(format!(
                "masses sum to {}, not 1",
                rational::fraction_string(&total)
            )));
        }
        Ok(ValueDist { masses: merged })
    }

    fn from_counts(counts: impl IntoIterator<Item = (i64, u64)>, total: u64) -> Self {
        let total = BigInt::from(total);
        let masses = counts
            .into_iter()
            .filter(|&(_, c)| c > 0)
            .map(|(v, c)| (v, Rational::new(BigInt::from(c), total.clone())))
            .collect();
        ValueDist { masses }
    }

    /// Mass at `value`; zero off the support.
    pub fn prob(&self, value: i64) -> Rational {
        self.masses.get(&value).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn masses(&self) -> &BTreeMap<i64, Rational> {
        &self.masses
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.masses.iter().map(|(&v, m)| (v, m))
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Largest mass and the smallest value carrying it.
    pub fn max_mass(&self) -> (i64, Rational) {
        let mut best: Option<(i64, &Rational)> = None;
        for (v, m) in self.iter() {
            if best.is_none_or(|(_, b)| m > b) {
                best = Some((v, m));
            }
        }
        let (v, m) = best.expect("distributions are never empty");
        (v, m.clone())
    }

    /// `sup_S |P(S) - Q(S)|`, i.e. half the L1 distance.
    pub fn total_variation(&self, other: &ValueDist) -> Rational {
        let mut l1 = Rational::zero();
        for (v, m) in self.iter() {
            l1 += (m - other.prob(v)).abs();
        }
        for (v, m) in other.iter() {
            if !self.masses.contains_key(&v) {
                l1 += m;
            }
        }
        l1 / int(2)
    }

    pub fn total(&self) -> Rational {
        self.masses.values().sum()
    }
}

/// A slice `{x ∈ {0,1}^n : |x| = k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SliceSpec {
    n: usize,
    k: usize,
}

impl SliceSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidInput(format!("slice needs k <= n, got n = {n}, k = {k}")));
        }
        Ok(SliceSpec { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Counts of assignments by value and Hamming weight.
///
/// `Pr[f(ξ(p)) = v] = Σ_w counts[v][w] p^w (1-p)^(n-w)`, so one profile
/// answers every `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightProfile {
    num_vars: usize,
    counts: BTreeMap<i64, Vec<u64>>,
}

impl WeightProfile {
    pub fn of(poly: &MultilinearPoly, caps: &Caps) -> Result<Self> {
        caps.check_assignments(poly.num_vars())?;
        let n = poly.num_vars();
        let mut tally = Tally::for_poly(poly, n + 1);
        Compiled::new(poly).for_each_assignment(|_, w, v| tally.add(v, w as usize));
        Ok(WeightProfile {
            num_vars: n,
            counts: tally.into_map(),
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Achievable values in increasing order.
    pub fn values(&self) -> impl Iterator<Item = i64> + '_ {
        self.counts.keys().copied()
    }

    pub fn weight_counts(&self, value: i64) -> Option<&[u64]> {
        self.counts.get(&value).map(Vec::as_slice)
    }

    /// Exact `Pr[f(ξ(p)) = value]`.
    pub fn probability(&self, value: i64, p: &Rational) -> Rational {
        let powers = BernoulliPowers::new(p, self.num_vars);
        match self.counts.get(&value) {
            Some(c) => Rational::new(powers.numerator(c), powers.denominator(self.num_vars)),
            None => Rational::zero(),
        }
    }

    pub fn probability_f64(&self, value: i64, p: f64) -> f64 {
        self.counts
            .get(&value)
            .map_or(0.0, |c| weighted_sum_f64(c, p, self.num_vars))
    }

    pub fn to_dist(&self, p: &Rational) -> ValueDist {
        let powers = BernoulliPowers::new(p, self.num_vars);
        let den = powers.denominator(self.num_vars);
        let masses = self
            .counts
            .iter()
            .map(|(&v, c)| (v, Rational::new(powers.numerator(c), den.clone())))
            .filter(|(_, m)| !m.is_zero())
            .collect();
        ValueDist { masses }
    }
}

pub(crate) fn weighted_sum_f64(counts: &[u64], p: f64, n: usize) -> f64 {
    let q = 1.0 - p;
    let mut total = 0.0;
    for (w, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        total += c as f64 * powi(p, w) * powi(q, n - w);
    }
    total
}

fn powi(x: f64, e: usize) -> f64 {
    (0..e).fold(1.0, |acc, _| acc * x)
}

/// Integer powers of the numerator `a`, of `b - a` and of `b` for `p = a/b`.
pub(crate) struct BernoulliPowers {
    up: Vec<BigInt>,
    down: Vec<BigInt>,
    den: Vec<BigInt>,
}

impl BernoulliPowers {
    pub(crate) fn new(p: &Rational, n: usize) -> Self {
        let a = p.numer().clone();
        let b = p.denom().clone();
        let c = &b - &a;
        let powers = |x: &BigInt| {
            let mut out = Vec::with_capacity(n + 1);
            let mut acc = BigInt::one();
            for _ in 0..=n {
                out.push(acc.clone());
                acc *= x;
            }
            out
        };
        BernoulliPowers {
            up: powers(&a),
            down: powers(&c),
            den: powers(&b),
        }
    }

    /// `Σ_w counts[w] a^w (b-a)^(n-w)` with `n = counts.len() - 1`.
    pub(crate) fn numerator(&self, counts: &[u64]) -> BigInt {
        let n = counts.len() - 1;
        counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(w, &c)| BigInt::from(c) * &self.up[w] * &self.down[n - w])
            .sum()
    }

    pub(crate) fn denominator(&self, n: usize) -> BigInt {
        self.den[n].clone()
    }
}

/// Counts indexed by (value, slot); dense when the value range is small.
struct Tally {
    lo: i64,
    width: usize,
    dense: Option<Vec<u64>>,
    sparse: BTreeMap<i64, Vec<u64>>,
}

impl Tally {
    const DENSE_LIMIT: u64 = 1 << 22;

    fn for_poly(poly: &MultilinearPoly, width: usize) -> Self {
        let (mut lo, mut hi) = (poly.constant(), poly.constant());
        for &c in poly.linear().values().chain(poly.quadratic().values()) {
            if c < 0 {
                lo += c;
            } else {
                hi += c;
            }
        }
        let range = (hi - lo) as u64 + 1;
        let dense = (range.saturating_mul(width as u64) <= Self::DENSE_LIMIT)
            .then(|| vec![0u64; range as usize * width]);
        Tally {
            lo,
            width,
            dense,
            sparse: BTreeMap::new(),
        }
    }

    fn add(&mut self, value: i64, slot: usize) {
        match &mut self.dense {
            Some(d) => d[(value - self.lo) as usize * self.width + slot] += 1,
            None => {
                self.sparse
                    .entry(value)
                    .or_insert_with(|| vec![0; self.width])[slot] += 1
            }
        }
    }

    fn into_map(self) -> BTreeMap<i64, Vec<u64>> {
        match self.dense {
            Some(d) => d
                .chunks(self.width)
                .enumerate()
                .filter(|(_, row)| row.iter().any(|&c| c > 0))
                .map(|(i, row)| (self.lo + i as i64, row.to_vec()))
                .collect(),
            None => self.sparse,
        }
    }
}

/// Exact law of `f(ξ(p))` by enumerating assignments grouped by weight.
pub fn bernoulli_value_dist(f: &MultilinearPoly, p: &Rational, caps: &Caps) -> Result<ValueDist> {
    check_probability(p)?;
    Ok(WeightProfile::of(f, caps)?.to_dist(p))
}

/// The same law by conditioning on one variable at a time through `substitute`.
pub fn bernoulli_value_dist_by_conditioning(
    f: &MultilinearPoly,
    p: &Rational,
    caps: &Caps,
) -> Result<ValueDist> {
    check_probability(p)?;
    caps.check_assignments(f.num_vars())?;
    let q = Rational::one() - p;
    fn go(f: &MultilinearPoly, p: &Rational, q: &Rational) -> BTreeMap<i64, Rational> {
        let n = f.num_vars();
        if n == 0 {
            return BTreeMap::from([(f.constant(), Rational::one())]);
        }
        let one = go(&f.substitute(n - 1, true).expect("in range"), p, q);
        let zero = go(&f.substitute(n - 1, false).expect("in range"), p, q);
        let mut out = BTreeMap::new();
        for (v, m) in one {
            *out.entry(v).or_insert_with(Rational::zero) += m * p;
        }
        for (v, m) in zero {
            *out.entry(v).or_insert_with(Rational::zero) += m * q;
        }
        out
    }
    let mut masses = go(f, p, &q);
    masses.retain(|_, m| !m.is_zero());
    Ok(ValueDist { masses })
}

/// `Pr[f(ξ(p)) = ell]`, zero when `ell` is not achievable.
pub fn point_probability(
    f: &MultilinearPoly,
    p: &Rational,
    ell: i64,
    caps: &Caps,
) -> Result<Rational> {
    check_probability(p)?;
    Ok(WeightProfile::of(f, caps)?.probability(ell, p))
}

/// `C(m, j) p^j (1-p)^(m-j)`.
pub fn binomial_pmf(m: u64, j: u64, p: &Rational) -> Rational {
    if j > m {
        return Rational::zero();
    }
    let q = Rational::one() - p;
    Rational::from_integer(BigInt::from(binomial(m, j)))
        * rational::pow(p, j as u32)
        * rational::pow(&q, (m - j) as u32)
}

fn scan_max(m: u64, from: u64, p: &Rational) -> Rational {
    (from..=m)
        .map(|j| binomial_pmf(m, j, p))
        .max()
        .unwrap_or_else(Rational::zero)
}

/// `⌊(m+1)p⌋`, a mode of `Bin(m, p)` for `p < 1`.
pub fn binomial_mode(m: u64, p: &Rational) -> u64 {
    (p * Rational::from_integer(BigInt::from(m + 1)))
        .floor()
        .to_integer()
        .to_u64()
        .expect("non-negative")
        .min(m)
}

/// Largest point mass of `Bin(m, p)`, by a full scan.
pub fn binmax(m: u64, p: &Rational) -> Rational {
    let max = scan_max(m, 0, p);
    debug_assert!(
        *p >= Rational::one() || binomial_pmf(m, binomial_mode(m, p), p) == max,
        "mode identity"
    );
    debug_assert!(m == 0 || max <= scan_max(m - 1, 0, p), "binmax is non-increasing in m");
    max
}

/// Largest point mass of `Bin(m, p)` over counts `1..=m`; zero for `m = 0`.
pub fn binmaxplus(m: u64, p: &Rational) -> Rational {
    scan_max(m, 1, p)
}

/// Enclosure of `Pr[Poi(λ) = count]`.
pub fn poisson_pmf_bounds(lambda: &Rational, count: u32, digits: u32) -> (Rational, Rational) {
    let (lo, hi) = rational::exp_bounds(&-lambda, digits);
    let fact: BigInt = (1..=count).map(BigInt::from).product();
    let base = rational::pow(lambda, count) / Rational::from_integer(fact);
    (lo * &base, hi * base)
}

/// `Pr[Poi(λ) = count]` as a float (midpoint of a tight enclosure).
pub fn poisson_pmf(lambda: &Rational, count: u32) -> f64 {
    let (lo, hi) = poisson_pmf_bounds(lambda, count, 30);
    rational::to_f64(&((lo + hi) / int(2)))
}

/// Pointwise comparison of `Bin(N, p)` against `Poi(pN)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonCheck {
    pub n: u64,
    pub p: Rational,
    /// Rigorous upper bound on `max_M |Pr[Bin = M] - Pr[Poi = M]|`.
    pub max_deviation: Rational,
    pub argmax: u64,
    pub ok: bool,
}

/// Slack added on the favourable side of comparisons that involve `e`.
pub fn transcendental_slack() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(1_000_000_000_000u64))
}

/// Checks `|Pr[Bin(N,p) = M] - Pr[Poi(pN) = M]| <= p` for every `0 <= M <= N`.
pub fn poisson_tv_check(n: u64, p: &Rational) -> Result<PoissonCheck> {
    if n == 0 || !p.is_positive() || *p >= Rational::one() {
        return Err(Error::Precondition(format!(
            "Poisson check needs N >= 1 and 0 < p < 1, got N = {n}, p = {}",
            rational::fraction_string(p)
        )));
    }
    let lambda = p * Rational::from_integer(BigInt::from(n));
    let (e_lo, e_hi) = rational::exp_bounds(&-&lambda, EXP_DIGITS);
    // Everything is scaled by b^N N! E, where p = a/b and E is the common
    // denominator of the e^-λ enclosure.
    let (ends, e_den) = rational::to_integers(&[e_lo, e_hi]);
    let (a, b) = (p.numer().clone(), p.denom().clone());
    let n_fact: BigInt = (1..=n).map(BigInt::from).product();
    let big = |v: u64| BigInt::from(v);
    let mut best = (BigInt::zero(), 0u64);
    let mut m_fact = BigInt::one();
    for m in 0..=n {
        if m > 0 {
            m_fact *= big(m);
        }
        let mu = m as usize;
        let bin = BigInt::from(binomial(n, m))
            * num_traits::pow(a.clone(), mu)
            * num_traits::pow(&b - &a, (n - m) as usize)
            * &n_fact
            * &e_den;
        let poi = num_traits::pow(&a * big(n), mu) * num_traits::pow(b.clone(), (n - m) as usize) * (&n_fact / &m_fact);
        let dev = ends.iter().map(|e| (&bin - &poi * e).abs()).max().expect("two ends");
        if dev > best.0 {
            best = (dev, m);
        }
    }
    let scale = num_traits::pow(b, n as usize) * n_fact * e_den;
    let best = (Rational::new(best.0, scale), best.1);
    let ok = best.0 <= p + transcendental_slack();
    Ok(PoissonCheck {
        n,
        p: p.clone(),
        max_deviation: best.0,
        argmax: best.1,
        ok,
    })
}

/// Exact law of `f(σ)` for `σ` uniform on the slice, by enumerating `k`-subsets.
pub fn slice_value_dist(f: &MultilinearPoly, spec: SliceSpec, caps: &Caps) -> Result<ValueDist> {
    if f.num_vars() != spec.n {
        return Err(Error::InvalidInput(format!(
            "polynomial has {} variables, slice has n = {}",
            f.num_vars(),
            spec.n
        )));
    }
    let total = caps.check_subsets(spec.n as u64, spec.k as u64)?;
    let mut walk = SubsetWalk {
        gains: Gains::new(f),
        chosen: Vec::with_capacity(spec.k),
        tally: Tally::for_poly(f, 1),
    };
    walk.run(0, spec.n, spec.k, f.constant());
    Ok(ValueDist::from_counts(
        walk.tally.into_map().into_iter().map(|(v, c)| (v, c[0])),
        total,
    ))
}

/// Marginal gains `lin[v] + Σ_{u chosen} q(u, v)`.
enum Gains {
    Dense { n: usize, linear: Vec<i64>, matrix: Vec<i64> },
    Sparse { compiled: Compiled, marks: Vec<bool> },
}

impl Gains {
    const DENSE_LIMIT: usize = 2048;

    fn new(f: &MultilinearPoly) -> Self {
        let n = f.num_vars();
        if n <= Self::DENSE_LIMIT {
            let mut linear = vec![0; n];
            let mut matrix = vec![0; n * n];
            for (&i, &c) in f.linear() {
                linear[i] = c;
            }
            for (&(i, j), &c) in f.quadratic() {
                matrix[i * n + j] = c;
                matrix[j * n + i] = c;
            }
            Gains::Dense { n, linear, matrix }
        } else {
            Gains::Sparse {
                compiled: Compiled::new(f),
                marks: vec![false; n],
            }
        }
    }

    fn gain(&self, v: usize, chosen: &[usize]) -> i64 {
        match self {
            Gains::Dense { n, linear, matrix } => {
                let row = &matrix[v * n..(v + 1) * n];
                linear[v] + chosen.iter().map(|&u| row[u]).sum::<i64>()
            }
            Gains::Sparse { compiled, marks } => compiled.gain(v, marks),
        }
    }

    fn mark(&mut self, v: usize, on: bool) {
        if let Gains::Sparse { marks, .. } = self {
            marks[v] = on;
        }
    }
}

struct SubsetWalk {
    gains: Gains,
    chosen: Vec<usize>,
    tally: Tally,
}

impl SubsetWalk {
    fn run(&mut self, start: usize, n: usize, left: usize, value: i64) {
        if left == 0 {
            self.tally.add(value, 0);
            return;
        }
        for v in start..=n - left {
            let delta = self.gains.gain(v, &self.chosen);
            self.chosen.push(v);
            self.gains.mark(v, true);
            self.run(v + 1, n, left - 1, value + delta);
            self.gains.mark(v, false);
            self.chosen.pop();
        }
    }
}

/// Outcome of comparing slice and product laws of a statistic of few coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSliceTv {
    pub tv: Rational,
    /// `max(s/n, 3/k)`.
    pub bound: Rational,
    /// `(max(s, 2n/k) - 1)/(n - 1)`, the sharper form of the same bound.
    pub sharp_bound: Rational,
    pub ok: bool,
}

/// Law of `f(σ)` when `f` depends only on its first `s` slots, via the slice marginal.
pub fn slice_law_of_prefix(f: &MultilinearPoly, s: usize, spec: SliceSpec, caps: &Caps) -> Result<ValueDist> {
    let restricted = prefix_poly(f, s, spec)?;
    let profile = WeightProfile::of(&restricted, caps)?;
    let (n, k) = (spec.n as u64, spec.k as u64);
    let total = BigInt::from(binomial(n, k));
    let masses = profile.counts.iter().map(|(&v, counts)| {
        let ways: BigUint = counts
            .iter()
            .enumerate()
            .filter(|&(w, &c)| c > 0 && (w as u64) <= k && k - w as u64 <= n - s as u64)
            .map(|(w, &c)| binomial(n - s as u64, k - w as u64) * c)
            .sum();
        (v, Rational::new(BigInt::from(ways), total.clone()))
    });
    let mut masses: BTreeMap<i64, Rational> = masses.collect();
    masses.retain(|_, m| !m.is_zero());
    Ok(ValueDist { masses })
}

fn prefix_poly(f: &MultilinearPoly, s: usize, spec: SliceSpec) -> Result<MultilinearPoly> {
    if s > spec.n {
        return Err(Error::Precondition(format!("s = {s} exceeds n = {}", spec.n)));
    }
    f.with_num_vars(s).map_err(|_| {
        Error::Precondition(format!("polynomial uses variables beyond the first {s}"))
    })
}

/// Exact `d_TV(F(σ), F(ξ(k/n)))` for `F` depending on the first `s` coordinates.
pub fn product_slice_tv(
    f: &MultilinearPoly,
    s: usize,
    spec: SliceSpec,
    caps: &Caps,
) -> Result<ProductSliceTv> {
    let (n, k) = (spec.n, spec.k);
    if k == 0 || 2 * k > n {
        return Err(Error::Precondition(format!("need 1 <= k <= n/2, got n = {n}, k = {k}")));
    }
    let slice = slice_law_of_prefix(f, s, spec, caps)?;
    let p = rational::rat(k as i64, n as i64);
    let product = bernoulli_value_dist(&prefix_poly(f, s, spec)?, &p, caps)?;
    let tv = slice.total_variation(&product);
    let bound = rational::rat(s as i64, n as i64).max(rational::rat(3, k as i64));
    let top = rational::int(s as i64).max(rational::rat(2 * n as i64, k as i64));
    let sharp_bound = if n > 1 {
        (top - Rational::one()) / rational::int(n as i64 - 1)
    } else {
        Rational::one()
    };
    let ok = tv <= bound;
    Ok(ProductSliceTv {
        tv,
        bound,
        sharp_bound,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn caps() -> Caps {
        Caps::default()
    }

    fn star() -> MultilinearPoly {
        parse_poly("x2+x3+x4+x5+x1*x2+x1*x3+x1*x4+x1*x5").unwrap()
    }

    /// Independent oracle: sum `p^|b| (1-p)^(n-|b|)` over assignments with `f(b) = ell`.
    fn brute_point(f: &MultilinearPoly, p: &Rational, ell: i64) -> Rational {
        let n = f.num_vars();
        let q = Rational::one() - p;
        let mut total = Rational::zero();
        for mask in 0u64..1 << n {
            let b: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            if f.evaluate(&b).unwrap() == ell {
                let w = mask.count_ones();
                total += rational::pow(p, w) * rational::pow(&q, n as u32 - w);
            }
        }
        total
    }

    #[test]
    fn bernoulli_examples() {
        let x1 = parse_poly("x1").unwrap();
        let d = bernoulli_value_dist(&x1, &rat(1, 2), &caps()).unwrap();
        assert_eq!(d.prob(0), rat(1, 2));
        assert_eq!(d.prob(1), rat(1, 2));

        let d = bernoulli_value_dist(&star(), &rat(1, 3), &caps()).unwrap();
        assert_eq!(d.prob(2), brute_point(&star(), &rat(1, 3), 2));
        assert_eq!(d.prob(2), rat(80, 243));

        let f = parse_poly("3+x1-2*x2+x1*x3").unwrap();
        let d = bernoulli_value_dist(&f, &Rational::zero(), &caps()).unwrap();
        assert_eq!(d, ValueDist::point(3));

        assert!(bernoulli_value_dist(&x1, &rat(3, 2), &caps()).is_err());
    }

    #[test]
    fn point_probability_examples() {
        let f = parse_poly("x1+x2").unwrap();
        assert!(point_probability(&f, &rat(1, 2), 3, &caps()).unwrap().is_zero());
        assert_eq!(point_probability(&star(), &rat(1, 3), 2, &caps()).unwrap(), rat(80, 243));
        let x1 = parse_poly("x1").unwrap();
        assert_eq!(point_probability(&x1, &rat(97, 250), 1, &caps()).unwrap(), rat(97, 250));
    }

    #[test]
    fn binmax_examples() {
        assert_eq!(binmax(2, &rat(2, 3)), rat(4, 9));
        assert_eq!(binmax(4, &rat(2, 5)), rat(216, 625));
        assert_eq!(binmax(5, &rat(1, 3)), rat(80, 243));
        for m in 0..10 {
            assert!(binmax(m, &Rational::zero()).is_one());
        }
        assert!(binmaxplus(0, &rat(1, 3)).is_zero());
        assert_eq!(binmaxplus(1, &rat(97, 250)), rat(97, 250));
        assert!(binmax(3, &Rational::one()).is_one());
    }

    #[test]
    fn binmax_identities_on_a_grid() {
        for num in 1..20 {
            let p = rat(num, 20);
            let mut prev = Rational::one();
            for m in 0..=30u64 {
                let b = binmax(m, &p);
                assert!(b <= prev, "monotone in m at p = {num}/20, m = {m}");
                assert_eq!(binomial_pmf(m, binomial_mode(m, &p), &p), b, "mode identity");
                if p >= rat(1, m as i64 + 1) {
                    assert_eq!(binmaxplus(m, &p), b);
                }
                prev = b;
            }
        }
    }

    #[test]
    fn poisson_examples() {
        let check = poisson_tv_check(1, &rat(1, 2)).unwrap();
        assert!(check.ok);
        let check = poisson_tv_check(20, &rat(1, 10)).unwrap();
        assert!(check.ok && check.max_deviation <= rat(1, 10));
        let check = poisson_tv_check(50, &rat(1, 50)).unwrap();
        assert!(check.ok && check.max_deviation <= rat(1, 50));
        assert!(poisson_tv_check(0, &rat(1, 2)).is_err());
        assert!(poisson_tv_check(3, &Rational::one()).is_err());
        // Bin(1,1/2) against Poi(1/2): the gap is largest at M = 1, 1/2 - e^{-1/2}/2.
        let check = poisson_tv_check(1, &rat(1, 2)).unwrap();
        assert_eq!(check.argmax, 1);
        assert!((rational::to_f64(&check.max_deviation) - 0.196_734_670_143_683_3).abs() < 1e-12);
        // Float oracle for N = 30, p = 1/5.
        let (n, pf) = (30u64, 0.2f64);
        let mut oracle: f64 = 0.0;
        for m in 0..=n {
            let c: f64 = (0..m).map(|i| (n - i) as f64 / (i + 1) as f64).product();
            let bin = c * pf.powi(m as i32) * (1.0 - pf).powi((n - m) as i32);
            let fact: f64 = (1..=m).map(|i| i as f64).product();
            let poi = (-6.0f64).exp() * 6.0f64.powi(m as i32) / fact;
            oracle = oracle.max((bin - poi).abs());
        }
        let check = poisson_tv_check(n, &rat(1, 5)).unwrap();
        assert!((rational::to_f64(&check.max_deviation) - oracle).abs() < 1e-12);
        // e^{-1/2} ≈ 0.6065306597
        assert!((poisson_pmf(&rat(1, 2), 0) - 0.606_530_659_712_633_4).abs() < 1e-15);
    }

    fn edge_poly(n: usize, edges: &[(usize, usize)]) -> MultilinearPoly {
        MultilinearPoly::from_terms(n, 0, [], edges.iter().map(|&(i, j)| (i, j, 1))).unwrap()
    }

    fn two_k6() -> MultilinearPoly {
        let mut edges = Vec::new();
        for base in [0, 6] {
            for i in 0..6 {
                for j in i + 1..6 {
                    edges.push((base + i, base + j));
                }
            }
        }
        edge_poly(12, &edges)
    }

    #[test]
    fn slice_examples() {
        let tri = edge_poly(3, &[(0, 1), (1, 2), (0, 2)]);
        let d = slice_value_dist(&tri, SliceSpec::new(3, 3).unwrap(), &caps()).unwrap();
        assert_eq!(d, ValueDist::point(3));

        // 2·C(6,2)·6 = 180 of C(12,3) = 220 triples induce exactly one edge
        let d = slice_value_dist(&two_k6(), SliceSpec::new(12, 3).unwrap(), &caps()).unwrap();
        assert_eq!(d.prob(1), rat(9, 11));
        assert_eq!(d.prob(3), rat(40, 220));

        let empty = MultilinearPoly::zero(7);
        let d = slice_value_dist(&empty, SliceSpec::new(7, 4).unwrap(), &caps()).unwrap();
        assert_eq!(d, ValueDist::point(0));

        let tight = Caps { subsets: 219, ..caps() };
        let err = slice_value_dist(&two_k6(), SliceSpec::new(12, 3).unwrap(), &tight).unwrap_err();
        assert!(err.is_resource());
        assert!(alloc::string::ToString::to_string(&err).contains("220"));
        assert!(SliceSpec::new(3, 4).is_err());
    }

    #[test]
    fn wide_slice_uses_neighbour_lists() {
        let f = MultilinearPoly::parse_with_vars("x1+x1*x2", 2100).unwrap();
        let d = slice_value_dist(&f, SliceSpec::new(2100, 2).unwrap(), &caps()).unwrap();
        let total = (2100 * 2099 / 2) as i64;
        assert_eq!(d.prob(2), rat(1, total));
        assert_eq!(d.prob(1), rat(2098, total));
    }

    #[test]
    fn complement_duality_on_the_slice() {
        let f = two_k6();
        let mut comp = MultilinearPoly::zero(12);
        for i in 0..12 {
            for j in i + 1..12 {
                if f.quadratic_coeff(i, j) == 0 {
                    comp.add_quadratic(i, j, 1).unwrap();
                }
            }
        }
        for k in 0..=5usize {
            let spec = SliceSpec::new(12, k).unwrap();
            let d = slice_value_dist(&f, spec, &caps()).unwrap();
            let c = slice_value_dist(&comp, spec, &caps()).unwrap();
            let pairs = (k * k.saturating_sub(1) / 2) as i64;
            for ell in 0..=pairs {
                assert_eq!(d.prob(ell), c.prob(pairs - ell));
            }
        }
    }

    #[test]
    fn product_slice_examples() {
        let spec = SliceSpec::new(10, 3).unwrap();
        let constant = MultilinearPoly::from_terms(10, 4, [], []).unwrap();
        let r = product_slice_tv(&constant, 0, spec, &caps()).unwrap();
        assert!(r.tv.is_zero() && r.ok);

        let x1 = MultilinearPoly::parse_with_vars("x1", 10).unwrap();
        let r = product_slice_tv(&x1, 1, spec, &caps()).unwrap();
        assert!(r.tv.is_zero());

        let f = MultilinearPoly::parse_with_vars("x1+x1*x2", 12).unwrap();
        let spec = SliceSpec::new(12, 4).unwrap();
        let r = product_slice_tv(&f, 2, spec, &caps()).unwrap();
        assert!(r.ok && r.tv <= r.sharp_bound);
        assert_eq!(r.bound, rat(3, 4));
        // slice: Pr[x1 = 1] = 1/3, Pr[x1 = x2 = 1] = (4·3)/(12·11) = 1/11
        let slice = slice_value_dist(&f, spec, &caps()).unwrap();
        assert_eq!(slice.prob(2), rat(1, 11));
        assert_eq!(slice.prob(1), rat(1, 3) - rat(1, 11));

        assert!(product_slice_tv(&f, 1, spec, &caps()).is_err());
        assert!(product_slice_tv(&f, 2, SliceSpec::new(12, 7).unwrap(), &caps()).is_err());
    }

    #[test]
    fn total_variation_basics() {
        let a = ValueDist::from_masses([(0, rat(1, 2)), (1, rat(1, 2))]).unwrap();
        let b = ValueDist::point(0);
        assert_eq!(a.total_variation(&b), rat(1, 2));
        assert_eq!(b.total_variation(&a), rat(1, 2));
        assert!(a.total_variation(&a).is_zero());
        assert!(ValueDist::from_masses([(0, rat(1, 2))]).is_err());
        assert!(ValueDist::from_masses([(0, rat(3, 2)), (1, rat(-1, 2))]).is_err());
    }

    fn arb_poly(max_vars: usize) -> impl Strategy<Value = MultilinearPoly> {
        (1..=max_vars).prop_flat_map(|n| {
            (
                Just(n),
                -3i64..=3,
                proptest::collection::vec((0..n, -3i64..=3), 0..=n),
                proptest::collection::vec((0..n, 0..n, -3i64..=3), 0..=2 * n),
            )
                .prop_map(|(n, c, lin, quad)| {
                    MultilinearPoly::from_terms(n, c, lin, quad.into_iter().filter(|(i, j, _)| i != j))
                        .unwrap()
                })
        })
    }

    proptest! {
        #[test]
        fn enumeration_and_conditioning_agree(f in arb_poly(8), num in 0i64..=12) {
            let p = rat(num, 12);
            let a = bernoulli_value_dist(&f, &p, &caps()).unwrap();
            let b = bernoulli_value_dist_by_conditioning(&f, &p, &caps()).unwrap();
            prop_assert!(a.total().is_one());
            prop_assert_eq!(a, b);
        }

        #[test]
        fn slice_distribution_is_symmetric(f in arb_poly(8), k in 0usize..=8, seed in any::<u64>()) {
            let n = f.num_vars();
            let k = k.min(n);
            let mut perm: Vec<usize> = (0..n).collect();
            let mut state = seed | 1;
            for i in (1..n).rev() {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                perm.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let spec = SliceSpec::new(n, k).unwrap();
            let a = slice_value_dist(&f, spec, &caps()).unwrap();
            let b = slice_value_dist(&f.permuted(&perm).unwrap(), spec, &caps()).unwrap();
            prop_assert!(a.total().is_one());
            prop_assert_eq!(a, b);
        }

        #[test]
        fn prefix_marginal_matches_full_slice(f in arb_poly(4), n in 4usize..=11, k in 0usize..=11) {
            let k = k.min(n);
            let s = f.num_vars();
            let wide = f.with_num_vars(n).unwrap();
            let spec = SliceSpec::new(n, k).unwrap();
            let full = slice_value_dist(&wide, spec, &caps()).unwrap();
            let marginal = slice_law_of_prefix(&wide, s, spec, &caps()).unwrap();
            prop_assert_eq!(full, marginal);
        }
    }
}
