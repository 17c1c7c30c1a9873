//! Host graphs built from part fractions, their exact induced edge-count laws
//! at finite `n`, and the multinomial limit as `n → ∞`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::dist::{slice_value_dist, SliceSpec, ValueDist};
use crate::error::{Error, Result};
use crate::poly::MultilinearPoly;
use crate::rational::{binomial, rat, Rational};
use crate::Caps;

/// A simple graph on `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HostGraph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    tag: Option<String>,
}

impl HostGraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("host graphs need at least one vertex".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidInput(format!("bad edge ({a}, {b}) on {n} vertices")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(HostGraph { n, edges: set, tag: None })
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn complement(&self) -> Self {
        let mut edges = BTreeSet::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                if !self.edges.contains(&(a, b)) {
                    edges.insert((a, b));
                }
            }
        }
        HostGraph { n: self.n, edges, tag: None }
    }

    /// `Σ_{ab ∈ E} x_a x_b`, so that `e(G[X])` is its value at the indicator of `X`.
    pub fn edge_poly(&self) -> MultilinearPoly {
        MultilinearPoly::from_terms(self.n, 0, [], self.edges.iter().map(|&(a, b)| (a, b, 1)))
            .expect("edges are valid pairs")
    }
}

/// A part of a [`PartFamily`]: a fraction of the vertices, complete or empty inside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub fraction: Rational,
    pub clique: bool,
}

/// Vertex classes with given fractions; whatever is left over forms an
/// edgeless background class, which is the last index of `cross`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartFamily {
    parts: Vec<Part>,
    /// `cross[i][j]`: all edges between classes `i` and `j`, background included.
    cross: Vec<Vec<bool>>,
    tag: String,
}

impl PartFamily {
    pub fn new(parts: Vec<Part>, cross_edges: &[(usize, usize)], tag: impl Into<String>) -> Result<Self> {
        let total: Rational = parts.iter().map(|p| &p.fraction).sum();
        if parts.iter().any(|p| !p.fraction.is_positive()) || total > Rational::one() {
            return Err(Error::InvalidInput("part fractions must be positive and sum to at most 1".into()));
        }
        let classes = parts.len() + 1;
        let mut cross = vec![vec![false; classes]; classes];
        for &(i, j) in cross_edges {
            if i == j || i >= classes || j >= classes {
                return Err(Error::InvalidInput(format!("bad class pair ({i}, {j})")));
            }
            cross[i][j] = true;
            cross[j][i] = true;
        }
        Ok(PartFamily { parts, cross, tag: tag.into() })
    }

    /// `K_{an/k, n-an/k}`: a part of fraction `a/k` joined to everything else.
    pub fn bipartite(a: u64, k: u64) -> Result<Self> {
        Self::blocker(a, k, false)
    }

    /// The bipartite family with the small part turned into a clique.
    pub fn bipartite_plus_clique(a: u64, k: u64) -> Result<Self> {
        Self::blocker(a, k, true)
    }

    fn blocker(a: u64, k: u64, clique: bool) -> Result<Self> {
        let fraction = positive_fraction(a, k)?;
        let name = if clique { "bipartite-plus-clique" } else { "bipartite" };
        Self::new(vec![Part { fraction, clique }], &[(0, 1)], format!("{name}(a={a},k={k})"))
    }

    /// Disjoint cliques of fractions `m_i/k` plus isolated vertices.
    pub fn cliques(sizes: &[u64], k: u64) -> Result<Self> {
        let parts = sizes
            .iter()
            .map(|&m| Ok(Part { fraction: positive_fraction(m, k)?, clique: true }))
            .collect::<Result<Vec<_>>>()?;
        let list: Vec<String> = sizes.iter().map(|m| format!("{m}")).collect();
        Self::new(parts, &[], format!("cliques({};k={k})", list.join(",")))
    }

    /// Two disjoint cliques of half the vertices each.
    pub fn two_cliques() -> Self {
        let half = Part { fraction: rat(1, 2), clique: true };
        Self::new(vec![half.clone(), half], &[], "two-cliques").expect("valid fractions")
    }

    /// `A` of fraction `a/k` joined to everything outside `A`, plus a clique `M` of fraction `m/k`.
    pub fn blocker_with_clique(a: u64, m: u64, k: u64) -> Result<Self> {
        let parts = vec![
            Part { fraction: positive_fraction(a, k)?, clique: false },
            Part { fraction: positive_fraction(m, k)?, clique: true },
        ];
        Self::new(parts, &[(0, 1), (0, 2)], format!("blocker-with-clique(a={a},m={m},k={k})"))
    }

    /// `A` of fraction `(a+1)/k` joined to everything outside `A ∪ M`, with `M` of fraction `m/k`.
    pub fn blocker_avoiding(a: u64, m: u64, k: u64) -> Result<Self> {
        let parts = vec![
            Part { fraction: positive_fraction(a + 1, k)?, clique: false },
            Part { fraction: positive_fraction(m, k)?, clique: false },
        ];
        Self::new(parts, &[(0, 2)], format!("blocker-avoiding(a={a},m={m},k={k})"))
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn background_fraction(&self) -> Rational {
        Rational::one() - self.parts.iter().map(|p| &p.fraction).sum::<Rational>()
    }

    fn class_fractions(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.parts.iter().map(|p| p.fraction.clone()).collect();
        out.push(self.background_fraction());
        out
    }

    /// Edges induced by a set meeting class `i` in `counts[i]` vertices.
    pub fn edges_for(&self, counts: &[u64]) -> u64 {
        let mut total = 0;
        for (i, &c) in counts.iter().enumerate() {
            if i < self.parts.len() && self.parts[i].clique {
                total += c * c.saturating_sub(1) / 2;
            }
            for (j, &d) in counts.iter().enumerate().skip(i + 1) {
                if self.cross[i][j] {
                    total += c * d;
                }
            }
        }
        total
    }

    /// Class sizes at `n`: each part gets `⌊c_i n⌋`, the background the rest.
    pub fn class_sizes(&self, n: usize) -> Result<Vec<usize>> {
        let mut sizes = Vec::with_capacity(self.parts.len() + 1);
        for (i, part) in self.parts.iter().enumerate() {
            let size = (&part.fraction * Rational::from_integer(BigInt::from(n)))
                .floor()
                .to_integer()
                .to_usize()
                .expect("fraction at most one");
            if size == 0 {
                return Err(Error::InvalidInput(format!(
                    "n = {n} leaves part {} of {} empty",
                    i + 1,
                    self.tag
                )));
            }
            sizes.push(size);
        }
        sizes.push(n - sizes.iter().sum::<usize>());
        Ok(sizes)
    }
}

fn positive_fraction(num: u64, k: u64) -> Result<Rational> {
    if num == 0 || k == 0 || num > k {
        return Err(Error::InvalidInput(format!("need 0 < {num} <= k = {k}")));
    }
    Ok(Rational::new(BigInt::from(num), BigInt::from(k)))
}

/// Realises a family on `n` vertices: parts first in order, background last.
pub fn build_host(family: &PartFamily, n: usize) -> Result<HostGraph> {
    let sizes = family.class_sizes(n)?;
    let mut starts = vec![0usize];
    for s in &sizes {
        starts.push(starts.last().unwrap() + s);
    }
    let range = |i: usize| starts[i]..starts[i + 1];
    let mut edges = Vec::new();
    for (i, part) in family.parts.iter().enumerate() {
        if part.clique {
            for a in range(i) {
                edges.extend((a + 1..starts[i + 1]).map(|b| (a, b)));
            }
        }
    }
    for i in 0..sizes.len() {
        for j in i + 1..sizes.len() {
            if family.cross[i][j] {
                for a in range(i) {
                    edges.extend(range(j).map(|b| (a, b)));
                }
            }
        }
    }
    Ok(HostGraph::new(n, edges)?.with_tag(format!("{}@n={n}", family.tag)))
}

/// Exact law of `e(G[X])` for a uniform `k`-subset `X`, by subset enumeration.
pub fn edge_count_dist(host: &HostGraph, k: usize, caps: &Caps) -> Result<ValueDist> {
    slice_value_dist(&host.edge_poly(), SliceSpec::new(host.n, k)?, caps)
}

/// The same law for `build_host(family, n)`, summing multivariate
/// hypergeometric weights over intersection vectors.
pub fn family_edge_count_dist(family: &PartFamily, n: usize, k: usize, caps: &Caps) -> Result<ValueDist> {
    let sizes = family.class_sizes(n)?;
    if k > n {
        return Err(Error::InvalidInput(format!("k = {k} exceeds n = {n}")));
    }
    let total = BigInt::from(binomial(n as u64, k as u64));
    let mut masses = Vec::new();
    for_each_composition(sizes.len(), k as u64, caps, &mut |counts| {
        if counts.iter().zip(&sizes).any(|(&c, &s)| c > s as u64) {
            return;
        }
        let ways: BigUint = counts
            .iter()
            .zip(&sizes)
            .map(|(&c, &s)| binomial(s as u64, c))
            .product();
        let edges = family.edges_for(counts) as i64;
        masses.push((edges, Rational::new(BigInt::from(ways), total.clone())));
    })?;
    ValueDist::from_masses(masses)
}

/// Visits every vector of `classes` non-negative integers summing to `k`.
fn for_each_composition(classes: usize, k: u64, caps: &Caps, visit: &mut dyn FnMut(&[u64])) -> Result<()> {
    let count = crate::rational::binomial_u128(k + classes as u64 - 1, classes as u64 - 1);
    if count > u128::from(caps.subsets) {
        return Err(Error::CapExceeded {
            what: "intersection vectors",
            count: format!("{count}"),
            cap: format!("{}", caps.subsets),
        });
    }
    fn go(counts: &mut Vec<u64>, classes: usize, left: u64, visit: &mut dyn FnMut(&[u64])) {
        if counts.len() + 1 == classes {
            counts.push(left);
            visit(counts);
            counts.pop();
            return;
        }
        for c in 0..=left {
            counts.push(c);
            go(counts, classes, left - c, visit);
            counts.pop();
        }
    }
    go(&mut Vec::with_capacity(classes), classes, k, visit);
    Ok(())
}

/// Largest number of named parts accepted by [`limit_probability`].
pub const MAX_LIMIT_PARTS: usize = 6;
/// Largest `k` accepted by [`limit_probability`].
pub const MAX_LIMIT_K: u64 = 10_000;

/// `lim_{n→∞} Pr[e(G_n[X]) = ℓ]`: a multinomial sum over intersection vectors.
pub fn limit_probability(family: &PartFamily, k: u64, ell: i64, caps: &Caps) -> Result<Rational> {
    if family.parts.len() > MAX_LIMIT_PARTS {
        return Err(Error::Precondition(format!(
            "{} parts exceed the limit of {MAX_LIMIT_PARTS}",
            family.parts.len()
        )));
    }
    if k == 0 || k > MAX_LIMIT_K {
        return Err(Error::Precondition(format!("need 1 <= k <= {MAX_LIMIT_K}, got {k}")));
    }
    let fractions = family.class_fractions();
    let mut factorials = vec![BigInt::one()];
    for i in 1..=k {
        let next = factorials.last().unwrap() * BigInt::from(i);
        factorials.push(next);
    }
    let mut sum = Rational::zero();
    for_each_composition(fractions.len(), k, caps, &mut |counts| {
        if ell < 0 || family.edges_for(counts) != ell as u64 {
            return;
        }
        let mut term = Rational::from_integer(factorials[k as usize].clone());
        for (&c, f) in counts.iter().zip(&fractions) {
            if c > 0 && f.is_zero() {
                return;
            }
            term = term * crate::rational::pow(f, c as u32) / Rational::from_integer(factorials[c as usize].clone());
        }
        sum += term;
    })?;
    Ok(sum)
}

/// Greedy decomposition `ℓ = Σ C(m_i, 2)` and the clique family it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueBound {
    pub sizes: Vec<u64>,
    pub product: BigUint,
    pub family: PartFamily,
    pub limit: Rational,
}

/// Largest `m_i` first; every piece has `m_i ≥ 2`.
pub fn greedy_clique_sizes(ell: u64) -> Vec<u64> {
    let mut left = ell;
    let mut sizes = Vec::new();
    while left > 0 {
        let mut m = 2u64;
        while (m + 1) * m / 2 <= left {
            m += 1;
        }
        sizes.push(m);
        left -= m * (m - 1) / 2;
    }
    sizes
}

pub fn clique_decomposition_bound(k: u64, ell: u64, caps: &Caps) -> Result<CliqueBound> {
    if ell == 0 || 2 * ell > k {
        return Err(Error::Precondition(format!("need 1 <= ell <= k/2, got k = {k}, ell = {ell}")));
    }
    let sizes = greedy_clique_sizes(ell);
    let family = PartFamily::cliques(&sizes, k)?;
    let limit = limit_probability(&family, k, ell as i64, caps)?;
    let product = sizes.iter().map(|&m| BigUint::from(m)).product();
    Ok(CliqueBound { sizes, product, family, limit })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityScan {
    pub values: Vec<(usize, Rational)>,
    pub limit: Rational,
    /// All values on one side of the limit with non-increasing distance to it.
    pub monotone_toward_limit: bool,
}

/// Exact `Pr[e(G_n[X]) = ℓ]` along `n_list`, compared against the limit.
pub fn monotonicity_scan(
    family: &PartFamily,
    k: usize,
    ell: i64,
    n_list: &[usize],
    caps: &Caps,
) -> Result<MonotonicityScan> {
    let mut values = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let host = build_host(family, n)?;
        values.push((n, edge_count_dist(&host, k, caps)?.prob(ell)));
    }
    let limit = limit_probability(family, k as u64, ell, caps)?;
    let above = values.iter().all(|(_, v)| *v >= limit);
    let below = values.iter().all(|(_, v)| *v <= limit);
    let distances: Vec<Rational> = values.iter().map(|(_, v)| (v - &limit).abs()).collect();
    let shrinking = distances.windows(2).all(|w| w[1] <= w[0]);
    Ok(MonotonicityScan {
        values,
        limit,
        monotone_toward_limit: (above || below) && shrinking,
    })
}
