//! Isomorph-free enumeration of the families `G(m)`.
//!
//! A member is described by its linear set `L` and its quadratic-term graph.
//! Relabelling puts `L = {0, .., t-1}` first and the remaining vertices `Q`
//! after it, sorted by their neighbourhood inside `L`. Every `Q` vertex needs a
//! neighbour in `L`, an `L` vertex has at most `m - t` neighbours in `Q`, and a
//! `Q` vertex has at most `m - 1 - t` neighbours in `Q`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::poly::{canonical_key, gm_membership, CanonicalKey, GPolynomial, MAX_CANON_VARS};

/// Largest `m` the enumerator accepts.
pub const MAX_ENUM_M: u32 = 6;

/// `⌊(m+1)²/4⌋`, the most variables a member of `G(m)` can have.
pub fn var_bound(m: u32) -> usize {
    let m = m as usize;
    (m + 1) * (m + 1) / 4
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 || m > MAX_ENUM_M {
        return Err(Error::UnsupportedM(m));
    }
    Ok(())
}

/// One independent slice of the search: `|L| = linear` and `|Q| = extra`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Branch {
    pub m: u32,
    pub linear: usize,
    pub extra: usize,
}

impl Branch {
    pub fn num_vars(&self) -> usize {
        self.linear + self.extra
    }
}

/// All branches for `m`, ordered by variable count.
pub fn branches(m: u32) -> Result<Vec<Branch>> {
    check_m(m)?;
    let m_us = m as usize;
    let mut out = Vec::new();
    for t in 1..=m_us {
        for q in 0..=t * (m_us - t) {
            out.push(Branch { m, linear: t, extra: q });
        }
    }
    out.sort_by_key(|b| (b.num_vars(), b.linear));
    Ok(out)
}

/// Canonical representatives of the members found in one branch.
pub fn enumerate_branch(branch: Branch) -> Result<BTreeMap<CanonicalKey, GPolynomial>> {
    check_m(branch.m)?;
    let (t, q) = (branch.linear, branch.extra);
    let m = branch.m as usize;
    if t == 0 || t > m || q > t * (m - t) {
        return Err(Error::InvalidInput(format!("no members with |L| = {t}, |Q| = {q} for m = {m}")));
    }
    let s = t + q;
    if s > MAX_CANON_VARS {
        return Err(Error::CapExceeded {
            what: "variables for canonical keys",
            count: format!("{s}"),
            cap: format!("{MAX_CANON_VARS}"),
        });
    }
    let mut search = Search {
        m: branch.m,
        t,
        q,
        q_budget: m - 1 - t.min(m - 1),
        masks: vec![0; q],
        found: BTreeMap::new(),
    };
    let mut load = vec![0usize; t];
    search.place_masks(0, 1, &mut load);
    Ok(search.found)
}

struct Search {
    m: u32,
    t: usize,
    q: usize,
    /// Most `Q` neighbours a `Q` vertex may have.
    q_budget: usize,
    /// Neighbourhood in `L` of each `Q` vertex, non-decreasing.
    masks: Vec<u64>,
    found: BTreeMap<CanonicalKey, GPolynomial>,
}

impl Search {
    fn place_masks(&mut self, j: usize, min_mask: u64, load: &mut [usize]) {
        if j == self.q {
            let mut adj = vec![0u64; self.t + self.q];
            for (k, &mask) in self.masks.iter().enumerate() {
                let v = self.t + k;
                adj[v] |= mask;
                for (i, a) in adj.iter_mut().enumerate().take(self.t) {
                    if mask >> i & 1 == 1 {
                        *a |= 1 << v;
                    }
                }
            }
            let mut degree = vec![0usize; self.q];
            self.place_q_edges(0, 1, &mut adj, &mut degree);
            return;
        }
        let cap = self.m as usize - self.t;
        for mask in min_mask..1u64 << self.t {
            if (0..self.t).any(|i| mask >> i & 1 == 1 && load[i] == cap) {
                continue;
            }
            for (i, l) in load.iter_mut().enumerate() {
                *l += (mask >> i & 1) as usize;
            }
            self.masks[j] = mask;
            self.place_masks(j + 1, mask, load);
            for (i, l) in load.iter_mut().enumerate() {
                *l -= (mask >> i & 1) as usize;
            }
        }
    }

    /// Decides the `Q`-`Q` pair `(a, b)`, scanning pairs in lexicographic order.
    fn place_q_edges(&mut self, a: usize, b: usize, adj: &mut [u64], degree: &mut [usize]) {
        if a + 1 >= self.q {
            self.place_l_edges(adj);
            return;
        }
        let (na, nb) = if b + 1 < self.q { (a, b + 1) } else { (a + 1, a + 2) };
        self.place_q_edges(na, nb, adj, degree);
        if degree[a] < self.q_budget && degree[b] < self.q_budget {
            let (va, vb) = (self.t + a, self.t + b);
            adj[va] |= 1 << vb;
            adj[vb] |= 1 << va;
            degree[a] += 1;
            degree[b] += 1;
            self.place_q_edges(na, nb, adj, degree);
            degree[a] -= 1;
            degree[b] -= 1;
            adj[va] &= !(1 << vb);
            adj[vb] &= !(1 << va);
        }
    }

    fn place_l_edges(&mut self, adj: &[u64]) {
        let t = self.t;
        let pairs: Vec<(usize, usize)> =
            (0..t).flat_map(|i| (i + 1..t).map(move |j| (i, j))).collect();
        let linear = (1u64 << t) - 1;
        let mut local = adj.to_vec();
        for subset in 0u64..1 << pairs.len() {
            local[..t].iter_mut().zip(adj).for_each(|(l, a)| *l = *a);
            for (k, &(i, j)) in pairs.iter().enumerate() {
                if subset >> k & 1 == 1 {
                    local[i] |= 1 << j;
                    local[j] |= 1 << i;
                }
            }
            let g = GPolynomial::from_masks(local.len(), linear, &local)
                .expect("every vertex is linear or adjacent to L");
            if !gm_membership(&g, self.m) {
                debug_assert!(false, "search produced a non-member");
                continue;
            }
            let key = canonical_key(&g).expect("size checked");
            self.found.entry(key).or_insert_with(|| key.to_polynomial());
        }
    }
}

/// The permutation classes of `G(m)`, one canonical representative each.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GmFamily {
    m: u32,
    members: BTreeMap<CanonicalKey, GPolynomial>,
}

impl GmFamily {
    pub fn empty(m: u32) -> Self {
        GmFamily {
            m,
            members: BTreeMap::new(),
        }
    }

    /// Merges per-branch results; the order of the parts does not matter.
    pub fn from_parts(m: u32, parts: impl IntoIterator<Item = BTreeMap<CanonicalKey, GPolynomial>>) -> Self {
        let mut family = Self::empty(m);
        for part in parts {
            family.members.extend(part);
        }
        family
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> impl Iterator<Item = (&CanonicalKey, &GPolynomial)> {
        self.members.iter()
    }

    pub fn get(&self, key: &CanonicalKey) -> Option<&GPolynomial> {
        self.members.get(key)
    }

    pub fn per_s_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for key in self.members.keys() {
            *counts.entry(key.num_vars()).or_insert(0) += 1;
        }
        counts
    }

    pub fn max_num_vars(&self) -> usize {
        self.members.keys().map(|k| k.num_vars()).max().unwrap_or(0)
    }

    /// Re-checks literal membership, the variable bound and key consistency.
    pub fn validate(&self) -> Result<()> {
        for (key, g) in &self.members {
            if !gm_membership(g, self.m) {
                return Err(Error::InvalidInput(format!("{key} is not in G({})", self.m)));
            }
            if g.num_vars() > var_bound(self.m) {
                return Err(Error::InvalidInput(format!("{key} exceeds the variable bound")));
            }
            if canonical_key(g)? != *key {
                return Err(Error::InvalidInput(format!("{key} is stored under the wrong key")));
            }
        }
        Ok(())
    }
}

/// Sequential enumeration of every branch.
pub fn enumerate_gm(m: u32) -> Result<GmFamily> {
    let parts = branches(m)?
        .into_iter()
        .map(enumerate_branch)
        .collect::<Result<Vec<_>>>()?;
    Ok(GmFamily::from_parts(m, parts))
}

/// Exhaustive scan over every labelled `(L, E)` with at most `max_vars`
/// variables, literal membership test, then deduplication.
pub fn enumerate_naive(m: u32, max_vars: usize) -> Result<GmFamily> {
    if m == 0 {
        return Err(Error::UnsupportedM(m));
    }
    let mut family = GmFamily::empty(m);
    for s in 1..=max_vars.min(MAX_CANON_VARS) {
        let pairs: Vec<(usize, usize)> =
            (0..s).flat_map(|i| (i + 1..s).map(move |j| (i, j))).collect();
        for linear in 1u64..1 << s {
            for edges in 0u64..1 << pairs.len() {
                let mut adj = vec![0u64; s];
                for (k, &(i, j)) in pairs.iter().enumerate() {
                    if edges >> k & 1 == 1 {
                        adj[i] |= 1 << j;
                        adj[j] |= 1 << i;
                    }
                }
                let Ok(g) = GPolynomial::from_masks(s, linear, &adj) else {
                    continue;
                };
                if gm_membership(&g, m) {
                    let key = canonical_key(&g)?;
                    family.members.entry(key).or_insert(g);
                }
            }
        }
    }
    Ok(family)
}

/// Structural maxima over the members of a family.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MaxStructure {
    pub num_vars: usize,
    pub linear: usize,
    pub degree: usize,
}

pub fn max_structure_stats(family: &GmFamily) -> MaxStructure {
    family.members.values().fold(MaxStructure::default(), |acc, g| MaxStructure {
        num_vars: acc.num_vars.max(g.num_vars()),
        linear: acc.linear.max(g.linear_count()),
        degree: acc.degree.max(g.max_degree()),
    })
}
