//! Multilinear polynomials of degree at most two with integer coefficients,
//! and the restricted family with 0/1 coefficients used by the reduction
//! to a finite check.

mod canon;
mod text;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::Caps;

pub use canon::{canonical_key, CanonicalKey, MAX_CANON_VARS};
pub use text::parse_poly;

/// `constant + Σ linear[i]·x_i + Σ quadratic[{i,j}]·x_i·x_j` over `num_vars` slots.
///
/// Zero coefficients are never stored and quadratic keys are ordered pairs `(i, j)` with `i < j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultilinearPoly {
    num_vars: usize,
    constant: i64,
    linear: BTreeMap<usize, i64>,
    quadratic: BTreeMap<(usize, usize), i64>,
}

impl MultilinearPoly {
    /// The zero polynomial in `num_vars` variables.
    pub fn zero(num_vars: usize) -> Self {
        MultilinearPoly {
            num_vars,
            ..Default::default()
        }
    }

    pub fn from_terms(
        num_vars: usize,
        constant: i64,
        linear: impl IntoIterator<Item = (usize, i64)>,
        quadratic: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self> {
        let mut poly = MultilinearPoly::zero(num_vars);
        poly.constant = constant;
        for (i, c) in linear {
            poly.add_linear(i, c)?;
        }
        for (i, j, c) in quadratic {
            poly.add_quadratic(i, j, c)?;
        }
        Ok(poly)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constant(&self) -> i64 {
        self.constant
    }

    pub fn linear(&self) -> &BTreeMap<usize, i64> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), i64> {
        &self.quadratic
    }

    pub fn linear_coeff(&self, i: usize) -> i64 {
        self.linear.get(&i).copied().unwrap_or(0)
    }

    pub fn quadratic_coeff(&self, i: usize, j: usize) -> i64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key).copied().unwrap_or(0)
    }

    /// Number of nonzero linear terms.
    pub fn linear_term_count(&self) -> usize {
        self.linear.len()
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0 && self.linear.is_empty() && self.quadratic.is_empty()
    }

    /// True when every coefficient, the constant included, is non-negative.
    pub fn is_nonnegative(&self) -> bool {
        self.constant >= 0
            && self.linear.values().all(|&c| c >= 0)
            && self.quadratic.values().all(|&c| c >= 0)
    }

    /// True when variable `i` occurs in some term.
    pub fn uses_var(&self, i: usize) -> bool {
        self.linear.contains_key(&i) || self.quadratic.keys().any(|&(a, b)| a == i || b == i)
    }

    /// Largest variable index occurring in a term, plus one.
    pub fn support_len(&self) -> usize {
        let lin = self.linear.keys().next_back().map_or(0, |&i| i + 1);
        let quad = self.quadratic.keys().map(|&(_, j)| j + 1).max().unwrap_or(0);
        lin.max(quad)
    }

    pub fn add_constant(&mut self, c: i64) {
        self.constant += c;
    }

    pub fn add_linear(&mut self, i: usize, c: i64) -> Result<()> {
        self.check_index(i)?;
        accumulate(&mut self.linear, i, c);
        Ok(())
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, c: i64) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::InvalidInput(format!(
                "quadratic term x{0}*x{0} is not multilinear",
                i + 1
            )));
        }
        let key = if i < j { (i, j) } else { (j, i) };
        accumulate(&mut self.quadratic, key, c);
        Ok(())
    }

    /// Same polynomial viewed in `num_vars` slots; fails if a used variable would be dropped.
    pub fn with_num_vars(&self, num_vars: usize) -> Result<Self> {
        if self.support_len() > num_vars {
            return Err(Error::VariableOutOfRange {
                index: self.support_len() - 1,
                num_vars,
            });
        }
        let mut out = self.clone();
        out.num_vars = num_vars;
        Ok(out)
    }

    /// Image under the variable relabelling `i ↦ perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_vars {
            return Err(Error::InvalidInput(format!(
                "permutation of length {} for {} variables",
                perm.len(),
                self.num_vars
            )));
        }
        let mut seen = vec![false; self.num_vars];
        for &p in perm {
            if p >= self.num_vars || core::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
        }
        MultilinearPoly::from_terms(
            self.num_vars,
            self.constant,
            self.linear.iter().map(|(&i, &c)| (perm[i], c)),
            self.quadratic.iter().map(|(&(i, j), &c)| (perm[i], perm[j], c)),
        )
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.num_vars {
            Ok(())
        } else {
            Err(Error::VariableOutOfRange {
                index: i,
                num_vars: self.num_vars,
            })
        }
    }

    /// Value at a 0/1 assignment of length `num_vars`.
    pub fn evaluate(&self, assignment: &[bool]) -> Result<i64> {
        if assignment.len() != self.num_vars {
            return Err(Error::AssignmentLength {
                expected: self.num_vars,
                got: assignment.len(),
            });
        }
        let lin: i64 = self
            .linear
            .iter()
            .filter(|(&i, _)| assignment[i])
            .map(|(_, &c)| c)
            .sum();
        let quad: i64 = self
            .quadratic
            .iter()
            .filter(|(&(i, j), _)| assignment[i] && assignment[j])
            .map(|(_, &c)| c)
            .sum();
        Ok(self.constant + lin + quad)
    }

    /// Fixes `x_i = bit` and removes slot `i`; variables above `i` shift down by one.
    pub fn substitute(&self, i: usize, bit: bool) -> Result<Self> {
        self.check_index(i)?;
        let shift = |v: usize| if v > i { v - 1 } else { v };
        let mut out = MultilinearPoly::zero(self.num_vars - 1);
        out.constant = self.constant;
        for (&v, &c) in &self.linear {
            if v == i {
                if bit {
                    out.constant += c;
                }
            } else {
                accumulate(&mut out.linear, shift(v), c);
            }
        }
        for (&(a, b), &c) in &self.quadratic {
            if a == i || b == i {
                if bit {
                    let other = if a == i { b } else { a };
                    accumulate(&mut out.linear, shift(other), c);
                }
            } else {
                accumulate(&mut out.quadratic, (shift(a), shift(b)), c);
            }
        }
        Ok(out)
    }

    /// Every value taken on `{0,1}^num_vars`.
    pub fn achievable_values(&self, caps: &Caps) -> Result<BTreeSet<i64>> {
        caps.check_assignments(self.num_vars)?;
        let mut values = BTreeSet::new();
        Compiled::new(self).for_each_assignment(|_, _, v| {
            values.insert(v);
        });
        Ok(values)
    }
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, i64>, key: K, c: i64) {
    if c == 0 {
        return;
    }
    let sum = map.get(&key).copied().unwrap_or(0) + c;
    if sum == 0 {
        map.remove(&key);
    } else {
        map.insert(key, sum);
    }
}

/// Dense form used by the assignment enumerators.
pub(crate) struct Compiled {
    pub(crate) num_vars: usize,
    constant: i64,
    linear: Vec<i64>,
    neighbors: Vec<Vec<(usize, i64)>>,
}

impl Compiled {
    pub(crate) fn new(poly: &MultilinearPoly) -> Self {
        let n = poly.num_vars;
        let mut linear = vec![0; n];
        let mut neighbors = vec![Vec::new(); n];
        for (&i, &c) in &poly.linear {
            linear[i] = c;
        }
        for (&(i, j), &c) in &poly.quadratic {
            neighbors[i].push((j, c));
            neighbors[j].push((i, c));
        }
        Compiled {
            num_vars: n,
            constant: poly.constant,
            linear,
            neighbors,
        }
    }

    /// Change in value from setting `v` to one, given the other ones in `chosen`.
    pub(crate) fn gain(&self, v: usize, chosen: &[bool]) -> i64 {
        self.linear[v]
            + self.neighbors[v]
                .iter()
                .filter(|(u, _)| chosen[*u])
                .map(|(_, c)| c)
                .sum::<i64>()
    }

    /// Visits `(mask, weight, value)` for all `2^n` assignments in Gray-code order.
    pub(crate) fn for_each_assignment(&self, mut visit: impl FnMut(u64, u32, i64)) {
        let n = self.num_vars;
        assert!(n < 64, "too many variables for mask enumeration");
        let mut mask = 0u64;
        let mut weight = 0u32;
        let mut value = self.constant;
        visit(mask, weight, value);
        for step in 1u64..(1u64 << n) {
            let j = step.trailing_zeros() as usize;
            let bit = 1u64 << j;
            mask ^= bit;
            let delta = self.linear[j]
                + self.neighbors[j]
                    .iter()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, c)| c)
                    .sum::<i64>();
            if mask & bit != 0 {
                value += delta;
                weight += 1;
            } else {
                value -= delta;
                weight -= 1;
            }
            visit(mask, weight, value);
        }
    }
}

/// Membership in the 0/1 family: no constant and every stored coefficient equal to 1.
///
/// The zero polynomial qualifies regardless of its slot count.
pub fn is_in_g_family(poly: &MultilinearPoly) -> bool {
    poly.constant == 0
        && poly.linear.values().all(|&c| c == 1)
        && poly.quadratic.values().all(|&c| c == 1)
}

/// Literal membership test for `G(m)`: every substitution `x_i = 1` must leave
/// the 0/1 family and keep fewer than `m` nonzero linear terms.
pub fn gm_membership_poly(poly: &MultilinearPoly, m: u32) -> bool {
    if poly.num_vars == 0 || !is_in_g_family(poly) {
        return false;
    }
    (0..poly.num_vars).all(|i| {
        let reduced = poly
            .substitute(i, true)
            .expect("index in range by construction");
        !is_in_g_family(&reduced) && reduced.linear_term_count() < m as usize
    })
}

/// A polynomial of the 0/1 family in which every variable occurs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GPolynomial {
    poly: MultilinearPoly,
}

impl GPolynomial {
    /// Largest slot count representable by the bitmask views.
    pub const MAX_VARS: usize = 64;

    pub fn new(num_vars: usize, linear: &[usize], edges: &[(usize, usize)]) -> Result<Self> {
        let poly = MultilinearPoly::from_terms(
            num_vars,
            0,
            linear.iter().map(|&i| (i, 1)),
            edges.iter().map(|&(i, j)| (i, j, 1)),
        )?;
        Self::from_poly(poly)
    }

    pub fn from_poly(poly: MultilinearPoly) -> Result<Self> {
        if poly.num_vars == 0 || poly.num_vars > Self::MAX_VARS {
            return Err(Error::InvalidInput(format!(
                "0/1 polynomials need 1..={} variables, got {}",
                Self::MAX_VARS,
                poly.num_vars
            )));
        }
        if !is_in_g_family(&poly) {
            return Err(Error::InvalidInput(
                "coefficients must all be 1 with no constant term".into(),
            ));
        }
        if let Some(i) = (0..poly.num_vars).find(|&i| !poly.uses_var(i)) {
            return Err(Error::InvalidInput(format!("variable x{} occurs in no term", i + 1)));
        }
        Ok(GPolynomial { poly })
    }

    pub(crate) fn from_masks(num_vars: usize, linear: u64, adjacency: &[u64]) -> Result<Self> {
        let mut poly = MultilinearPoly::zero(num_vars);
        for (i, row) in adjacency.iter().enumerate().take(num_vars) {
            if linear >> i & 1 == 1 {
                poly.linear.insert(i, 1);
            }
            for j in i + 1..num_vars {
                if row >> j & 1 == 1 {
                    poly.quadratic.insert((i, j), 1);
                }
            }
        }
        Self::from_poly(poly)
    }

    pub fn poly(&self) -> &MultilinearPoly {
        &self.poly
    }

    pub fn into_poly(self) -> MultilinearPoly {
        self.poly
    }

    pub fn num_vars(&self) -> usize {
        self.poly.num_vars
    }

    /// Bitmask of the variables with a linear term.
    pub fn linear_mask(&self) -> u64 {
        self.poly.linear.keys().fold(0, |m, &i| m | 1 << i)
    }

    /// Neighbourhood bitmasks of the quadratic-term graph.
    pub fn adjacency(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.poly.num_vars];
        for &(i, j) in self.poly.quadratic.keys() {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        adj
    }

    pub fn linear_count(&self) -> usize {
        self.poly.linear.len()
    }

    /// Largest number of quadratic terms containing one variable.
    pub fn max_degree(&self) -> usize {
        self.adjacency()
            .iter()
            .map(|a| a.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }
}

/// Literal `G(m)` membership, via substitution.
pub fn gm_membership(g: &GPolynomial, m: u32) -> bool {
    gm_membership_poly(&g.poly, m)
}

/// Graph form of `G(m)` membership: every `i` lies in `L` or has a neighbour in
/// `L`, and `|(L ∪ N(i)) \ {i}| ≤ m - 1`.
pub fn gm_membership_by_structure(g: &GPolynomial, m: u32) -> bool {
    let lin = g.linear_mask();
    g.adjacency().iter().enumerate().all(|(i, &nbrs)| {
        let bit = 1u64 << i;
        let covered = lin & bit != 0 || nbrs & lin != 0;
        let reach = ((lin | nbrs) & !bit).count_ones();
        covered && reach < m
    })
}
