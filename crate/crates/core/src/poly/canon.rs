//! Canonical keys for 0/1 polynomials under variable permutation.
//!
//! Vertices are coloured by iterated refinement of (linear flag, degree); a
//! key is the lexicographically least adjacency encoding over orderings that
//! list colour classes in canonical order. Isomorphisms preserve refined
//! colours, so restricting to such orderings loses nothing.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::GPolynomial;
use crate::error::{Error, Result};

/// Largest variable count accepted by [`canonical_key`].
pub const MAX_CANON_VARS: usize = 12;

/// Permutation-invariant encoding of a [`GPolynomial`].
///
/// Keys order by variable count, then number of linear terms, then the linear
/// flags and adjacency rows in canonical position order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    num_vars: u8,
    linear_count: u8,
    linear: u16,
    rows: [u16; MAX_CANON_VARS],
}

impl CanonicalKey {
    pub fn num_vars(&self) -> usize {
        self.num_vars as usize
    }

    pub fn linear_count(&self) -> usize {
        self.linear_count as usize
    }

    /// The canonical representative: variable `i` is the vertex at position `i`.
    pub fn to_polynomial(&self) -> GPolynomial {
        let n = self.num_vars();
        let mut adj = [0u64; MAX_CANON_VARS];
        for i in 0..n {
            for j in 0..i {
                if self.rows[i] >> j & 1 == 1 {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        GPolynomial::from_masks(n, u64::from(self.linear), &adj[..n])
            .expect("keys are only built from valid polynomials")
    }
}

/// Canonical key of `g`; at most [`MAX_CANON_VARS`] variables.
pub fn canonical_key(g: &GPolynomial) -> Result<CanonicalKey> {
    let n = g.num_vars();
    if n > MAX_CANON_VARS {
        return Err(Error::CapExceeded {
            what: "variables for canonical form",
            count: format!("{n}"),
            cap: format!("{MAX_CANON_VARS}"),
        });
    }
    let lin = g.linear_mask();
    let adj = g.adjacency();
    let colors = refine_colors(lin, &adj);
    let mut by_color: Vec<usize> = (0..n).collect();
    by_color.sort_by_key(|&v| colors[v]);
    let class_at: Vec<usize> = by_color.iter().map(|&v| colors[v]).collect();

    let mut linear = 0u16;
    for (pos, &v) in by_color.iter().enumerate() {
        if lin >> v & 1 == 1 {
            linear |= 1 << pos;
        }
    }

    let mut search = Search {
        adj: &adj,
        colors: &colors,
        class_at: &class_at,
        order: Vec::with_capacity(n),
        used: 0,
        rows: [0; MAX_CANON_VARS],
        best: None,
    };
    search.run(0);
    Ok(CanonicalKey {
        num_vars: n as u8,
        linear_count: lin.count_ones() as u8,
        linear,
        rows: search.best.expect("at least one ordering exists"),
    })
}

/// Colour refinement; colour indices come from sorted signatures, so they do
/// not depend on the input labelling.
fn refine_colors(lin: u64, adj: &[u64]) -> Vec<usize> {
    let n = adj.len();
    let initial: Vec<(bool, u32)> = (0..n)
        .map(|v| (lin >> v & 1 == 1, adj[v].count_ones()))
        .collect();
    let mut colors = rank(&initial);
    let mut classes = count_distinct(&colors);
    loop {
        let signatures: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nbr: Vec<usize> = (0..n)
                    .filter(|&u| adj[v] >> u & 1 == 1)
                    .map(|u| colors[u])
                    .collect();
                nbr.sort_unstable();
                (colors[v], nbr)
            })
            .collect();
        let next = rank(&signatures);
        let next_classes = count_distinct(&next);
        if next_classes == classes {
            return next;
        }
        colors = next;
        classes = next_classes;
    }
}

fn rank<T: Ord + Clone>(items: &[T]) -> Vec<usize> {
    let mut distinct = items.to_vec();
    distinct.sort();
    distinct.dedup();
    items
        .iter()
        .map(|x| distinct.binary_search(x).expect("present"))
        .collect()
}

fn count_distinct(colors: &[usize]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m + 1)
}

struct Search<'a> {
    adj: &'a [u64],
    colors: &'a [usize],
    class_at: &'a [usize],
    order: Vec<usize>,
    used: u64,
    rows: [u16; MAX_CANON_VARS],
    best: Option<[u16; MAX_CANON_VARS]>,
}

impl Search<'_> {
    fn run(&mut self, pos: usize) {
        let n = self.adj.len();
        if pos == n {
            if self.best.is_none_or(|b| self.rows[..n] < b[..n]) {
                self.best = Some(self.rows);
            }
            return;
        }
        for v in 0..n {
            if self.used >> v & 1 == 1 || self.colors[v] != self.class_at[pos] {
                continue;
            }
            let row = self
                .order
                .iter()
                .enumerate()
                .filter(|(_, &u)| self.adj[v] >> u & 1 == 1)
                .fold(0u16, |r, (j, _)| r | 1 << j);
            self.rows[pos] = row;
            if let Some(best) = self.best {
                if self.rows[..=pos] > best[..=pos] {
                    continue;
                }
            }
            self.order.push(v);
            self.used |= 1 << v;
            self.run(pos + 1);
            self.used &= !(1 << v);
            self.order.pop();
        }
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:x}:", self.num_vars, self.linear)?;
        for (i, row) in self.rows[..self.num_vars()].iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{row:x}")?;
        }
        Ok(())
    }
}

impl FromStr for CanonicalKey {
    type Err = Error;

    /// Parses the `Display` form and re-canonicalises, so only genuine keys round-trip.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad canonical key {s:?}"));
        let mut parts = s.split(':');
        let n: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let lin = u16::from_str_radix(parts.next().ok_or_else(bad)?, 16).map_err(|_| bad())?;
        let rows_text = parts.next().ok_or_else(bad)?;
        if parts.next().is_some() || n == 0 || n > MAX_CANON_VARS {
            return Err(bad());
        }
        let mut rows = [0u16; MAX_CANON_VARS];
        let mut count = 0;
        for (i, r) in rows_text.split('.').enumerate() {
            if i >= n {
                return Err(bad());
            }
            rows[i] = u16::from_str_radix(r, 16).map_err(|_| bad())?;
            if rows[i] >> i != 0 {
                return Err(bad());
            }
            count += 1;
        }
        if count != n || lin >> n != 0 {
            return Err(bad());
        }
        let key = CanonicalKey {
            num_vars: n as u8,
            linear_count: lin.count_ones() as u8,
            linear: lin,
            rows,
        };
        let mut adj = [0u64; MAX_CANON_VARS];
        for i in 0..n {
            for j in 0..i {
                if rows[i] >> j & 1 == 1 {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        let g = GPolynomial::from_masks(n, u64::from(lin), &adj[..n]).map_err(|_| bad())?;
        if canonical_key(&g)? != key {
            return Err(bad());
        }
        Ok(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MultilinearPoly;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn g(n: usize, lin: &[usize], edges: &[(usize, usize)]) -> GPolynomial {
        GPolynomial::new(n, lin, edges).unwrap()
    }

    fn permute(g: &GPolynomial, perm: &[usize]) -> GPolynomial {
        GPolynomial::from_poly(g.poly().permuted(perm).unwrap()).unwrap()
    }

    #[test]
    fn swap_invariance_and_distinct_keys() {
        let a = g(3, &[0], &[(0, 1), (1, 2)]);
        let b = permute(&a, &[1, 0, 2]);
        assert_eq!(canonical_key(&a).unwrap(), canonical_key(&b).unwrap());

        let sum = g(2, &[0, 1], &[]);
        let with_edge = g(2, &[0], &[(0, 1)]);
        assert_ne!(canonical_key(&sum).unwrap(), canonical_key(&with_edge).unwrap());
    }

    #[test]
    fn four_classes_for_m_two() {
        let reps = [
            g(1, &[0], &[]),
            g(2, &[0, 1], &[]),
            g(2, &[0, 1], &[(0, 1)]),
            g(2, &[0], &[(0, 1)]),
        ];
        let mut keys: Vec<_> = reps.iter().map(|r| canonical_key(r).unwrap()).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 4);
    }

    #[test]
    fn representative_has_the_same_key() {
        let a = g(5, &[1, 2, 3, 4], &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let key = canonical_key(&a).unwrap();
        assert_eq!(canonical_key(&key.to_polynomial()).unwrap(), key);
        assert_eq!(key.to_string().parse::<CanonicalKey>().unwrap(), key);
        assert!("13:0:0".parse::<CanonicalKey>().is_err());
    }

    #[test]
    fn too_many_variables() {
        let lin: Vec<usize> = (0..13).collect();
        let big = g(13, &lin, &[]);
        assert!(canonical_key(&big).unwrap_err().is_resource());
    }

    #[test]
    fn regular_graphs_with_equal_refined_colours() {
        // C6 vs two triangles: both 2-regular, no linear terms on the cycle
        // vertices, so refinement cannot separate them; the search must.
        let cycle = g(
            7,
            &[6],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (6, 0), (6, 1), (6, 2), (6, 3), (6, 4), (6, 5)],
        );
        let triangles = g(
            7,
            &[6],
            &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (6, 0), (6, 1), (6, 2), (6, 3), (6, 4), (6, 5)],
        );
        assert_ne!(canonical_key(&cycle).unwrap(), canonical_key(&triangles).unwrap());
    }

    /// Brute-force isomorphism test over all permutations.
    fn isomorphic(a: &GPolynomial, b: &GPolynomial) -> bool {
        let n = a.num_vars();
        if n != b.num_vars() {
            return false;
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let target = b.poly().clone();
        heap_permutations(&mut perm, n, &mut |p| a.poly().permuted(p).unwrap() == target)
    }

    fn heap_permutations(p: &mut Vec<usize>, k: usize, hit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if k <= 1 {
            return hit(p);
        }
        for i in 0..k {
            if heap_permutations(p, k - 1, hit) {
                return true;
            }
            let j = if k.is_multiple_of(2) { i } else { 0 };
            p.swap(j, k - 1);
        }
        false
    }

    fn arb_g(max_vars: usize) -> impl Strategy<Value = GPolynomial> {
        (1..=max_vars, any::<u64>(), any::<u64>()).prop_filter_map("phantom variable", |(n, l, e)| {
            let lin: Vec<usize> = (0..n).filter(|i| l >> i & 1 == 1).collect();
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| e >> (k % 64) & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            GPolynomial::new(n, &lin, &edges).ok()
        })
    }

    proptest! {
        #[test]
        fn key_is_permutation_invariant(a in arb_g(9), seed in any::<u64>()) {
            let n = a.num_vars();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut state = seed | 1;
            for i in (1..n).rev() {
                state ^= state << 13; state ^= state >> 7; state ^= state << 17;
                perm.swap(i, (state % (i as u64 + 1)) as usize);
            }
            let b = permute(&a, &perm);
            prop_assert_eq!(canonical_key(&a).unwrap(), canonical_key(&b).unwrap());
        }

        #[test]
        fn equal_keys_iff_isomorphic(a in arb_g(5), b in arb_g(5)) {
            let same = canonical_key(&a).unwrap() == canonical_key(&b).unwrap();
            prop_assert_eq!(same, isomorphic(&a, &b));
        }
    }

    #[test]
    fn zero_poly_is_not_a_g_polynomial() {
        assert!(GPolynomial::from_poly(MultilinearPoly::zero(2)).is_err());
    }
}
