//! Agreement between independent routes to the same quantity.

use edgestat_core::constructions::{build_host, edge_count_dist, PartFamily};
use edgestat_core::dist::{bernoulli_value_dist, binmax, slice_value_dist, SliceSpec, WeightProfile};
use edgestat_core::gm::enumerate_gm;
use edgestat_core::poly::{gm_membership, gm_membership_by_structure, parse_poly};
use edgestat_core::rational::{binomial, int, pow, rat};
use edgestat_core::verify::{reduction_bound, ProfileTable};
use edgestat_core::{Caps, MultilinearPoly, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn caps() -> Caps {
    Caps::default()
}

fn choose(n: u64, k: u64) -> Rational {
    Rational::from_integer(BigInt::from(binomial(n, k)))
}

#[test]
fn family_counts_and_membership_routes_agree() {
    for (m, count) in [(2, 4), (3, 16), (4, 99)] {
        let family = enumerate_gm(m).unwrap();
        assert_eq!(family.len(), count);
        for (_, g) in family.members() {
            assert!(gm_membership(g, m) && gm_membership_by_structure(g, m));
            assert!(gm_membership(g, m + 1));
        }
    }
}

#[test]
fn bernoulli_law_is_a_binomial_mixture_of_slice_laws() {
    let f = parse_poly("x1 + x2*x3 - x3 + 2*x1*x4 + x5").unwrap();
    let n = f.num_vars() as u64;
    let p = rat(2, 7);
    let q = Rational::one() - &p;
    let direct = bernoulli_value_dist(&f, &p, &caps()).unwrap();
    let mut mixed = std::collections::BTreeMap::<i64, Rational>::new();
    for k in 0..=n {
        let weight = choose(n, k) * pow(&p, k as u32) * pow(&q, (n - k) as u32);
        let slice = slice_value_dist(&f, SliceSpec::new(n as usize, k as usize).unwrap(), &caps()).unwrap();
        for (v, mass) in slice.iter() {
            *mixed.entry(v).or_insert_with(Rational::zero) += &weight * mass;
        }
    }
    for (v, mass) in &mixed {
        assert_eq!(&direct.prob(*v), mass, "value {v}");
    }
    assert_eq!(direct.len(), mixed.values().filter(|m| !m.is_zero()).count());
}

#[test]
fn weight_profile_matches_direct_enumeration() {
    let f = parse_poly("x1 + x2 + x3 + x1*x2 + x2*x3").unwrap();
    let profile = WeightProfile::of(&f, &caps()).unwrap();
    for p in [rat(1, 3), rat(1, 2), rat(97, 250)] {
        let direct = bernoulli_value_dist(&f, &p, &caps()).unwrap();
        assert_eq!(profile.to_dist(&p), direct);
    }
}

#[test]
fn reduction_bound_at_one_third_is_the_binomial_mode() {
    // C(5,2) (1/3)^2 (2/3)^3 = 80/243, attained by the five-variable star family.
    let r = reduction_bound(5, &rat(1, 3), 2, &caps()).unwrap();
    assert_eq!(r.bound, rat(80, 243));
    assert_eq!(binmax(5, &rat(1, 3)), rat(80, 243));
    let table = ProfileTable::for_m(4, &caps()).unwrap();
    assert_eq!(table.family_size(), 99);
}

#[test]
fn goodman_host_matches_the_hypergeometric_count() {
    // Two cliques of n/2: a triple spans one edge unless it lies inside one clique.
    for n in [12usize, 24, 48] {
        let host = build_host(&PartFamily::two_cliques(), n).unwrap();
        let d = edge_count_dist(&host, 3, &caps()).unwrap();
        let half = (n / 2) as u64;
        let inside = choose(half, 3) * int(2) / choose(n as u64, 3);
        assert_eq!(d.prob(3), inside);
        assert_eq!(d.prob(1), Rational::one() - inside);
    }
}

fn small_poly() -> impl Strategy<Value = MultilinearPoly> {
    (1usize..=6, proptest::collection::vec(-2i64..=2, 28)).prop_map(|(n, c)| {
        let mut f = MultilinearPoly::zero(n);
        f.add_constant(c[0]);
        let mut idx = 1;
        for i in 0..n {
            f.add_linear(i, c[idx]).unwrap();
            idx += 1;
        }
        for i in 0..n {
            for j in i + 1..n {
                f.add_quadratic(i, j, c[idx % 28]).unwrap();
                idx += 1;
            }
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn slice_laws_sum_to_one_and_match_mixture(f in small_poly(), a in 1i64..10, b in 10i64..20) {
        let p = rat(a, b);
        let n = f.num_vars();
        let direct = bernoulli_value_dist(&f, &p, &caps()).unwrap();
        let q = Rational::one() - &p;
        let mut total = Rational::zero();
        for k in 0..=n {
            let slice = slice_value_dist(&f, SliceSpec::new(n, k).unwrap(), &caps()).unwrap();
            prop_assert_eq!(slice.total(), Rational::one());
            let w = choose(n as u64, k as u64) * pow(&p, k as u32) * pow(&q, (n - k) as u32);
            total += w * slice.prob(f.constant());
        }
        prop_assert_eq!(total, direct.prob(f.constant()));
    }
}
