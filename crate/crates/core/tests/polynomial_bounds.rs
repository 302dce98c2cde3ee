mod common;

use common::{
    from_ints, positive_roots_with_multiplicity, real_roots_with_multiplicity, roots_outside, Poly,
};
use num_traits::{One, Signed, Zero};
use onebit_core::rational::{integer, ratio};
use onebit_core::{
    cauchy_root_radius, cauchy_root_radius_kappa, descartes_positive_root_bound, Rational,
    SignedCoefficientSequence, SparseSignal,
};
use proptest::prelude::*;

fn mul(a: &[Rational], b: &[Rational]) -> Poly {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Π (r − root)` times an irreducible quadratic factor when `pad` is set.
fn from_roots(roots: &[Rational], pad: bool) -> Poly {
    let mut p = vec![Rational::one()];
    for r in roots {
        p = mul(&p, &[-r.clone(), Rational::one()]);
    }
    if pad {
        p = mul(&p, &from_ints(&[1, 0, 1]));
    }
    p
}

fn seq(p: &[Rational]) -> SignedCoefficientSequence {
    SignedCoefficientSequence::from_polynomial(p).unwrap()
}

#[test]
fn oracle_self_checks() {
    // (r−1)²(r−2)
    let p = from_ints(&[-2, 5, -4, 1]);
    assert_eq!(positive_roots_with_multiplicity(&p), 3);
    assert_eq!(real_roots_with_multiplicity(&p), 3);
    assert_eq!(real_roots_with_multiplicity(&from_ints(&[1, 0, 1])), 0);
    // (r+1)(r−3)
    let p = from_ints(&[-3, -2, 1]);
    assert_eq!(positive_roots_with_multiplicity(&p), 1);
    assert_eq!(real_roots_with_multiplicity(&p), 2);
    assert_eq!(roots_outside(&p, &integer(3)), 1);
    assert_eq!(roots_outside(&p, &ratio(7, 2)), 0);
    // r³ has a triple root at 0, which is not positive.
    let p = from_ints(&[0, 0, 0, 1]);
    assert_eq!(positive_roots_with_multiplicity(&p), 0);
    assert_eq!(real_roots_with_multiplicity(&p), 3);
}

#[test]
fn descartes_examples() {
    assert_eq!(descartes_positive_root_bound(&seq(&from_ints(&[2, -3, 1]))), 2);
    assert_eq!(descartes_positive_root_bound(&seq(&from_ints(&[1, 1, 1]))), 0);
    assert_eq!(descartes_positive_root_bound(&seq(&from_ints(&[-1, 1]))), 1);
}

#[test]
fn cauchy_examples() {
    assert_eq!(cauchy_root_radius(&seq(&from_ints(&[2, -3, 1]))), integer(4));
    assert_eq!(cauchy_root_radius(&seq(&from_ints(&[1, 1]))), integer(2));
    let c = SignedCoefficientSequence::new(vec![integer(3), integer(1)]).unwrap();
    assert_eq!(cauchy_root_radius_kappa(&c), integer(4));
}

#[test]
fn coefficient_sequence_rejects_zeros() {
    assert!(SignedCoefficientSequence::new(vec![]).is_err());
    assert!(SignedCoefficientSequence::new(vec![integer(1), integer(0)]).is_err());
    assert!(SignedCoefficientSequence::from_polynomial(&from_ints(&[0, 0])).is_err());
    let x = SparseSignal::new(6, [(1, integer(2)), (4, integer(-1))]).unwrap();
    let c = SignedCoefficientSequence::from_signal_on_support(&x, &[0, 1, 3, 4]).unwrap();
    assert_eq!(c.coeffs(), &[integer(2), integer(-1)]);
}

fn rational_root() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=4).prop_map(|(p, q)| ratio(p, q))
}

fn int_poly() -> impl Strategy<Value = Poly> {
    proptest::collection::vec(-20i64..=20, 1..=9)
        .prop_map(|c| from_ints(&c))
        .prop_filter("nonzero polynomial", |p| !p.is_empty())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// The oracle recovers root counts of polynomials built from known roots.
    #[test]
    fn oracle_counts_known_roots(roots in proptest::collection::vec(rational_root(), 0..=5), pad in any::<bool>()) {
        let p = from_roots(&roots, pad);
        let positive = roots.iter().filter(|r| r.is_positive()).count();
        prop_assert_eq!(positive_roots_with_multiplicity(&p), positive);
        prop_assert_eq!(real_roots_with_multiplicity(&p), roots.len());
    }

    #[test]
    fn descartes_bounds_positive_roots(p in int_poly()) {
        let bound = descartes_positive_root_bound(&seq(&p));
        let count = positive_roots_with_multiplicity(&p);
        prop_assert!(bound >= count);
        // The bound exceeds the count by an even number.
        prop_assert_eq!((bound - count) % 2, 0);
    }

    #[test]
    fn cauchy_contains_all_roots(p in int_poly()) {
        let c = seq(&p);
        let radius = cauchy_root_radius(&c);
        prop_assert_eq!(roots_outside(&p, &radius), 0);
        let kappa = cauchy_root_radius_kappa(&c);
        prop_assert!(kappa >= radius);
        prop_assert_eq!(roots_outside(&p, &kappa), 0);
    }

    #[test]
    fn sparse_polynomials_keep_their_sign_changes(roots in proptest::collection::vec(rational_root(), 1..=4)) {
        let p = from_roots(&roots, false);
        let c = seq(&p);
        prop_assert!(c.coeffs().iter().all(|v| !v.is_zero()));
        prop_assert!(descartes_positive_root_bound(&c) >= roots.iter().filter(|r| r.is_positive()).count());
        prop_assert!(c.leading().abs() == Rational::one());
    }
}
