mod common;

use common::*;
use heunops::algebra::{LaurentPolynomial, RationalFunction};
use heunops::diffop::DiffOp;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// Composition agrees with applying the factors one after the other.
    #[test]
    fn compose_matches_sequential_application(a in diffop(2, 2), b in diffop(2, 2), f in ratfunc(2)) {
        let ab = a.compose(&b);
        prop_assert_eq!(ab.apply(&f), a.apply(&b.apply(&f)));
    }

    /// `[f d, g d] = (f g' - g f') d`
    #[test]
    fn commutator_of_first_order_monomials(f in ratfunc(2), g in ratfunc(2)) {
        let zero = RationalFunction::zero();
        let a = DiffOp::new(vec![zero.clone(), f.clone()]);
        let b = DiffOp::new(vec![zero.clone(), g.clone()]);
        let want = DiffOp::new(vec![zero, &(&f * &g.derivative()) - &(&g * &f.derivative())]);
        prop_assert_eq!(a.commutator(&b), want);
    }

    /// `[d^2, f] = f'' + 2 f' d`
    #[test]
    fn commutator_with_second_derivative(f in ratfunc(3)) {
        let c = DiffOp::d_pow(2).commutator(&DiffOp::multiplication(f.clone()));
        let two_fp = &f.derivative() + &f.derivative();
        prop_assert_eq!(c, DiffOp::new(vec![f.nth_derivative(2), two_fp]));
    }

    #[test]
    fn jacobi_identity(a in diffop(1, 2), b in diffop(1, 2), c in diffop(1, 2)) {
        let t1 = a.commutator(&b.commutator(&c));
        let t2 = b.commutator(&c.commutator(&a));
        let t3 = c.commutator(&a.commutator(&b));
        prop_assert!((&(&t1 + &t2) + &t3).is_zero());
    }

    #[test]
    fn gauge_transform_inverts(a in diffop(2, 2), c1 in small_rational(), cm1 in small_rational(), c2 in small_rational()) {
        let g = LaurentPolynomial::from_terms([(1, c1), (-1, cm1), (2, c2)]);
        let back = a.gauge_transform(&g).gauge_transform(&g.scale(&fe(-1, 1)));
        prop_assert_eq!(back, a.clone());
        // gauge transforms are algebra automorphisms
        let b = DiffOp::d();
        prop_assert_eq!(
            a.compose(&b).gauge_transform(&g),
            a.gauge_transform(&g).compose(&b.gauge_transform(&g))
        );
    }

    #[test]
    fn monic_order2_invariants(p in monic_order2()) {
        prop_assert!(p.is_monic() || p.order() < 2);
        prop_assert_eq!(p.monic(), p.clone());
    }

    #[test]
    fn json_round_trip(a in diffop(3, 3)) {
        let s = serde_json::to_string(&a).unwrap();
        let back: DiffOp = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, a);
    }
}

#[test]
fn leading_zero_coefficients_are_trimmed() {
    let op = DiffOp::new(vec![RationalFunction::one(), RationalFunction::zero()]);
    assert_eq!(op.order(), 0);
    assert!(DiffOp::new(vec![]).is_zero());
}
