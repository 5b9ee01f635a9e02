#![allow(dead_code)]

use heunops::algebra::{rat, FieldElement, GaussRat, Polynomial, RationalFunction};
use heunops::diffop::DiffOp;
use proptest::prelude::*;

pub fn fe(n: i64, d: i64) -> FieldElement {
    FieldElement::from_ratio(n, d)
}

pub fn small_rational() -> impl Strategy<Value = FieldElement> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| fe(n, d))
}

pub fn gauss() -> impl Strategy<Value = GaussRat> {
    ((-9i64..=9, 1i64..=5), (-9i64..=9, 1i64..=5)).prop_map(|((a, b), (c, d))| GaussRat::new(rat(a, b), rat(c, d)))
}

/// Elements of Q(i)(sqrt 2), which is a field since 2 is not a square there.
pub fn ext_element() -> impl Strategy<Value = FieldElement> {
    (gauss(), gauss()).prop_map(|(a, b)| FieldElement::with_ext(a, b, GaussRat::from_i64(2)))
}

pub fn poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(small_rational(), 1..=max_deg + 1).prop_map(Polynomial::new)
}

pub fn nonzero_poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
    poly(max_deg).prop_filter("nonzero", |p| !p.is_zero())
}

pub fn ratfunc(max_deg: usize) -> impl Strategy<Value = RationalFunction> {
    (poly(max_deg), nonzero_poly(max_deg)).prop_map(|(n, d)| RationalFunction::new(n, d).unwrap())
}

pub fn monic_order2() -> impl Strategy<Value = DiffOp> {
    (ratfunc(4), ratfunc(4)).prop_map(|(p1, p0)| DiffOp::monic2(p1, p0))
}

pub fn diffop(max_order: usize, max_deg: usize) -> impl Strategy<Value = DiffOp> {
    prop::collection::vec(ratfunc(max_deg), 1..=max_order + 1).prop_map(DiffOp::new)
}
