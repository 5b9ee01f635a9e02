//! Exact scalars: Gaussian rationals, optionally adjoined with one square root.
//!
//! A [`FieldElement`] is `a + b*sqrt(d)` with `a, b, d` Gaussian rationals and
//! `d` not a square in `Q(i)`. Elements with `b = 0` are always stored in the
//! base field, so equality is structural.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let shift = r.numer().bits().max(r.denom().bits()) as i64 - 60;
        if shift <= 0 {
            return f64::NAN;
        }
        let n = (r.numer() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
fn rat_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Complex number with rational real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRat { re, im: BigRational::zero() }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::real(BigRational::from_integer(n.into()))
    }

    pub fn i() -> Self {
        GaussRat { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(GaussRat { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Square root inside `Q(i)`, when one exists.
    pub fn sqrt_exact(&self) -> Option<GaussRat> {
        if self.im.is_zero() {
            return if self.re.is_negative() {
                rat_sqrt(&-self.re.clone()).map(|s| GaussRat::new(BigRational::zero(), s))
            } else {
                rat_sqrt(&self.re).map(GaussRat::real)
            };
        }
        let modulus = rat_sqrt(&self.norm_sqr())?;
        let two = rat(2, 1);
        let x = rat_sqrt(&((&self.re + &modulus) / &two))?;
        let y = &self.im / (&two * &x);
        let root = GaussRat::new(x, y);
        (&root * &root == *self).then_some(root)
    }

    fn fmt_plain(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}*i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "({}-{}*i)", self.re, -self.im.clone())
                } else {
                    write!(f, "({}+{}*i)", self.re, self.im)
                }
            }
        }
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_plain(f)
    }
}

impl<'a> Add<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussRat> for &'a GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat::real(&self.re * &o.re);
        }
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}

/// Reduce a non-square `d` to a canonical representative `d'` with
/// `sqrt(d) = scale * sqrt(d')`: denominators cleared and rational-integer
/// square factors pulled out.
fn canonical_radicand(d: &GaussRat) -> (BigRational, GaussRat) {
    let l = d.re.denom().lcm(d.im.denom());
    let l2 = BigRational::from_integer(&l * &l);
    let a = (&d.re * &l2).to_integer();
    let b = (&d.im * &l2).to_integer();
    let g = a.gcd(&b);
    let mut square = BigInt::one();
    let mut rest = g.abs();
    let mut p = BigInt::from(2);
    // radicands here are small discriminants; bounded trial division is plenty
    let limit = BigInt::from(1_000_000);
    while &p * &p <= rest && p < limit {
        let p2 = &p * &p;
        while (&rest % &p2).is_zero() {
            rest /= &p2;
            square *= &p;
        }
        p += 1;
    }
    let s2 = BigRational::from_integer(&square * &square);
    let reduced = GaussRat::new(BigRational::from_integer(a) / &s2, BigRational::from_integer(b) / &s2);
    (BigRational::new(square, l), reduced)
}

/// The adjoined radical: `coeff * sqrt(d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ext {
    pub coeff: GaussRat,
    pub d: GaussRat,
}

/// Exact scalar `base + ext.coeff * sqrt(ext.d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FieldElement {
    base: GaussRat,
    ext: Option<Ext>,
}

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement::default()
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn from_i64(n: i64) -> Self {
        FieldElement { base: GaussRat::from_i64(n), ext: None }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn from_rational(r: BigRational) -> Self {
        FieldElement { base: GaussRat::real(r), ext: None }
    }

    pub fn from_gauss(g: GaussRat) -> Self {
        FieldElement { base: g, ext: None }
    }

    pub fn i() -> Self {
        Self::from_gauss(GaussRat::i())
    }

    /// Build `a + b*sqrt(d)`, folding into the base field when `b = 0` or `d`
    /// is a perfect square.
    pub fn with_ext(a: GaussRat, b: GaussRat, d: GaussRat) -> Self {
        if b.is_zero() {
            return Self::from_gauss(a);
        }
        if let Some(s) = d.sqrt_exact() {
            return Self::from_gauss(&a + &(&b * &s));
        }
        let (scale, d) = canonical_radicand(&d);
        let coeff = &b * &GaussRat::real(scale);
        FieldElement { base: a, ext: Some(Ext { coeff, d }) }
    }

    /// Principal square root of a base-field element, adjoining `sqrt(d)` if needed.
    pub fn sqrt(&self) -> Result<Self> {
        if self.ext.is_some() {
            return Err(Error::ExtensionTower);
        }
        Ok(Self::with_ext(GaussRat::default(), GaussRat::from_i64(1), self.base.clone()))
    }

    pub fn base(&self) -> &GaussRat {
        &self.base
    }

    pub fn ext(&self) -> Option<&Ext> {
        self.ext.as_ref()
    }

    pub fn radicand(&self) -> Option<&GaussRat> {
        self.ext.as_ref().map(|e| &e.d)
    }

    pub fn is_zero(&self) -> bool {
        self.ext.is_none() && self.base.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.ext.is_none() && self.base.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.ext.is_none() && self.base.is_real()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.base.re)
    }

    /// Integer value, if this is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational().filter(|r| r.is_integer()).map(|r| r.to_integer())
    }

    pub fn to_c64(&self) -> Complex64 {
        let mut z = self.base.to_c64();
        if let Some(e) = &self.ext {
            z += e.coeff.to_c64() * e.d.to_c64().sqrt();
        }
        z
    }

    /// Conjugate under `sqrt(d) -> -sqrt(d)`.
    pub fn ext_conj(&self) -> Self {
        FieldElement {
            base: self.base.clone(),
            ext: self.ext.as_ref().map(|e| Ext { coeff: -&e.coeff, d: e.d.clone() }),
        }
    }

    /// `x * conj(x)`, always a base-field element.
    pub fn ext_norm(&self) -> GaussRat {
        match &self.ext {
            None => &self.base * &self.base,
            Some(e) => &(&self.base * &self.base) - &(&(&e.coeff * &e.coeff) * &e.d),
        }
    }

    fn common_radicand<'a>(&'a self, o: &'a Self) -> Result<Option<&'a GaussRat>> {
        match (self.radicand(), o.radicand()) {
            (Some(a), Some(b)) if a != b => Err(Error::MixedExtensions(a.to_string(), b.to_string())),
            (Some(a), _) => Ok(Some(a)),
            (None, b) => Ok(b),
        }
    }

    fn ext_coeff(&self) -> GaussRat {
        self.ext.as_ref().map(|e| e.coeff.clone()).unwrap_or_default()
    }

    fn assemble(base: GaussRat, coeff: GaussRat, d: Option<&GaussRat>) -> Self {
        match d {
            Some(d) if !coeff.is_zero() => FieldElement {
                base,
                ext: Some(Ext { coeff, d: d.clone() }),
            },
            _ => FieldElement { base, ext: None },
        }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        let d = self.common_radicand(o)?;
        Ok(Self::assemble(&self.base + &o.base, &self.ext_coeff() + &o.ext_coeff(), d))
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        let d = self.common_radicand(o)?;
        Ok(Self::assemble(&self.base - &o.base, &self.ext_coeff() - &o.ext_coeff(), d))
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        let d = self.common_radicand(o)?;
        if self.ext.is_none() && o.ext.is_none() {
            return Ok(Self::from_gauss(&self.base * &o.base));
        }
        let d = d.expect("at least one operand carries the radical");
        let (a, b) = (&self.base, self.ext_coeff());
        let (c, e) = (&o.base, o.ext_coeff());
        let base = &(a * c) + &(&(&b * &e) * d);
        let coeff = &(a * &e) + &(&b * c);
        Ok(Self::assemble(base, coeff, Some(d)))
    }

    pub fn inv(&self) -> Result<Self> {
        match &self.ext {
            None => Ok(Self::from_gauss(self.base.inv()?)),
            Some(_) => {
                let n = self.ext_norm().inv()?;
                self.ext_conj().checked_mul(&Self::from_gauss(n))
            }
        }
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        self.checked_mul(&o.inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one();
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        acc
    }
}

macro_rules! field_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &FieldElement) -> FieldElement {
                self.$checked(o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: FieldElement) -> FieldElement {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, o: &FieldElement) -> FieldElement {
                (&self).$m(o)
            }
        }
    };
}

field_binop!(Add, add, checked_add);
field_binop!(Sub, sub, checked_sub);
field_binop!(Mul, mul, checked_mul);
field_binop!(Div, div, checked_div);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            base: -&self.base,
            ext: self.ext.as_ref().map(|e| Ext { coeff: -&e.coeff, d: e.d.clone() }),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl From<i64> for FieldElement {
    fn from(n: i64) -> Self {
        FieldElement::from_i64(n)
    }
}

impl From<BigRational> for FieldElement {
    fn from(r: BigRational) -> Self {
        FieldElement::from_rational(r)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.ext {
            None => write!(f, "{}", self.base),
            Some(e) => {
                if !self.base.is_zero() {
                    write!(f, "{}+", self.base)?;
                }
                if e.coeff.is_one() {
                    write!(f, "sqrt({})", e.d)
                } else {
                    write!(f, "{}*sqrt({})", e.coeff, e.d)
                }
            }
        }
    }
}

impl FromStr for FieldElement {
    type Err = Error;

    /// Accepts `p`, `p/q`; anything richer goes through the expression parser.
    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(FieldElement::from_rational)
    }
}

fn gauss_to_json(g: &GaussRat) -> serde_json::Value {
    serde_json::json!({ "re": g.re.to_string(), "im": g.im.to_string() })
}

fn gauss_from_json(v: &serde_json::Value) -> Result<GaussRat> {
    let part = |key: &str| -> Result<BigRational> {
        match v.get(key) {
            None => Ok(BigRational::zero()),
            Some(serde_json::Value::String(s)) => parse_rational(s),
            Some(serde_json::Value::Number(n)) => parse_rational(&n.to_string()),
            Some(other) => Err(Error::Json(format!("expected rational string, got {other}"))),
        }
    };
    Ok(GaussRat::new(part("re")?, part("im")?))
}

impl FieldElement {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = gauss_to_json(&self.base);
        if let Some(e) = &self.ext {
            v["ext"] = serde_json::json!([e.coeff.re.to_string(), e.coeff.im.to_string()]);
            v["d"] = gauss_to_json(&e.d);
        }
        v
    }

    /// Decode either the object form or a bare `"p/q"` string.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => s.parse(),
            serde_json::Value::Number(n) => n.to_string().parse(),
            serde_json::Value::Object(_) => {
                let base = gauss_from_json(v)?;
                match (v.get("ext"), v.get("d")) {
                    (None, None) => Ok(FieldElement::from_gauss(base)),
                    (Some(serde_json::Value::Array(ext)), Some(d)) if ext.len() == 2 => {
                        let coeff = GaussRat::new(
                            parse_rational(ext[0].as_str().unwrap_or_default())?,
                            parse_rational(ext[1].as_str().unwrap_or_default())?,
                        );
                        Ok(FieldElement::with_ext(base, coeff, gauss_from_json(d)?))
                    }
                    _ => Err(Error::Json("field element: ext and d must appear together".into())),
                }
            }
            other => Err(Error::Json(format!("not a field element: {other}"))),
        }
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = self.to_json();
        let obj = v.as_object().expect("object");
        let mut map = s.serialize_map(Some(obj.len()))?;
        for (k, val) in obj {
            map.serialize_entry(k, val)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for FieldElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        FieldElement::from_json(&v).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(n: i64, d: i64) -> FieldElement {
        FieldElement::from_ratio(n, d)
    }

    #[test]
    fn sqrt_of_square_stays_in_base_field() {
        assert_eq!(fe(9, 4).sqrt().unwrap(), fe(3, 2));
        assert_eq!(fe(-4, 1).sqrt().unwrap(), &fe(2, 1) * &FieldElement::i());
        // (1+2i)^2 = -3+4i
        let d = FieldElement::from_gauss(GaussRat::new(rat(-3, 1), rat(4, 1)));
        let s = d.sqrt().unwrap();
        assert!(s.ext().is_none());
        assert_eq!(&s * &s, d);
    }

    #[test]
    fn radicand_is_canonical() {
        // sqrt(8/9) = (2/3) sqrt(2)
        let s = fe(8, 9).sqrt().unwrap();
        assert_eq!(s.radicand(), Some(&GaussRat::from_i64(2)));
        assert_eq!(&s * &s, fe(8, 9));
        let t = fe(2, 1).sqrt().unwrap();
        assert_eq!(&s - &(&fe(2, 3) * &t), FieldElement::zero());
    }

    #[test]
    fn norm_of_extension_element_is_base() {
        let r5 = fe(5, 1).sqrt().unwrap();
        let x = &fe(1, 2) + &(&fe(3, 1) * &r5);
        let n = &x * &x.ext_conj();
        assert!(n.ext().is_none());
        assert_eq!(n, fe(1, 4) - fe(45, 1));
    }

    #[test]
    fn inverse_in_extension() {
        let r = fe(-7, 3).sqrt().unwrap();
        let x = &fe(2, 1) + &r;
        assert_eq!(&x * &x.inv().unwrap(), FieldElement::one());
    }

    #[test]
    fn mixed_extensions_are_rejected() {
        let a = fe(2, 1).sqrt().unwrap();
        let b = fe(3, 1).sqrt().unwrap();
        assert!(matches!(a.checked_add(&b), Err(Error::MixedExtensions(..))));
    }

    #[test]
    fn json_round_trip() {
        let x = &fe(1, 3) + &(&fe(-2, 5) * &fe(6, 1).sqrt().unwrap());
        let v = serde_json::to_value(&x).unwrap();
        assert_eq!(v["d"]["re"], "6");
        let back: FieldElement = serde_json::from_value(v).unwrap();
        assert_eq!(back, x);
        let y: FieldElement = serde_json::from_str("\"-7/21\"").unwrap();
        assert_eq!(y, fe(-1, 3));
    }

    #[test]
    fn numeric_embedding_uses_principal_root() {
        let z = fe(-4, 1).sqrt().unwrap().to_c64();
        assert!((z - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        let w = fe(-3, 1).sqrt().unwrap().to_c64();
        assert!((w - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-15);
    }
}
