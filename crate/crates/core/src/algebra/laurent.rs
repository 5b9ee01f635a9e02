//! Laurent polynomials in `x`, used as exponential arguments `e^{g(x)}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::FieldElement;
use super::poly::Polynomial;
use super::ratfunc::RationalFunction;
use crate::error::{Error, Result};

/// Sparse map exponent -> coefficient; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentPolynomial {
    terms: BTreeMap<i64, FieldElement>,
}

impl LaurentPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: FieldElement, k: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        LaurentPolynomial { terms }
    }

    /// `c * x`
    pub fn linear(c: FieldElement) -> Self {
        Self::monomial(c, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, FieldElement)>>(it: I) -> Self {
        let mut out = Self::zero();
        for (k, c) in it {
            out.add_term(k, &c);
        }
        out
    }

    pub fn from_poly(p: &Polynomial) -> Self {
        Self::from_terms(p.coeffs().iter().enumerate().map(|(k, c)| (k as i64, c.clone())))
    }

    /// Accepts a rational function whose denominator is a power of `x`.
    pub fn from_rational_function(f: &RationalFunction) -> Result<Self> {
        let v = f.den().valuation().unwrap_or(0);
        let den_is_power = f.den().degree() == Some(v) && f.den().lead().is_one();
        if !den_is_power {
            return Err(Error::InvalidParams(format!("{f} is not a Laurent polynomial")));
        }
        Ok(Self::from_terms(
            f.num().coeffs().iter().enumerate().map(|(k, c)| (k as i64 - v as i64, c.clone())),
        ))
    }

    fn add_term(&mut self, k: i64, c: &FieldElement) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_default();
        *e = &*e + c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &FieldElement)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: i64) -> FieldElement {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> FieldElement {
        self.coeff(0)
    }

    pub fn without_constant(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&0);
        out
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, a)| (*k, a * c)))
    }

    pub fn derivative(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|(k, _)| **k != 0)
                .map(|(k, c)| (k - 1, c * &FieldElement::from_i64(*k))),
        )
    }

    pub fn to_rational_function(&self) -> RationalFunction {
        let shift = (-self.min_exponent().unwrap_or(0)).max(0);
        let top = self.terms.keys().last().copied().unwrap_or(0) + shift;
        let mut coeffs = vec![FieldElement::zero(); top as usize + 1];
        for (k, c) in &self.terms {
            coeffs[(k + shift) as usize] = c.clone();
        }
        let den = Polynomial::monomial(FieldElement::one(), shift as usize);
        RationalFunction::new(Polynomial::new(coeffs), den).expect("nonzero denominator")
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        self.terms.iter().map(|(k, c)| c.to_c64() * x.powi(*k as i32)).sum()
    }

    /// Radicand of the extension any coefficient lives in.
    pub fn radicand(&self) -> Option<&super::field::GaussRat> {
        self.terms.values().find_map(FieldElement::radicand)
    }
}

impl<'a> Add<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn add(self, o: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(*k, c);
        }
        out
    }
}

impl<'a> Sub<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn sub(self, o: &LaurentPolynomial) -> LaurentPolynomial {
        self + &-o
    }
}

impl<'a> Mul<&'a LaurentPolynomial> for &'a LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn mul(self, o: &LaurentPolynomial) -> LaurentPolynomial {
        let mut out = LaurentPolynomial::zero();
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                out.add_term(i + j, &(a * b));
            }
        }
        out
    }
}

impl Neg for &LaurentPolynomial {
    type Output = LaurentPolynomial;
    fn neg(self) -> LaurentPolynomial {
        LaurentPolynomial { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*x")?,
                _ => write!(f, "{c}*x^{k}")?,
            }
        }
        Ok(())
    }
}

/// JSON: object keyed by exponent, e.g. `{"1": {"re":"2","im":"0"}, "-1": ...}`.
impl Serialize for LaurentPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, &FieldElement> =
            self.terms.iter().map(|(k, c)| (k.to_string(), c)).collect();
        m.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = BTreeMap::<String, FieldElement>::deserialize(d)?;
        let mut terms = Vec::new();
        for (k, c) in m {
            let k: i64 = k.parse().map_err(serde::de::Error::custom)?;
            terms.push((k, c));
        }
        Ok(LaurentPolynomial::from_terms(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_drops_constant() {
        // x^3/3 - s x + 5 + 2/x
        let g = LaurentPolynomial::from_terms([
            (3, FieldElement::from_ratio(1, 3)),
            (1, FieldElement::from_i64(-7)),
            (0, FieldElement::from_i64(5)),
            (-1, FieldElement::from_i64(2)),
        ]);
        let dg = g.derivative();
        assert_eq!(dg.coeff(2), FieldElement::one());
        assert_eq!(dg.coeff(0), FieldElement::from_i64(-7));
        assert_eq!(dg.coeff(-2), FieldElement::from_i64(-2));
        assert_eq!(dg.terms().count(), 3);
    }

    #[test]
    fn rational_function_round_trip() {
        let g = LaurentPolynomial::from_terms([
            (2, FieldElement::from_i64(1)),
            (-2, FieldElement::from_ratio(3, 4)),
        ]);
        let f = g.to_rational_function();
        assert_eq!(LaurentPolynomial::from_rational_function(&f).unwrap(), g);
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(serde_json::from_str::<LaurentPolynomial>(&json).unwrap(), g);
    }

    #[test]
    fn cancellation_removes_terms() {
        let a = LaurentPolynomial::linear(FieldElement::from_i64(2));
        assert!((&a - &a).is_zero());
    }
}
