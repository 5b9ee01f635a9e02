//! Reduced rational functions `num/den` with a monic denominator.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{FieldElement, GaussRat};
use super::poly::Polynomial;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g)?, den.exact_div(&g)?)
        };
        let lead = den.lead();
        if !lead.is_one() {
            let inv = lead.inv()?;
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn zero() -> Self {
        RationalFunction { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        Self::constant(FieldElement::one())
    }

    pub fn x() -> Self {
        Self::from_poly(Polynomial::x())
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn from_i64(n: i64) -> Self {
        Self::constant(FieldElement::from_i64(n))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction { num: p, den: Polynomial::one() }
    }

    /// `c / (x - pole)^k`
    pub fn pole_term(c: &FieldElement, pole: &FieldElement, k: usize) -> Self {
        Self::new(Polynomial::constant(c.clone()), Polynomial::linear(pole).pow(k))
            .expect("nonzero denominator")
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    pub fn as_constant(&self) -> Option<FieldElement> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    /// The quadratic extension any coefficient lives in, if any.
    pub fn radicand(&self) -> Option<GaussRat> {
        self.num
            .coeffs()
            .iter()
            .chain(self.den.coeffs())
            .find_map(|c| c.radicand().cloned())
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        if self.den == o.den {
            return Self::new(&self.num + &o.num, self.den.clone());
        }
        let g = self.den.gcd(&o.den);
        let a = o.den.exact_div(&g)?;
        let b = self.den.exact_div(&g)?;
        let num = &(&self.num * &a) + &(&o.num * &b);
        Self::new(num, &self.den * &a)
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self> {
        if self.is_zero() || o.is_zero() {
            return Ok(Self::zero());
        }
        // cross-cancel before multiplying to keep degrees down
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n1 = self.num.exact_div(&g1)?;
        let d2 = o.den.exact_div(&g1)?;
        let n2 = o.num.exact_div(&g2)?;
        let d1 = self.den.exact_div(&g2)?;
        Self::new(&n1 * &n2, &d1 * &d2)
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self> {
        self.checked_mul(&o.inv()?)
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: usize) -> Self {
        RationalFunction { num: self.num.pow(e), den: self.den.pow(e) }
    }

    pub fn derivative(&self) -> Self {
        if self.den.is_one() {
            return Self::from_poly(self.num.derivative());
        }
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::new(num, &self.den * &self.den).expect("nonzero denominator")
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |f, _| f.derivative())
    }

    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement> {
        let d = self.den.try_eval(x)?;
        if d.is_zero() {
            return Err(Error::Singular(format!("pole of {self} at {x}")));
        }
        self.num.try_eval(x)?.checked_div(&d)
    }

    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        self.num.eval_c64(x) / self.den.eval_c64(x)
    }

    /// `f(x + c)`
    pub fn shift(&self, c: &FieldElement) -> Self {
        RationalFunction { num: self.num.shift(c), den: self.den.shift(c) }
            .renormalized()
    }

    /// `f(1/t)` as a rational function of `t`.
    pub fn invert_variable(&self) -> Self {
        let n = self.num.degree().unwrap_or(0);
        let d = self.den.degree().unwrap_or(0);
        let m = n.max(d);
        let num = &self.num.reversed(n) * &Polynomial::monomial(FieldElement::one(), m - n);
        let den = &self.den.reversed(d) * &Polynomial::monomial(FieldElement::one(), m - d);
        Self::new(num, den).expect("nonzero denominator")
    }

    fn renormalized(self) -> Self {
        let lead = self.den.lead();
        if lead.is_one() {
            return self;
        }
        let inv = lead.inv().expect("nonzero");
        RationalFunction { num: self.num.scale(&inv), den: self.den.scale(&inv) }
    }

    /// Polynomial part and proper remainder.
    pub fn split_proper(&self) -> (Polynomial, RationalFunction) {
        let (q, r) = self.num.div_rem(&self.den).expect("nonzero denominator");
        (q, RationalFunction { num: r, den: self.den.clone() })
    }

    /// Order of the pole at `x0` (0 if analytic, negative for a zero).
    pub fn pole_order_at(&self, x0: &FieldElement) -> isize {
        if self.is_zero() {
            return isize::MIN;
        }
        let lin = Polynomial::linear(x0);
        let mult = |p: &Polynomial| {
            let mut k = 0isize;
            let mut q = p.clone();
            while let Ok((quot, r)) = q.div_rem(&lin) {
                if !r.is_zero() || q.is_zero() {
                    break;
                }
                q = quot;
                k += 1;
            }
            k
        };
        mult(&self.den) - mult(&self.num)
    }

    /// Degree of `num` minus degree of `den` (behaviour at infinity).
    pub fn degree_at_infinity(&self) -> isize {
        match self.num.degree() {
            None => isize::MIN,
            Some(n) => n as isize - self.den.degree().unwrap_or(0) as isize,
        }
    }
}

macro_rules! rf_binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $tr<&'a RationalFunction> for &'a RationalFunction {
            type Output = RationalFunction;
            fn $m(self, o: &RationalFunction) -> RationalFunction {
                self.$checked(o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, o: RationalFunction) -> RationalFunction {
                (&self).$m(&o)
            }
        }
    };
}

impl RationalFunction {
    pub fn checked_sub(&self, o: &Self) -> Result<Self> {
        self.checked_add(&-o)
    }
}

rf_binop!(Add, add, checked_add);
rf_binop!(Sub, sub, checked_sub);
rf_binop!(Mul, mul, checked_mul);
rf_binop!(Div, div, checked_div);

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RfJson {
    num: Polynomial,
    den: Polynomial,
}

impl Serialize for RationalFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RfJson { num: self.num.clone(), den: self.den.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = RfJson::deserialize(d)?;
        RationalFunction::new(j.num, j.den).map_err(serde::de::Error::custom)
    }
}
