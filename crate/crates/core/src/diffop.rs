//! Linear differential operators `sum_k a_k(x) d^k` with rational coefficients.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::algebra::{FieldElement, LaurentPolynomial, Polynomial, RationalFunction};

/// Coefficient list indexed by derivative order; trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "DiffOpJson", into = "DiffOpJson")]
pub struct DiffOp {
    coeffs: Vec<RationalFunction>,
}

#[derive(Serialize, Deserialize)]
struct DiffOpJson {
    coeffs: Vec<RationalFunction>,
}

impl From<DiffOpJson> for DiffOp {
    fn from(j: DiffOpJson) -> Self {
        DiffOp::new(j.coeffs)
    }
}

impl From<DiffOp> for DiffOpJson {
    fn from(d: DiffOp) -> Self {
        DiffOpJson { coeffs: d.coeffs }
    }
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i as i64 + 1))
}

impl DiffOp {
    pub fn new(mut coeffs: Vec<RationalFunction>) -> Self {
        while coeffs.last().is_some_and(RationalFunction::is_zero) {
            coeffs.pop();
        }
        DiffOp { coeffs }
    }

    pub fn zero() -> Self {
        DiffOp::default()
    }

    pub fn identity() -> Self {
        Self::multiplication(RationalFunction::one())
    }

    /// The operator `d/dx`.
    pub fn d() -> Self {
        Self::new(vec![RationalFunction::zero(), RationalFunction::one()])
    }

    /// `d^k`
    pub fn d_pow(k: usize) -> Self {
        let mut c = vec![RationalFunction::zero(); k];
        c.push(RationalFunction::one());
        Self::new(c)
    }

    pub fn multiplication(f: RationalFunction) -> Self {
        Self::new(vec![f])
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::multiplication(RationalFunction::constant(c))
    }

    /// Monic order-2 operator `d^2 + p1 d + p0`.
    pub fn monic2(p1: RationalFunction, p0: RationalFunction) -> Self {
        Self::new(vec![p0, p1, RationalFunction::one()])
    }

    pub fn coeffs(&self) -> &[RationalFunction] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> RationalFunction {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order of the operator; 0 for the zero operator.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> RationalFunction {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    /// True when the operator is multiplication by a constant.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1 && self.coeff(0).is_constant()
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.scale(c)).collect())
    }

    /// Left multiplication by a function: `f * A`.
    pub fn mul_left(&self, f: &RationalFunction) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * f).collect())
    }

    /// Divide through by the leading coefficient.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let inv = self.leading().inv().expect("nonzero leading coefficient");
        self.mul_left(&inv)
    }

    /// `A o B` via the Leibniz rule `d^i b = sum_k C(i,k) b^(k) d^(i-k)`.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let n = self.order();
        let mut out = vec![RationalFunction::zero(); n + other.order() + 1];
        for (j, b) in other.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let mut derivs = vec![b.clone()];
            for k in 1..=n {
                derivs.push(derivs[k - 1].derivative());
            }
            for (i, a) in self.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (k, bk) in derivs.iter().enumerate().take(i + 1) {
                    if bk.is_zero() {
                        continue;
                    }
                    let c = (a * bk).scale(&FieldElement::from_i64(binomial(i, k)));
                    let idx = i - k + j;
                    out[idx] = &out[idx] + &c;
                }
            }
        }
        Self::new(out)
    }

    /// `A B - B A`
    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        &self.compose(other) - &other.compose(self)
    }

    /// `sum_k a_k (d + h)^k`, i.e. `u^{-1} A u` for any `u` with `u'/u = h`.
    pub fn conjugate_by_log_derivative(&self, h: &RationalFunction) -> DiffOp {
        if h.is_zero() {
            return self.clone();
        }
        let shift = DiffOp::new(vec![h.clone(), RationalFunction::one()]);
        let mut power = DiffOp::identity();
        let mut out = DiffOp::zero();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                power = shift.compose(&power);
            }
            if !a.is_zero() {
                out = &out + &power.mul_left(a);
            }
        }
        out
    }

    /// `e^{-g} o A o e^{g}`
    pub fn gauge_transform(&self, g: &LaurentPolynomial) -> DiffOp {
        self.conjugate_by_log_derivative(&g.derivative().to_rational_function())
    }

    /// Apply to a rational function: `sum_k a_k f^(k)`.
    pub fn apply(&self, f: &RationalFunction) -> RationalFunction {
        let mut out = RationalFunction::zero();
        let mut fk = f.clone();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                fk = fk.derivative();
            }
            out = &out + &(a * &fk);
        }
        out
    }

    /// Substitute `x = t + c`, giving an operator in `t` (`d_x = d_t`).
    pub fn shift(&self, c: &FieldElement) -> DiffOp {
        Self::new(self.coeffs.iter().map(|a| a.shift(c)).collect())
    }

    /// Substitute `x = 1/t`, giving an operator in `t` (`d_x = -t^2 d_t`).
    pub fn invert_variable(&self) -> DiffOp {
        let minus_t2 = RationalFunction::from_poly(Polynomial::monomial(FieldElement::from_i64(-1), 2));
        let dx = DiffOp::new(vec![RationalFunction::zero(), minus_t2]);
        let mut power = DiffOp::identity();
        let mut out = DiffOp::zero();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                power = dx.compose(&power);
            }
            out = &out + &power.mul_left(&a.invert_variable());
        }
        out
    }

    /// Structural equality of the normal forms.
    pub fn op_equal(&self, other: &DiffOp) -> bool {
        self == other
    }
}

impl<'a> Add<&'a DiffOp> for &'a DiffOp {
    type Output = DiffOp;
    fn add(self, o: &DiffOp) -> DiffOp {
        let n = self.coeffs.len().max(o.coeffs.len());
        DiffOp::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a DiffOp> for &'a DiffOp {
    type Output = DiffOp;
    fn sub(self, o: &DiffOp) -> DiffOp {
        let n = self.coeffs.len().max(o.coeffs.len());
        DiffOp::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }
}

impl Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        DiffOp::new(self.coeffs.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let term = match k {
                0 => String::new(),
                1 => "d".to_string(),
                _ => format!("d^{k}"),
            };
            match (a.is_one(), k) {
                (true, 0) => write!(f, "1")?,
                (true, _) => write!(f, "{term}")?,
                (false, 0) => write!(f, "({a})")?,
                (false, _) => write!(f, "({a})*{term}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> RationalFunction {
        RationalFunction::x()
    }

    #[test]
    fn leibniz_basics() {
        let dx = DiffOp::d().compose(&DiffOp::multiplication(x()));
        assert_eq!(dx, DiffOp::new(vec![RationalFunction::one(), x()]));
        assert_eq!(DiffOp::d_pow(2).compose(&DiffOp::d_pow(2)), DiffOp::d_pow(4));
        let c = DiffOp::d().commutator(&DiffOp::multiplication(x()));
        assert_eq!(c, DiffOp::identity());
    }

    #[test]
    fn gauge_by_linear_exponent() {
        let a = FieldElement::from_i64(3);
        let g = LaurentPolynomial::linear(a.clone());
        let t = DiffOp::d_pow(2).gauge_transform(&g);
        let expect = DiffOp::new(vec![
            RationalFunction::constant(&a * &a),
            RationalFunction::constant(&a + &a),
            RationalFunction::one(),
        ]);
        assert_eq!(t, expect);
        assert_eq!(DiffOp::d_pow(2).gauge_transform(&LaurentPolynomial::zero()), DiffOp::d_pow(2));
    }

    #[test]
    fn trailing_zero_coefficients_are_normalized() {
        let a = DiffOp::new(vec![RationalFunction::zero(), RationalFunction::zero(), RationalFunction::one(), RationalFunction::zero()]);
        assert!(a.op_equal(&DiffOp::d_pow(2)));
        assert_eq!(a.order(), 2);
    }

    #[test]
    fn inversion_of_d2() {
        // d_x^2 at x = 1/t is t^4 d_t^2 + 2 t^3 d_t
        let t = |k| RationalFunction::from_poly(Polynomial::monomial(FieldElement::one(), k));
        let inv = DiffOp::d_pow(2).invert_variable();
        assert_eq!(inv, DiffOp::new(vec![RationalFunction::zero(), t(3).scale(&FieldElement::from_i64(2)), t(4)]));
    }

    #[test]
    fn json_round_trip() {
        let p = DiffOp::monic2(RationalFunction::pole_term(&FieldElement::one(), &FieldElement::from_i64(2), 1), x());
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.starts_with("{\"coeffs\":"));
        assert_eq!(serde_json::from_str::<DiffOp>(&s).unwrap(), p);
    }
}
