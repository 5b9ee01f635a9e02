//! Closed-form functions `sum c * r(x) x^rho e^{g(x)}`, closed under `d/dx`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{FieldElement, LaurentPolynomial, Polynomial, RationalFunction};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};

/// `rat * x^rho * e^g`. Integer `rho` is folded into `rat`; `g` has no
/// constant term.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExpMonomial {
    pub rat: RationalFunction,
    pub rho: FieldElement,
    pub g: LaurentPolynomial,
}

impl ExpMonomial {
    pub fn new(rat: RationalFunction, rho: FieldElement, g: LaurentPolynomial) -> Result<Self> {
        if !g.constant_term().is_zero() {
            return Err(Error::InvalidParams(format!("exponent {g} has a constant term")));
        }
        let mut m = ExpMonomial { rat, rho, g };
        m.fold_integer_power();
        Ok(m)
    }

    pub fn rational(rat: RationalFunction) -> Self {
        ExpMonomial { rat, rho: FieldElement::zero(), g: LaurentPolynomial::zero() }
    }

    pub fn exp(g: LaurentPolynomial) -> Result<Self> {
        Self::new(RationalFunction::one(), FieldElement::zero(), g)
    }

    pub fn power(rho: FieldElement) -> Self {
        Self::new(RationalFunction::one(), rho, LaurentPolynomial::zero()).expect("no exponent")
    }

    fn fold_integer_power(&mut self) {
        let Some(k) = self.rho.as_integer() else { return };
        let Ok(k) = i64::try_from(k) else { return };
        if k == 0 {
            return;
        }
        let xk = Polynomial::monomial(FieldElement::one(), k.unsigned_abs() as usize);
        let factor = if k > 0 {
            RationalFunction::from_poly(xk)
        } else {
            RationalFunction::new(Polynomial::one(), xk).expect("nonzero")
        };
        self.rat = &self.rat * &factor;
        self.rho = FieldElement::zero();
    }

    pub fn derivative(&self) -> ExpMonomial {
        // (r' + r rho / x + r g') x^rho e^g
        let mut r = self.rat.derivative();
        if !self.rho.is_zero() {
            let over_x = RationalFunction::pole_term(&self.rho, &FieldElement::zero(), 1);
            r = &r + &(&self.rat * &over_x);
        }
        if !self.g.is_zero() {
            r = &r + &(&self.rat * &self.g.derivative().to_rational_function());
        }
        ExpMonomial { rat: r, rho: self.rho.clone(), g: self.g.clone() }
    }

    pub fn mul(&self, o: &ExpMonomial) -> ExpMonomial {
        let mut m = ExpMonomial { rat: &self.rat * &o.rat, rho: &self.rho + &o.rho, g: &self.g + &o.g };
        m.fold_integer_power();
        m
    }

    pub fn eval_numeric(&self, x: Complex64) -> Result<Complex64> {
        let at_zero = x.norm() == 0.0;
        if at_zero && (!self.rho.is_zero() || self.g.min_exponent().is_some_and(|k| k < 0)) {
            return Err(Error::Singular(format!("x^{} e^({}) at 0", self.rho, self.g)));
        }
        let den = self.rat.den().eval_c64(x);
        if den.norm() == 0.0 {
            return Err(Error::Singular(format!("pole of {} at {x}", self.rat)));
        }
        let mut v = self.rat.num().eval_c64(x) / den;
        if !self.rho.is_zero() {
            v *= (self.rho.to_c64() * x.ln()).exp();
        }
        if !self.g.is_zero() {
            v *= self.g.eval_c64(x).exp();
        }
        Ok(v)
    }

    fn key(&self) -> (&FieldElement, &LaurentPolynomial) {
        (&self.rho, &self.g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: FieldElement,
    pub mono: ExpMonomial,
}

/// Sum of exponential monomials; terms sharing `(rho, g)` are merged and each
/// `rat` is normalized to a monic numerator, the scalar living in `coeff`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FunctionSum {
    pub terms: Vec<Term>,
}

impl FunctionSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_mono(m: ExpMonomial) -> Self {
        Self::from_terms(vec![(FieldElement::one(), m)])
    }

    pub fn from_terms(terms: Vec<(FieldElement, ExpMonomial)>) -> Self {
        let mut out: Vec<(FieldElement, ExpMonomial)> = Vec::new();
        for (c, m) in terms {
            if c.is_zero() || m.rat.is_zero() {
                continue;
            }
            match out.iter_mut().find(|(_, e)| e.key() == m.key()) {
                Some((ce, e)) => {
                    e.rat = &e.rat.scale(ce) + &m.rat.scale(&c);
                    *ce = FieldElement::one();
                }
                None => out.push((c, m)),
            }
        }
        let terms = out
            .into_iter()
            .filter(|(_, m)| !m.rat.is_zero())
            .map(|(c, mut m)| {
                let lead = m.rat.num().lead();
                let inv = lead.inv().expect("nonzero numerator");
                m.rat = m.rat.scale(&inv);
                Term { coeff: &c * &lead, mono: m }
            })
            .collect();
        FunctionSum { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &FunctionSum) -> FunctionSum {
        Self::from_terms(
            self.terms
                .iter()
                .chain(&o.terms)
                .map(|t| (t.coeff.clone(), t.mono.clone()))
                .collect(),
        )
    }

    pub fn scale(&self, c: &FieldElement) -> FunctionSum {
        Self::from_terms(self.terms.iter().map(|t| (&t.coeff * c, t.mono.clone())).collect())
    }

    /// Multiply by a rational function.
    pub fn mul_rational(&self, f: &RationalFunction) -> FunctionSum {
        Self::from_terms(
            self.terms
                .iter()
                .map(|t| {
                    let mono = ExpMonomial { rat: &t.mono.rat * f, rho: t.mono.rho.clone(), g: t.mono.g.clone() };
                    (t.coeff.clone(), mono)
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &FunctionSum) -> FunctionSum {
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &o.terms {
                terms.push((&a.coeff * &b.coeff, a.mono.mul(&b.mono)));
            }
        }
        Self::from_terms(terms)
    }

    pub fn derivative(&self) -> FunctionSum {
        Self::from_terms(self.terms.iter().map(|t| (t.coeff.clone(), t.mono.derivative())).collect())
    }

    pub fn eval_numeric(&self, x: Complex64) -> Result<Complex64> {
        self.terms
            .iter()
            .map(|t| Ok(t.coeff.to_c64() * t.mono.eval_numeric(x)?))
            .sum()
    }
}

pub fn fs_diff(f: &FunctionSum) -> FunctionSum {
    f.derivative()
}

/// `sum_k a_k f^(k)`
pub fn apply_op(a: &DiffOp, f: &FunctionSum) -> FunctionSum {
    let mut out = FunctionSum::zero();
    let mut fk = f.clone();
    for (k, c) in a.coeffs().iter().enumerate() {
        if k > 0 {
            fk = fk.derivative();
        }
        if !c.is_zero() {
            out = out.add(&fk.mul_rational(c));
        }
    }
    out
}

/// Numeric Wronskian `det [f_j^(i)(x)]`.
pub fn wronskian(fs: &[FunctionSum], x: Complex64) -> Result<Complex64> {
    let n = fs.len();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for (j, f) in fs.iter().enumerate() {
        let mut d = f.clone();
        for i in 0..n {
            if i > 0 {
                d = d.derivative();
            }
            m[(i, j)] = d.eval_numeric(x)?;
        }
    }
    Ok(m.determinant())
}
