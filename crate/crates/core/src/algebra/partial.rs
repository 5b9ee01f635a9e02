//! Partial-fraction decomposition over a caller-supplied list of poles.

use serde::{Deserialize, Serialize};

use super::field::FieldElement;
use super::poly::Polynomial;
use super::ratfunc::RationalFunction;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleTerm {
    pub pole: FieldElement,
    pub order: usize,
    pub coeff: FieldElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFractionForm {
    pub polynomial_part: Polynomial,
    pub pole_terms: Vec<PoleTerm>,
}

impl PartialFractionForm {
    pub fn reassemble(&self) -> RationalFunction {
        self.pole_terms.iter().fold(
            RationalFunction::from_poly(self.polynomial_part.clone()),
            |acc, t| &acc + &RationalFunction::pole_term(&t.coeff, &t.pole, t.order),
        )
    }

    /// Coefficient of `1/(x - pole)^order`, zero when absent.
    pub fn coeff(&self, pole: &FieldElement, order: usize) -> FieldElement {
        self.pole_terms
            .iter()
            .find(|t| &t.pole == pole && t.order == order)
            .map(|t| t.coeff.clone())
            .unwrap_or_default()
    }
}

/// First `n` coefficients of the power series `a(t)/b(t)`, `b(0) != 0`.
fn series_quotient(a: &Polynomial, b: &Polynomial, n: usize) -> Result<Vec<FieldElement>> {
    let b0_inv = b.coeff(0).inv()?;
    let mut out: Vec<FieldElement> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = a.coeff(k);
        for (j, c) in out.iter().enumerate() {
            let bk = b.coeff(k - j);
            if !bk.is_zero() {
                acc = acc.checked_sub(&c.checked_mul(&bk)?)?;
            }
        }
        out.push(acc.checked_mul(&b0_inv)?);
    }
    Ok(out)
}

pub fn partial_fractions(f: &RationalFunction, poles: &[FieldElement]) -> Result<PartialFractionForm> {
    let (polynomial_part, proper) = f.split_proper();
    let mut rest = proper.den().clone();
    let mut found: Vec<(FieldElement, usize)> = Vec::new();
    for p in poles {
        if found.iter().any(|(q, _)| q == p) {
            continue;
        }
        let lin = Polynomial::linear(p);
        let mut m = 0;
        loop {
            let (q, r) = rest.div_rem(&lin)?;
            if !r.is_zero() {
                break;
            }
            rest = q;
            m += 1;
        }
        if m > 0 {
            found.push((p.clone(), m));
        }
    }
    if !rest.is_constant() {
        return Err(Error::UnexplainedFactor(rest.to_string()));
    }

    let mut pole_terms = Vec::new();
    for (p, m) in &found {
        // num / den = (x-p)^{-m} * num / rest_p, expand the latter around p
        let cofactor = proper.den().exact_div(&Polynomial::linear(p).pow(*m))?;
        let series = series_quotient(&proper.num().shift(p), &cofactor.shift(p), *m)?;
        for (j, c) in series.into_iter().enumerate() {
            if !c.is_zero() {
                pole_terms.push(PoleTerm { pole: p.clone(), order: m - j, coeff: c });
            }
        }
    }
    pole_terms.sort_by_key(|t| (found.iter().position(|(q, _)| *q == t.pole), t.order));
    Ok(PartialFractionForm { polynomial_part, pole_terms })
}
