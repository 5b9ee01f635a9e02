//! Degree-1 and degree-2 operators semi-commuting with a monic order-2 `P`,
//! commutativity residuals, and the uncorrected degree-1 recursion kept for
//! comparison.

use serde::{Deserialize, Serialize};

use crate::algebra::linsolve::integrate_rational;
use crate::algebra::roots::{roots, Root};
use crate::algebra::{FieldElement, RationalFunction};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};

/// Integration constants of the semi-commuting family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemiCommuteSpec {
    pub degree: u8,
    pub beta0: FieldElement,
    pub beta1: FieldElement,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta2: Option<FieldElement>,
}

impl SemiCommuteSpec {
    pub fn degree1(beta1: FieldElement, beta0: FieldElement) -> Self {
        SemiCommuteSpec { degree: 1, beta0, beta1, beta2: None }
    }

    pub fn degree2(beta2: FieldElement, beta1: FieldElement, beta0: FieldElement) -> Self {
        SemiCommuteSpec { degree: 2, beta0, beta1, beta2: Some(beta2) }
    }

    pub fn beta2(&self) -> FieldElement {
        self.beta2.clone().unwrap_or_default()
    }

    /// A degree-2 spec with `beta2 = 0` builds an operator of degree at most 1.
    pub fn is_degenerate(&self) -> bool {
        self.degree == 2 && self.beta2().is_zero()
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self> {
        if self.degree != o.degree {
            return Err(Error::InvalidParams("specs of different degree".into()));
        }
        Ok(SemiCommuteSpec {
            degree: self.degree,
            beta0: self.beta0.checked_add(&o.beta0)?,
            beta1: self.beta1.checked_add(&o.beta1)?,
            beta2: match (&self.beta2, &o.beta2) {
                (None, None) => None,
                _ => Some(self.beta2().checked_add(&o.beta2())?),
            },
        })
    }
}

/// `(p1, p0)` of a monic order-2 operator.
pub fn split_monic2(p: &DiffOp) -> Result<(RationalFunction, RationalFunction)> {
    if p.order() != 2 || !p.is_monic() {
        return Err(Error::NotMonicOrder2 { order: p.order() });
    }
    Ok((p.coeff(1), p.coeff(0)))
}

fn half() -> FieldElement {
    FieldElement::from_ratio(1, 2)
}

/// `Q = b1 d + (b1/2) p1 + b0`
pub fn build_q1(p: &DiffOp, spec: &SemiCommuteSpec) -> Result<DiffOp> {
    let (p1, _) = split_monic2(p)?;
    let b1 = &spec.beta1;
    let q0 = p1.checked_mul(&RationalFunction::constant(b1.checked_mul(&half())?))?
        .checked_add(&RationalFunction::constant(spec.beta0.clone()))?;
    Ok(DiffOp::new(vec![q0, RationalFunction::constant(b1.clone())]))
}

/// `Q = b2 P + b1 (d + p1/2) + b0`
pub fn build_q2(p: &DiffOp, spec: &SemiCommuteSpec) -> Result<DiffOp> {
    split_monic2(p)?;
    let first = build_q1(p, &SemiCommuteSpec::degree1(spec.beta1.clone(), spec.beta0.clone()))?;
    Ok(&p.scale(&spec.beta2()) + &first)
}

pub fn build_q(p: &DiffOp, spec: &SemiCommuteSpec) -> Result<DiffOp> {
    match spec.degree {
        1 => build_q1(p, spec),
        2 => build_q2(p, spec),
        d => Err(Error::InvalidParams(format!("unsupported degree {d}"))),
    }
}

/// The uncorrected degree-1 recursion `q0' = (b1/2) p1' - (b1/2) p0`, taken as
/// `q0 = (b1/2) p1 - (b1/2) int p0 + b0`. Aborts when `int p0` is not rational.
pub fn gorder_q1(p: &DiffOp, spec: &SemiCommuteSpec) -> Result<DiffOp> {
    let (_, p0) = split_monic2(p)?;
    let base = build_q1(p, spec)?;
    let int_p0 = integrate_rational(&p0)?;
    let corr = int_p0.scale(&spec.beta1.checked_mul(&half())?);
    let q0 = base.coeff(0).checked_sub(&corr)?;
    Ok(DiffOp::new(vec![q0, base.coeff(1)]))
}

/// Constant terms of the polynomial parts of `p1` and `p0`.
fn absorbed_constants(p: &DiffOp) -> Result<(FieldElement, FieldElement)> {
    let (p1, p0) = split_monic2(p)?;
    Ok((p1.split_proper().0.coeff(0), p0.split_proper().0.coeff(0)))
}

/// Map integration constants from the convention `q1 = b2 (p1 - c1) + b1`
/// with constant terms of polynomial parts absorbed into `b0` (the labeling
/// of the printed families) to the structural convention of [`build_q2`] and
/// [`build_q1`]. Here `c1`, `c0` are the constant terms of the polynomial
/// parts of `p1`, `p0`.
pub fn from_absorbed_labels(p: &DiffOp, spec: &SemiCommuteSpec) -> Result<SemiCommuteSpec> {
    let (c1, c0) = absorbed_constants(p)?;
    let b2 = spec.beta2();
    let beta1 = spec.beta1.checked_sub(&b2.checked_mul(&c1)?)?;
    let shift = beta1.checked_mul(&half())?.checked_mul(&c1)?.checked_add(&b2.checked_mul(&c0)?)?;
    let beta0 = spec.beta0.checked_sub(&shift)?;
    Ok(SemiCommuteSpec { degree: spec.degree, beta0, beta1, beta2: spec.beta2.clone() })
}

/// Inverse of [`from_absorbed_labels`].
pub fn to_absorbed_labels(p: &DiffOp, spec: &SemiCommuteSpec) -> Result<SemiCommuteSpec> {
    let (c1, c0) = absorbed_constants(p)?;
    let b2 = spec.beta2();
    let shift = spec.beta1.checked_mul(&half())?.checked_mul(&c1)?.checked_add(&b2.checked_mul(&c0)?)?;
    let beta0 = spec.beta0.checked_add(&shift)?;
    let beta1 = spec.beta1.checked_add(&b2.checked_mul(&c1)?)?;
    Ok(SemiCommuteSpec { degree: spec.degree, beta0, beta1, beta2: spec.beta2.clone() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub residual: RationalFunction,
    pub commutes: bool,
    pub local_points: Vec<Root>,
}

impl ResidualReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "residual": self.residual,
            "commutes": self.commutes,
            "local_points": self.local_points.iter().map(Root::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Order-0 coefficient of `PQ - QP`, with the points where it vanishes.
pub fn residual(p: &DiffOp, q: &DiffOp) -> Result<ResidualReport> {
    let c = p.commutator(q);
    if c.order() > 0 {
        return Err(Error::NotSemiCommuting { order: c.order() });
    }
    let residual = c.coeff(0);
    let local_points = if residual.is_zero() { Vec::new() } else { roots(residual.num()) };
    Ok(ResidualReport { commutes: residual.is_zero(), residual, local_points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Polynomial;

    fn fe(n: i64) -> FieldElement {
        FieldElement::from_i64(n)
    }

    fn inv_x() -> RationalFunction {
        RationalFunction::pole_term(&fe(1), &fe(0), 1)
    }

    #[test]
    fn q1_for_two_over_x() {
        let p = DiffOp::monic2(inv_x().scale(&fe(2)), RationalFunction::zero());
        let q = build_q1(&p, &SemiCommuteSpec::degree1(fe(3), fe(5))).unwrap();
        assert_eq!(q.coeff(1), RationalFunction::from_i64(3));
        assert_eq!(q.coeff(0), &inv_x().scale(&fe(3)) + &RationalFunction::from_i64(5));
    }

    #[test]
    fn residual_of_one_over_x() {
        let p = DiffOp::monic2(inv_x(), RationalFunction::zero());
        let q = build_q1(&p, &SemiCommuteSpec::degree1(fe(1), fe(0))).unwrap();
        let r = residual(&p, &q).unwrap();
        let expect = RationalFunction::new(Polynomial::constant(FieldElement::from_ratio(1, 2)), Polynomial::monomial(fe(1), 3)).unwrap();
        assert_eq!(r.residual, expect);
        assert!(!r.commutes);
        assert!(r.local_points.is_empty());
        assert!(residual(&p, &p).unwrap().commutes);
    }

    #[test]
    fn non_monic_is_rejected() {
        let p = DiffOp::d_pow(2).scale(&fe(2));
        assert!(matches!(build_q1(&p, &SemiCommuteSpec::degree1(fe(1), fe(0))), Err(Error::NotMonicOrder2 { .. })));
        assert!(matches!(build_q2(&DiffOp::d(), &SemiCommuteSpec::degree2(fe(1), fe(0), fe(0))), Err(Error::NotMonicOrder2 { .. })));
    }

    #[test]
    fn gorder_counterexample() {
        let p = DiffOp::monic2(RationalFunction::from_i64(-1), RationalFunction::from_i64(-1));
        let spec = SemiCommuteSpec::degree1(fe(1), fe(0));
        let bad = gorder_q1(&p, &spec).unwrap();
        let c = p.commutator(&bad);
        assert_eq!(c, DiffOp::new(vec![RationalFunction::constant(FieldElement::from_ratio(-1, 2)), RationalFunction::one()]));
        let good = build_q1(&p, &spec).unwrap();
        assert!(p.commutator(&good).is_zero());
    }

    #[test]
    fn gorder_log_obstruction() {
        let p = DiffOp::monic2(RationalFunction::zero(), inv_x());
        assert!(matches!(gorder_q1(&p, &SemiCommuteSpec::degree1(fe(1), fe(0))), Err(Error::LogarithmicTerm(_))));
    }

    #[test]
    fn absorbed_labels_round_trip() {
        // p1 = sigma - x^2, p0 = alpha x - q
        let p1 = RationalFunction::from_poly(Polynomial::from_i64s(&[3, 0, -1]));
        let p0 = RationalFunction::from_poly(Polynomial::from_i64s(&[-2, 5]));
        let p = DiffOp::monic2(p1, p0);
        let spec = SemiCommuteSpec::degree2(fe(2), fe(7), fe(-1));
        let s = from_absorbed_labels(&p, &spec).unwrap();
        assert_eq!(s.beta1, fe(7 - 6));
        assert_eq!(to_absorbed_labels(&p, &s).unwrap(), spec);
    }
}
