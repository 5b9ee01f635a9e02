//! Frobenius series at ordinary and regular singular points, and an exact
//! evaluation of the truncation residual on a circle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::roots::roots;
use crate::algebra::{FieldElement, Polynomial, RationalFunction};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::family::{classify_singularities, Location};

/// `sum_n coeffs[n] (x - x0)^(rho + n)`, `coeffs[0] = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrobeniusSolution {
    pub x0: FieldElement,
    pub rho: FieldElement,
    pub coeffs: Vec<FieldElement>,
}

impl FrobeniusSolution {
    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The polynomial part `sum_n c_n t^n`.
    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs.clone())
    }
}

/// Polynomial coefficients `p_k(t)` of `M(t) * op(x0 + t)` with `M` clearing
/// every denominator.
fn cleared_coefficients(op: &DiffOp, x0: &FieldElement) -> Result<Vec<Polynomial>> {
    let shifted = op.shift(x0);
    let mut m = Polynomial::one();
    for c in shifted.coeffs() {
        m = &m * &c.den().exact_div(&m.gcd(c.den()))?;
    }
    let mf = RationalFunction::from_poly(m);
    Ok(shifted
        .coeffs()
        .iter()
        .map(|c| {
            let r = c * &mf;
            debug_assert!(r.is_polynomial());
            r.num().clone()
        })
        .collect())
}

/// The family `F_h(s) = sum_k p_{k, k+h} (s)_k` (falling factorials);
/// `f[i]` is `F_{h_min + i}` and `f[0]` is the indicial polynomial.
struct Recurrence {
    f: Vec<Polynomial>,
}

fn falling_factorial(k: usize) -> Polynomial {
    (0..k).fold(Polynomial::one(), |acc, i| &acc * &Polynomial::linear(&FieldElement::from_i64(i as i64)))
}

impl Recurrence {
    fn new(op: &DiffOp, x0: &FieldElement) -> Result<Self> {
        let p = cleared_coefficients(op, x0)?;
        let mut h_min = i64::MAX;
        let mut h_max = i64::MIN;
        for (k, pk) in p.iter().enumerate() {
            for (j, c) in pk.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    h_min = h_min.min(j as i64 - k as i64);
                    h_max = h_max.max(j as i64 - k as i64);
                }
            }
        }
        if h_min == i64::MAX {
            return Err(Error::InvalidParams("zero operator".into()));
        }
        let f = (h_min..=h_max)
            .map(|h| {
                let mut fh = Polynomial::zero();
                for (k, pk) in p.iter().enumerate() {
                    let j = h + k as i64;
                    if j >= 0 && !pk.coeff(j as usize).is_zero() {
                        fh = &fh + &falling_factorial(k).scale(&pk.coeff(j as usize));
                    }
                }
                fh
            })
            .collect();
        Ok(Recurrence { f })
    }

    fn indicial(&self) -> &Polynomial {
        &self.f[0]
    }
}

/// Indicial polynomial at `x0`; errors at irregular singular points.
pub fn indicial_polynomial(op: &DiffOp, x0: &FieldElement) -> Result<Polynomial> {
    let rec = Recurrence::new(op, x0)?;
    let ind = rec.indicial().clone();
    if ind.degree() != Some(op.order()) {
        return Err(Error::IrregularSingular(x0.to_string()));
    }
    Ok(ind)
}

/// Local exponents at `x0` (with multiplicity).
pub fn indicial_roots(op: &DiffOp, x0: &FieldElement) -> Result<Vec<FieldElement>> {
    let ind = indicial_polynomial(op, x0)?;
    let mut out = Vec::new();
    for r in roots(&ind) {
        let v = r
            .exact()
            .cloned()
            .ok_or_else(|| Error::InvalidParams("indicial roots are not exact in the active field".into()))?;
        for _ in 0..r.multiplicity() {
            out.push(v.clone());
        }
    }
    Ok(out)
}

pub fn frobenius_series(op: &DiffOp, x0: &FieldElement, rho: &FieldElement, n: usize) -> Result<FrobeniusSolution> {
    let rec = Recurrence::new(op, x0)?;
    let ind = rec.indicial();
    if ind.degree() != Some(op.order()) {
        return Err(Error::IrregularSingular(x0.to_string()));
    }
    if !ind.try_eval(rho)?.is_zero() {
        return Err(Error::InvalidParams(format!("{rho} is not a local exponent at {x0}")));
    }
    let mut c = vec![FieldElement::one()];
    for m in 1..=n {
        let mut rhs = FieldElement::zero();
        for i in 1..=m {
            let Some(fi) = rec.f.get(i) else { break };
            if fi.is_zero() || c[m - i].is_zero() {
                continue;
            }
            let s = rho.checked_add(&FieldElement::from_i64((m - i) as i64))?;
            rhs = rhs.checked_sub(&fi.try_eval(&s)?.checked_mul(&c[m - i])?)?;
        }
        let s = rho.checked_add(&FieldElement::from_i64(m as i64))?;
        let d = ind.try_eval(&s)?;
        if d.is_zero() {
            if !rhs.is_zero() {
                return Err(Error::Resonance { index: m });
            }
            c.push(FieldElement::zero());
        } else {
            c.push(rhs.checked_div(&d)?);
        }
    }
    Ok(FrobeniusSolution { x0: x0.clone(), rho: rho.clone(), coeffs: c })
}

/// `t^{-rho} op(t^rho S(t))` as an exact rational function in `t = x - x0`.
pub fn apply_to_truncation(op: &DiffOp, s: &FrobeniusSolution) -> Result<RationalFunction> {
    let conj = conjugated(op, s)?;
    Ok(conj.apply(&RationalFunction::from_poly(s.polynomial())))
}

/// Lowest power of `t` in [`apply_to_truncation`], relative to `t^rho`;
/// `None` when the truncation is an exact solution.
pub fn remainder_valuation(op: &DiffOp, s: &FrobeniusSolution) -> Result<Option<i64>> {
    let r = apply_to_truncation(op, s)?;
    if r.is_zero() {
        return Ok(None);
    }
    let vn = r.num().valuation().unwrap_or(0) as i64;
    let vd = r.den().valuation().unwrap_or(0) as i64;
    Ok(Some(vn - vd))
}

fn conjugated(op: &DiffOp, s: &FrobeniusSolution) -> Result<DiffOp> {
    let shifted = op.shift(&s.x0);
    let h = RationalFunction::pole_term(&s.rho, &FieldElement::zero(), 1);
    Ok(shifted.conjugate_by_log_derivative(&h))
}

/// Eight points on the unit circle with rational coordinates.
pub fn unit_circle_points() -> Vec<(FieldElement, FieldElement)> {
    let r = FieldElement::from_ratio;
    vec![
        (r(1, 1), r(0, 1)),
        (r(0, 1), r(1, 1)),
        (r(-1, 1), r(0, 1)),
        (r(0, 1), r(-1, 1)),
        (r(3, 5), r(4, 5)),
        (r(-4, 5), r(3, 5)),
        (r(-3, 5), r(-4, 5)),
        (r(4, 5), r(-3, 5)),
    ]
}

/// Distance from `x0` to the nearest other finite singular point of `op`,
/// or `None` if there is none.
pub fn singularity_distance(op: &DiffOp, x0: &FieldElement) -> Result<Option<f64>> {
    let z0 = x0.to_c64();
    let mut best: Option<f64> = None;
    for (loc, _) in classify_singularities(op)? {
        if let Location::Finite(r) = loc {
            if r.exact() == Some(x0) {
                continue;
            }
            let d = (r.to_c64() - z0).norm();
            if d < 1e-12 {
                continue;
            }
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
    }
    Ok(best)
}

/// A rational radius no larger than `fraction * distance` (distance 1 when
/// there is no other finite singularity).
pub fn default_radius(op: &DiffOp, x0: &FieldElement, fraction: f64) -> Result<FieldElement> {
    let d = singularity_distance(op, x0)?.unwrap_or(1.0);
    let target = fraction * d;
    let den = 1000i64;
    let num = (target * den as f64).floor().max(1.0) as i64;
    Ok(FieldElement::from_ratio(num, den))
}

/// Max over `k` circle points of `|op(truncated series)|` at radius `r`
/// around `x0`. Evaluation is exact; only the final modulus and the factor
/// `|t^rho|` are floating point.
pub fn series_residual(op: &DiffOp, s: &FrobeniusSolution, r: &FieldElement, k: usize) -> Result<f64> {
    let rf = r.to_c64().re;
    if let Some(d) = singularity_distance(op, &s.x0)? {
        if rf >= d {
            return Err(Error::RadiusTooLarge { radius: rf, distance: d });
        }
    }
    let conj = conjugated(op, s)?;
    let mut derivs = vec![s.polynomial()];
    for i in 1..=conj.order() {
        derivs.push(derivs[i - 1].derivative());
    }
    let pts = unit_circle_points();
    let mut worst = 0.0f64;
    for (u, v) in pts.iter().cycle().take(k) {
        let t = &(&FieldElement::from_gauss(u.base().clone()) + &(&FieldElement::i() * v)) * r;
        let mut acc = FieldElement::zero();
        for (j, a) in conj.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let term = a.eval(&t)?.checked_mul(&derivs[j].try_eval(&t)?)?;
            acc = acc.checked_add(&term)?;
        }
        let tc = t.to_c64();
        let scale = (s.rho.to_c64() * tc.ln()).exp().norm();
        worst = worst.max(acc.to_c64().norm() * scale);
    }
    Ok(worst)
}

/// Numeric value of the truncated series at `x` (principal branch).
pub fn eval_series(s: &FrobeniusSolution, x: Complex64) -> Complex64 {
    let t = x - s.x0.to_c64();
    let poly = s.polynomial().eval_c64(t);
    poly * (s.rho.to_c64() * t.ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::HeunParams;

    fn fe(n: i64, d: i64) -> FieldElement {
        FieldElement::from_ratio(n, d)
    }

    fn heun() -> DiffOp {
        HeunParams::Heun { a: fe(2, 1), q: fe(1, 3), alpha: fe(1, 2), beta: fe(1, 3), gamma: fe(1, 2), delta: fe(1, 2) }
            .build_p()
            .unwrap()
    }

    #[test]
    fn d2_constant_solution() {
        let s = frobenius_series(&DiffOp::d_pow(2), &FieldElement::zero(), &FieldElement::zero(), 6).unwrap();
        assert_eq!(s.coeffs[0], FieldElement::one());
        assert!(s.coeffs[1..].iter().all(FieldElement::is_zero));
        assert_eq!(indicial_roots(&DiffOp::d_pow(2), &fe(5, 7)).unwrap().len(), 2);
    }

    #[test]
    fn heun_exponents() {
        let p = heun();
        let at0 = indicial_roots(&p, &FieldElement::zero()).unwrap();
        assert!(at0.contains(&FieldElement::zero()) && at0.contains(&fe(1, 2)));
        let at1 = indicial_roots(&p, &FieldElement::one()).unwrap();
        assert!(at1.contains(&FieldElement::zero()) && at1.contains(&fe(1, 2)));
    }

    #[test]
    fn heun_remainder_support() {
        let p = heun();
        let s = frobenius_series(&p, &FieldElement::zero(), &FieldElement::zero(), 8).unwrap();
        assert!(remainder_valuation(&p, &s).unwrap().unwrap() >= 7);
    }

    #[test]
    fn irregular_point_is_rejected() {
        // double confluent with nu != 0 at 0
        let p = HeunParams::DoubleConfluent { tau: fe(1, 2), nu: fe(1, 1), alpha: fe(1, 1), q: fe(1, 1) }.build_p().unwrap();
        assert!(matches!(indicial_roots(&p, &FieldElement::zero()), Err(Error::IrregularSingular(_))));
    }

    #[test]
    fn radius_guard() {
        let p = heun();
        let s = frobenius_series(&p, &FieldElement::zero(), &FieldElement::zero(), 4).unwrap();
        assert!(matches!(series_residual(&p, &s, &fe(3, 2), 8), Err(Error::RadiusTooLarge { .. })));
    }
}
