//! Polynomial roots: exact where the root lies in the active field, numeric
//! (companion-matrix eigenvalues) otherwise.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use super::field::{rat, FieldElement, GaussRat};
use super::poly::Polynomial;

#[derive(Clone, Debug, PartialEq)]
pub enum Root {
    Exact { value: FieldElement, multiplicity: usize },
    Approx { value: Complex64, multiplicity: usize },
}

impl Root {
    pub fn to_c64(&self) -> Complex64 {
        match self {
            Root::Exact { value, .. } => value.to_c64(),
            Root::Approx { value, .. } => *value,
        }
    }

    pub fn multiplicity(&self) -> usize {
        match self {
            Root::Exact { multiplicity, .. } | Root::Approx { multiplicity, .. } => *multiplicity,
        }
    }

    pub fn exact(&self) -> Option<&FieldElement> {
        match self {
            Root::Exact { value, .. } => Some(value),
            Root::Approx { .. } => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Root::Exact { value, multiplicity } => {
                serde_json::json!({ "value": value.to_json(), "multiplicity": multiplicity })
            }
            Root::Approx { value, multiplicity } => serde_json::json!({
                "value": { "re": value.re, "im": value.im },
                "multiplicity": multiplicity,
                "approx": true,
            }),
        }
    }
}

impl Serialize for Root {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Numeric roots of a polynomial with complex coefficients, polished by Newton steps.
pub fn numeric_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|z| *z == Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    let (_, t) = comp.schur().unpack();
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |a, k| a * z + k);
    let deriv: Vec<Complex64> = (1..=n).map(|k| c[k] * k as f64).collect();
    let eval_d = |z: Complex64| deriv.iter().rev().fold(Complex64::new(0.0, 0.0), |a, k| a * z + k);
    (0..n)
        .map(|i| {
            let mut z = t[(i, i)];
            for _ in 0..3 {
                let d = eval_d(z);
                if d.norm() == 0.0 {
                    break;
                }
                let step = eval(z) / d;
                if !step.is_finite() {
                    break;
                }
                z -= step;
            }
            z
        })
        .collect()
}

/// Best rational approximation with denominator at most `max_den`, if it is
/// within `tol` of `x`.
fn snap_rational(x: f64, max_den: i64, tol: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..40 {
        let a = r.floor();
        if a.abs() > 1e12 {
            return None;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64) / (k1 as f64) - x).abs() <= tol {
            return Some(rat(h1, k1));
        }
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    (k1 != 0 && ((h1 as f64) / (k1 as f64) - x).abs() <= tol).then(|| rat(h1, k1))
}

fn snap(z: Complex64) -> Option<FieldElement> {
    let tol = 1e-7 * z.norm().max(1.0);
    let re = snap_rational(z.re, 10_000, tol)?;
    let im = snap_rational(z.im, 10_000, tol)?;
    Some(FieldElement::from_gauss(GaussRat::new(re, im)))
}

/// Roots of `p` with multiplicities. Rational and Gaussian-rational roots are
/// returned exactly, as are the roots of a leftover quadratic over the base
/// field; the remainder is numeric.
pub fn roots(p: &Polynomial) -> Vec<Root> {
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree_factors() {
        let mut f = factor;
        if f.coeffs().iter().all(|c| c.ext().is_none()) {
            for z in numeric_roots(&f.to_c64()) {
                let Some(r) = snap(z) else { continue };
                if f.try_eval(&r).is_ok_and(|v| v.is_zero()) {
                    f = f.exact_div(&Polynomial::linear(&r)).expect("exact root divides");
                    out.push(Root::Exact { value: r, multiplicity: mult });
                }
            }
        }
        match f.degree() {
            Some(1) => {
                let r = -(f.coeff(0) / f.coeff(1));
                out.push(Root::Exact { value: r, multiplicity: mult });
            }
            Some(2) if f.coeffs().iter().all(|c| c.ext().is_none()) => {
                let (a, b, c) = (f.coeff(2), f.coeff(1), f.coeff(0));
                let disc = &(&b * &b) - &(&FieldElement::from_i64(4) * &(&a * &c));
                let s = disc.sqrt().expect("base-field discriminant");
                let two_a = &FieldElement::from_i64(2) * &a;
                for sign in [1, -1] {
                    let num = &(-&b) + &(&FieldElement::from_i64(sign) * &s);
                    out.push(Root::Exact { value: &num / &two_a, multiplicity: mult });
                }
            }
            Some(d) if d > 0 => {
                for z in numeric_roots(&f.to_c64()) {
                    out.push(Root::Approx { value: z, multiplicity: mult });
                }
            }
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roots_are_exact() {
        // (x - 1/3)^2 (x + 2)
        let p = &Polynomial::linear(&FieldElement::from_ratio(1, 3)).pow(2)
            * &Polynomial::linear(&FieldElement::from_i64(-2));
        let rs = roots(&p);
        assert_eq!(rs.len(), 2);
        assert!(rs.contains(&Root::Exact { value: FieldElement::from_ratio(1, 3), multiplicity: 2 }));
        assert!(rs.contains(&Root::Exact { value: FieldElement::from_i64(-2), multiplicity: 1 }));
    }

    #[test]
    fn irrational_quadratic_roots_use_extension() {
        let rs = roots(&Polynomial::from_i64s(&[-2, 0, 1]));
        assert_eq!(rs.len(), 2);
        for r in &rs {
            let v = r.exact().unwrap();
            assert_eq!(v * v, FieldElement::from_i64(2));
        }
    }

    #[test]
    fn higher_degree_irreducible_is_numeric() {
        // x^3 - 2
        let rs = roots(&Polynomial::from_i64s(&[-2, 0, 0, 1]));
        assert_eq!(rs.len(), 3);
        for r in rs {
            let z = r.to_c64();
            assert!((z * z * z - 2.0).norm() < 1e-12);
            assert!(r.exact().is_none());
        }
    }

    #[test]
    fn gaussian_roots() {
        // x^2 + 1
        let rs = roots(&Polynomial::from_i64s(&[1, 0, 1]));
        assert!(rs.iter().all(|r| r.exact().is_some()));
    }
}
