//! Exact Gaussian elimination, and rational integration built on it.

use super::field::FieldElement;
use super::poly::Polynomial;
use super::ratfunc::RationalFunction;
use crate::error::{Error, Result};

/// Solve the square system `m * x = rhs` exactly.
pub fn solve(mut m: Vec<Vec<FieldElement>>, mut rhs: Vec<FieldElement>) -> Result<Vec<FieldElement>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::Singular("linear system is singular".into()))?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = m[col][col].inv()?;
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].checked_mul(&inv)?;
            for c in col..n {
                let t = f.checked_mul(&m[col][c])?;
                m[r][c] = m[r][c].checked_sub(&t)?;
            }
            let t = f.checked_mul(&rhs[col])?;
            rhs[r] = rhs[r].checked_sub(&t)?;
        }
    }
    (0..n).map(|i| rhs[i].checked_mul(&m[i][i].inv()?)).collect()
}

fn integrate_poly(p: &Polynomial) -> Polynomial {
    let mut c = vec![FieldElement::zero()];
    c.extend(
        p.coeffs()
            .iter()
            .enumerate()
            .map(|(k, a)| a / &FieldElement::from_i64(k as i64 + 1)),
    );
    Polynomial::new(c)
}

/// Rational antiderivative with zero constant of integration at the polynomial
/// part. Fails with [`Error::LogarithmicTerm`] when the integral has a
/// logarithmic part (Horowitz-Ostrogradsky).
pub fn integrate_rational(f: &RationalFunction) -> Result<RationalFunction> {
    let (poly, proper) = f.split_proper();
    let poly_int = RationalFunction::from_poly(integrate_poly(&poly));
    if proper.is_zero() {
        return Ok(poly_int);
    }
    let d = proper.den();
    let d1 = d.gcd(&d.derivative());
    let d2 = d.exact_div(&d1)?;
    let n = d.degree().expect("nonconstant denominator");
    let m = d1.degree().unwrap_or(0);
    let k = n - m;
    // A = B' D2 - B H + C D1 with H = D2 D1' / D1
    let h = (&d2 * &d1.derivative()).exact_div(&d1)?;
    let mut cols: Vec<Polynomial> = Vec::with_capacity(n);
    for j in 0..m {
        let b = Polynomial::monomial(FieldElement::one(), j);
        cols.push(&(&b.derivative() * &d2) - &(&b * &h));
    }
    for j in 0..k {
        cols.push(&Polynomial::monomial(FieldElement::one(), j) * &d1);
    }
    let mat = (0..n).map(|row| cols.iter().map(|c| c.coeff(row)).collect()).collect();
    let rhs = (0..n).map(|row| proper.num().coeff(row)).collect();
    let sol = solve(mat, rhs)?;
    let c = Polynomial::new(sol[m..].to_vec());
    if !c.is_zero() {
        let log_part = RationalFunction::new(c, d2)?;
        return Err(Error::LogarithmicTerm(log_part.to_string()));
    }
    let b = Polynomial::new(sol[..m].to_vec());
    Ok(&poly_int + &RationalFunction::new(b, d1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let fe = FieldElement::from_i64;
        let m = vec![vec![fe(0), fe(1)], vec![fe(2), fe(1)]];
        let x = solve(m, vec![fe(3), fe(5)]).unwrap();
        assert_eq!(x, vec![fe(1), fe(3)]);
    }

    #[test]
    fn integrates_exact_derivatives() {
        // d/dx [ (x+1)/(x^2 (x-3)) + x^2 ] integrates back up to a constant
        let g = &RationalFunction::new(Polynomial::from_i64s(&[1, 1]), Polynomial::from_i64s(&[0, 0, -3, 1])).unwrap()
            + &RationalFunction::from_poly(Polynomial::from_i64s(&[0, 0, 1]));
        let back = integrate_rational(&g.derivative()).unwrap();
        assert!((&back - &g).is_constant());
    }

    #[test]
    fn simple_pole_is_logarithmic() {
        let f = RationalFunction::new(Polynomial::one(), Polynomial::from_i64s(&[-1, 1])).unwrap();
        assert!(matches!(integrate_rational(&f), Err(Error::LogarithmicTerm(_))));
    }
}
