//! The seven operators of the Heun family and singular-point classification.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::roots::{roots, Root};
use crate::algebra::{FieldElement, Polynomial, RationalFunction};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Heun,
    Confluent,
    ReducedConfluent,
    Biconfluent,
    DoubleConfluent,
    Triconfluent,
    ReducedTriconfluent,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Heun,
        Family::Confluent,
        Family::ReducedConfluent,
        Family::Biconfluent,
        Family::DoubleConfluent,
        Family::Triconfluent,
        Family::ReducedTriconfluent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Heun => "heun",
            Family::Confluent => "confluent",
            Family::ReducedConfluent => "reduced_confluent",
            Family::Biconfluent => "biconfluent",
            Family::DoubleConfluent => "double_confluent",
            Family::Triconfluent => "triconfluent",
            Family::ReducedTriconfluent => "reduced_triconfluent",
        }
    }

    /// Parameter names in constructor order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Heun => &["a", "q", "alpha", "beta", "gamma", "delta"],
            Family::Confluent => &["p", "q", "alpha", "gamma", "delta"],
            Family::ReducedConfluent => &["kappa", "gamma", "delta", "q"],
            Family::Biconfluent | Family::DoubleConfluent => &["tau", "nu", "alpha", "q"],
            Family::Triconfluent => &["sigma", "alpha", "q"],
            Family::ReducedTriconfluent => &["a0", "a1", "a2"],
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Family::Heun => "p1 = gamma/x + delta/(x-1) + eps/(x-a), p0 = (alpha beta x - q)/(x(x-1)(x-a)), eps = alpha+beta+1-delta-gamma",
            Family::Confluent => "p1 = p + gamma/x + delta/(x-1), p0 = (p alpha x - q)/(x(x-1))",
            Family::ReducedConfluent => "p1 = gamma/x + delta/(x-1), p0 = (kappa x + q)/(x(x-1))",
            Family::Biconfluent => "p1 = tau/x + nu/x^2 - 1, p0 = -(alpha x + q)/x",
            Family::DoubleConfluent => "p1 = tau/x + nu/x^2 - 1, p0 = -(alpha x + q)/x^2",
            Family::Triconfluent => "p1 = sigma - x^2, p0 = alpha x - q",
            Family::ReducedTriconfluent => "p1 = 0, p0 = a0 + a1 x + a2 x^2 - (9/4) x^4",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown family {s:?}")))
    }
}

/// Parameters of one operator of the Heun hierarchy. The Heun `eps` is always derived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeunParams {
    Heun { a: FieldElement, q: FieldElement, alpha: FieldElement, beta: FieldElement, gamma: FieldElement, delta: FieldElement },
    Confluent { p: FieldElement, q: FieldElement, alpha: FieldElement, gamma: FieldElement, delta: FieldElement },
    ReducedConfluent { kappa: FieldElement, gamma: FieldElement, delta: FieldElement, q: FieldElement },
    Biconfluent { tau: FieldElement, nu: FieldElement, alpha: FieldElement, q: FieldElement },
    DoubleConfluent { tau: FieldElement, nu: FieldElement, alpha: FieldElement, q: FieldElement },
    Triconfluent { sigma: FieldElement, alpha: FieldElement, q: FieldElement },
    ReducedTriconfluent { a0: FieldElement, a1: FieldElement, a2: FieldElement },
}

impl HeunParams {
    pub fn family(&self) -> Family {
        match self {
            HeunParams::Heun { .. } => Family::Heun,
            HeunParams::Confluent { .. } => Family::Confluent,
            HeunParams::ReducedConfluent { .. } => Family::ReducedConfluent,
            HeunParams::Biconfluent { .. } => Family::Biconfluent,
            HeunParams::DoubleConfluent { .. } => Family::DoubleConfluent,
            HeunParams::Triconfluent { .. } => Family::Triconfluent,
            HeunParams::ReducedTriconfluent { .. } => Family::ReducedTriconfluent,
        }
    }

    /// Build from a name -> value map; every parameter of the family is
    /// required and unknown names are rejected.
    pub fn from_map(family: Family, map: &BTreeMap<String, FieldElement>) -> Result<Self> {
        if let Some(k) = map.keys().find(|k| !family.param_names().contains(&k.as_str())) {
            return Err(Error::InvalidParams(format!("unknown parameter {k:?} for {family}")));
        }
        let get = |name: &str| {
            map.get(name)
                .cloned()
                .ok_or_else(|| Error::InvalidParams(format!("missing parameter {name:?} for {family}")))
        };
        let params = match family {
            Family::Heun => HeunParams::Heun {
                a: get("a")?,
                q: get("q")?,
                alpha: get("alpha")?,
                beta: get("beta")?,
                gamma: get("gamma")?,
                delta: get("delta")?,
            },
            Family::Confluent => HeunParams::Confluent {
                p: get("p")?,
                q: get("q")?,
                alpha: get("alpha")?,
                gamma: get("gamma")?,
                delta: get("delta")?,
            },
            Family::ReducedConfluent => HeunParams::ReducedConfluent {
                kappa: get("kappa")?,
                gamma: get("gamma")?,
                delta: get("delta")?,
                q: get("q")?,
            },
            Family::Biconfluent => HeunParams::Biconfluent { tau: get("tau")?, nu: get("nu")?, alpha: get("alpha")?, q: get("q")? },
            Family::DoubleConfluent => HeunParams::DoubleConfluent { tau: get("tau")?, nu: get("nu")?, alpha: get("alpha")?, q: get("q")? },
            Family::Triconfluent => HeunParams::Triconfluent { sigma: get("sigma")?, alpha: get("alpha")?, q: get("q")? },
            Family::ReducedTriconfluent => HeunParams::ReducedTriconfluent { a0: get("a0")?, a1: get("a1")?, a2: get("a2")? },
        };
        params.validate()?;
        Ok(params)
    }

    pub fn to_map(&self) -> BTreeMap<String, FieldElement> {
        let vals: Vec<&FieldElement> = match self {
            HeunParams::Heun { a, q, alpha, beta, gamma, delta } => vec![a, q, alpha, beta, gamma, delta],
            HeunParams::Confluent { p, q, alpha, gamma, delta } => vec![p, q, alpha, gamma, delta],
            HeunParams::ReducedConfluent { kappa, gamma, delta, q } => vec![kappa, gamma, delta, q],
            HeunParams::Biconfluent { tau, nu, alpha, q } | HeunParams::DoubleConfluent { tau, nu, alpha, q } => {
                vec![tau, nu, alpha, q]
            }
            HeunParams::Triconfluent { sigma, alpha, q } => vec![sigma, alpha, q],
            HeunParams::ReducedTriconfluent { a0, a1, a2 } => vec![a0, a1, a2],
        };
        self.family()
            .param_names()
            .iter()
            .zip(vals)
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if let HeunParams::Heun { a, .. } = self {
            if a.is_zero() || a.is_one() {
                return Err(Error::InvalidParams(format!(
                    "heun requires a not in {{0, 1}} (got a = {a}); merged singular points are covered by the confluent constructors"
                )));
            }
        }
        Ok(())
    }

    /// `eps = alpha + beta + 1 - delta - gamma` for the Heun family.
    pub fn epsilon(&self) -> Option<FieldElement> {
        match self {
            HeunParams::Heun { alpha, beta, gamma, delta, .. } => {
                Some(&(&(alpha + beta) + &FieldElement::one()) - &(delta + gamma))
            }
            _ => None,
        }
    }

    /// Finite points where `p1` or `p0` may have poles.
    pub fn finite_singular_candidates(&self) -> Vec<FieldElement> {
        let zero = FieldElement::zero();
        let one = FieldElement::one();
        match self {
            HeunParams::Heun { a, .. } => vec![zero, one, a.clone()],
            HeunParams::Confluent { .. } | HeunParams::ReducedConfluent { .. } => vec![zero, one],
            HeunParams::Biconfluent { .. } | HeunParams::DoubleConfluent { .. } => vec![zero],
            HeunParams::Triconfluent { .. } | HeunParams::ReducedTriconfluent { .. } => Vec::new(),
        }
    }

    pub fn build_p(&self) -> Result<DiffOp> {
        self.validate()?;
        let c = |v: &FieldElement| RationalFunction::constant(v.clone());
        let pole = |c: &FieldElement, at: i64, k: usize| RationalFunction::pole_term(c, &FieldElement::from_i64(at), k);
        let x = RationalFunction::x();
        let one = FieldElement::one();
        let (p1, p0) = match self {
            HeunParams::Heun { a, q, alpha, beta, gamma, delta } => {
                let eps = self.epsilon().expect("heun");
                let p1 = &(&pole(gamma, 0, 1) + &pole(delta, 1, 1)) + &RationalFunction::pole_term(&eps, a, 1);
                let num = &(&x * &c(&(alpha * beta))) - &c(q);
                let den = &Polynomial::from_i64s(&[0, -1, 1]) * &Polynomial::linear(a);
                (p1, num.checked_div(&RationalFunction::from_poly(den))?)
            }
            HeunParams::Confluent { p, q, alpha, gamma, delta } => {
                let p1 = &(&c(p) + &pole(gamma, 0, 1)) + &pole(delta, 1, 1);
                let num = &(&x * &c(&(p * alpha))) - &c(q);
                (p1, num.checked_div(&RationalFunction::from_poly(Polynomial::from_i64s(&[0, -1, 1])))?)
            }
            HeunParams::ReducedConfluent { kappa, gamma, delta, q } => {
                let p1 = &pole(gamma, 0, 1) + &pole(delta, 1, 1);
                let num = &(&x * &c(kappa)) + &c(q);
                (p1, num.checked_div(&RationalFunction::from_poly(Polynomial::from_i64s(&[0, -1, 1])))?)
            }
            HeunParams::Biconfluent { tau, nu, alpha, q } | HeunParams::DoubleConfluent { tau, nu, alpha, q } => {
                let p1 = &(&pole(tau, 0, 1) + &pole(nu, 0, 2)) - &c(&one);
                let num = -&(&(&x * &c(alpha)) + &c(q));
                let k = if self.family() == Family::Biconfluent { 1 } else { 2 };
                (p1, num.checked_div(&RationalFunction::from_poly(Polynomial::monomial(one, k)))?)
            }
            HeunParams::Triconfluent { sigma, alpha, q } => (
                &c(sigma) - &(&x * &x),
                &(&x * &c(alpha)) - &c(q),
            ),
            HeunParams::ReducedTriconfluent { a0, a1, a2 } => {
                let p0 = Polynomial::new(vec![
                    a0.clone(),
                    a1.clone(),
                    a2.clone(),
                    FieldElement::zero(),
                    FieldElement::from_ratio(-9, 4),
                ]);
                (RationalFunction::zero(), RationalFunction::from_poly(p0))
            }
        };
        Ok(DiffOp::monic2(p1, p0))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "family": self.family().name(),
            "params": self.to_map().into_iter().map(|(k, v)| (k, v.to_json())).collect::<serde_json::Map<_, _>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let family: Family = v
            .get("family")
            .and_then(|f| f.as_str())
            .ok_or_else(|| Error::Json("params object needs a \"family\" string".into()))?
            .parse()?;
        let mut map = BTreeMap::new();
        if let Some(obj) = v.get("params").and_then(|p| p.as_object()) {
            for (k, val) in obj {
                map.insert(k.clone(), FieldElement::from_json(val)?);
            }
        }
        HeunParams::from_map(family, &map)
    }
}

impl Serialize for HeunParams {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for HeunParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        HeunParams::from_json(&v).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointKind {
    Ordinary,
    RegularSingular,
    IrregularSingular,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Location {
    Finite(Root),
    Infinity,
}

impl Location {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Location::Finite(r) => r.to_json()["value"].clone(),
            Location::Infinity => serde_json::json!("infinity"),
        }
    }
}

/// Fuchs criterion at `x0` for an operator with coefficients `a_k`: regular
/// iff `ord_{x0}(a_k / a_n) <= n - k`. `pole_order` gives the pole order of a
/// coefficient at the point.
fn fuchs_kind(op: &DiffOp, pole_order: impl Fn(&RationalFunction) -> isize) -> PointKind {
    let n = op.order();
    let lead = op.leading();
    let mut singular = false;
    for k in 0..n {
        let c = op.coeff(k);
        if c.is_zero() {
            continue;
        }
        let ratio = &c / &lead;
        let ord = pole_order(&ratio);
        if ord > (n - k) as isize {
            return PointKind::IrregularSingular;
        }
        if ord > 0 {
            singular = true;
        }
    }
    if singular {
        PointKind::RegularSingular
    } else {
        PointKind::Ordinary
    }
}

/// Kind of a finite point `x0` for `op`.
pub fn classify_point(op: &DiffOp, x0: &FieldElement) -> PointKind {
    fuchs_kind(op, |f| f.pole_order_at(x0))
}

/// Finite singular points (roots of coefficient denominators relative to the
/// leading coefficient) and the point at infinity.
pub fn classify_singularities(op: &DiffOp) -> Result<Vec<(Location, PointKind)>> {
    let n = op.order();
    if n == 0 {
        return Ok(vec![(Location::Infinity, PointKind::Ordinary)]);
    }
    let lead = op.leading();
    let mut den = Polynomial::one();
    for k in 0..n {
        let r = op.coeff(k).checked_div(&lead)?;
        den = &den * &r.den().exact_div(&den.gcd(r.den()))?;
    }
    let mut out = Vec::new();
    for root in roots(&den) {
        let kind = match root.exact() {
            Some(x0) => classify_point(op, x0),
            None => {
                // numerically located pole: compare multiplicities in each denominator
                let z = root.to_c64();
                fuchs_kind(op, |f| {
                    let m = |p: &Polynomial| {
                        let mut q = p.to_c64();
                        let mut k = 0isize;
                        while q.len() > 1 && horner(&q, z).norm() < 1e-9 * (1.0 + z.norm()).powi(q.len() as i32) {
                            q = synthetic_div(&q, z);
                            k += 1;
                        }
                        k
                    };
                    m(f.den()) - m(f.num())
                })
            }
        };
        out.push((Location::Finite(root), kind));
    }
    // infinity: x = 1/t, then classify t = 0
    let at_inf = op.invert_variable();
    out.push((Location::Infinity, classify_point(&at_inf, &FieldElement::zero())));
    Ok(out)
}

fn horner(c: &[num_complex::Complex64], z: num_complex::Complex64) -> num_complex::Complex64 {
    c.iter().rev().fold(num_complex::Complex64::new(0.0, 0.0), |a, k| a * z + k)
}

fn synthetic_div(c: &[num_complex::Complex64], z: num_complex::Complex64) -> Vec<num_complex::Complex64> {
    let n = c.len() - 1;
    let mut out = vec![num_complex::Complex64::new(0.0, 0.0); n];
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for i in (0..n).rev() {
        acc = acc * z + c[i + 1];
        out[i] = acc;
    }
    out
}
