//! Registry of the enumerated commuting cases and the pipeline that checks
//! them: exact commutation, factorization symmetry, annihilation of each
//! listed solution, and a diff against the printed coefficient tables.
//!
//! Case data lives in `data/catalog.json`. All parameter values, fixed
//! relations and basis functions are written in the expression language of
//! [`crate::expr`]; integration constants use the labels of the printed
//! families and are mapped with [`from_absorbed_labels`] before building `Q`.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{FieldElement, LaurentPolynomial, RationalFunction};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::expr::{self, Env};
use crate::family::{Family, HeunParams};
use crate::funcalg::{apply_op, wronskian, ExpMonomial, FunctionSum};
use crate::semicommute::{build_q, from_absorbed_labels, residual, SemiCommuteSpec};
use crate::series::{default_radius, frobenius_series, series_residual};

const BUNDLED: &str = include_str!("../data/catalog.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Factor {
    P,
    Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    #[default]
    Rational,
    /// Excludes integers (keeps Frobenius exponents non-resonant).
    Nonint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeParam {
    pub name: String,
    #[serde(default)]
    pub kind: ParamKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesMarker {
    pub x0: String,
    pub rho: String,
}

/// One solution: `rat * x^rho * e^exp`, or a Frobenius series of the factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub factor: Factor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rat: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<SeriesMarker>,
}

impl BasisEntry {
    pub fn label(&self) -> String {
        if let Some(s) = &self.series {
            return format!("{:?}: series at {} exponent {}", self.factor, s.x0, s.rho);
        }
        let mut out = self.rat.clone().unwrap_or_else(|| "1".into());
        if let Some(r) = &self.rho {
            out = format!("({out}) x^({r})");
        }
        if let Some(e) = &self.exp {
            out = format!("({out}) e^({e})");
        }
        format!("{:?}: {out}", self.factor)
    }
}

/// A printed operator: coefficients by derivative order (from a shared
/// template or inline), the leading coefficient it is normalized to, and
/// named values. Template names not given a value are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrintedOp {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lead: Option<String>,
    #[serde(default)]
    pub values: Vec<String>,
    /// Names that default to zero when not given a value.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub coeffs: Vec<String>,
    pub names: Vec<String>,
}

/// The printed semi-commuting `Q` of one family and degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrintedQ {
    pub family: Family,
    pub degree: u8,
    pub coeffs: Vec<String>,
}

/// Exponential gauge `e^{-g} (Q / lead) e^{g}` compared with a printed operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrintedGauge {
    pub exponent: String,
    #[serde(default)]
    pub values: Vec<String>,
    pub coeffs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnownDiscrepancy {
    /// `"L d^k"`, `"Q d^k"`, `"basis"` or `"gauge d^k"`.
    pub item: String,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Referral {
    pub target: String,
    #[serde(default)]
    pub substitute: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub id: String,
    pub family: Family,
    pub degree: u8,
    pub anchor: String,
    #[serde(default)]
    pub free: Vec<FreeParam>,
    #[serde(default)]
    pub fixed: Vec<String>,
    #[serde(default)]
    pub derived: Vec<String>,
    #[serde(default)]
    pub nonzero: Vec<String>,
    #[serde(default)]
    pub example: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<(String, String)>,
    #[serde(default)]
    pub basis: Vec<BasisEntry>,
    /// Overrides the family-level printed `Q` for this record.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_q: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_l: Option<PrintedOp>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub printed_basis: Vec<BasisEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed_gauge: Option<PrintedGauge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub known_discrepancies: Vec<KnownDiscrepancy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub referral: Option<Referral>,
    /// The record asserts that only `beta1 = 0` commutes.
    #[serde(default)]
    pub no_nontrivial: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub version: u32,
    #[serde(default)]
    pub templates: BTreeMap<String, Template>,
    #[serde(default)]
    pub printed_q: Vec<PrintedQ>,
    pub cases: Vec<CaseRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesOptions {
    pub truncation: usize,
    /// Explicit radius; otherwise a tenth of the nearest-singularity distance.
    pub radius: Option<f64>,
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions { truncation: 40, radius: None, samples: 8, tolerance: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisVerdict {
    pub label: String,
    pub method: String,
    pub by_factor: bool,
    pub by_l: bool,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "approx")]
    pub residual: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub item: String,
    pub printed: String,
    pub computed: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationVerdict {
    pub id: String,
    pub params: BTreeMap<String, FieldElement>,
    pub commutator_zero: bool,
    pub factorization_equal: bool,
    pub basis_annihilated: Vec<BasisVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "approx")]
    pub wronskian: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge_match: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nontrivial_excluded: Option<bool>,
    pub printed_diff: Vec<Mismatch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub pass: bool,
}

impl VerificationVerdict {
    fn failed(id: &str, params: BTreeMap<String, FieldElement>, e: Error) -> Self {
        VerificationVerdict {
            id: id.to_string(),
            params,
            commutator_zero: false,
            factorization_equal: false,
            basis_annihilated: Vec::new(),
            wronskian: None,
            gauge_match: None,
            nontrivial_excluded: None,
            printed_diff: Vec::new(),
            error: Some(e.to_string()),
            pass: false,
        }
    }

    fn settle(&mut self) {
        self.pass = self.error.is_none()
            && self.commutator_zero
            && self.factorization_equal
            && self.basis_annihilated.iter().all(|b| b.pass)
            && self.nontrivial_excluded != Some(false);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub id: String,
    #[serde(flatten)]
    pub mismatch: Mismatch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: Vec<String>,
    pub commutator_zero: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub summary: Summary,
    pub cases: Vec<VerificationVerdict>,
    pub diffs: Vec<DiffEntry>,
}

/// Floating-point diagnostics are emitted as `{"value": f, "approx": true}`
/// so that they are never confused with exact quantities.
mod approx {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Tagged {
        value: f64,
        approx: bool,
    }

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(|value| Tagged { value, approx: true }).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Tagged>::deserialize(d)?.map(|t| t.value))
    }
}

fn constant_env(params: &BTreeMap<String, FieldElement>) -> Env {
    params.iter().map(|(k, v)| (k.clone(), RationalFunction::constant(v.clone()))).collect()
}

fn get_const(env: &Env, name: &str) -> Result<FieldElement> {
    env.get(name)
        .ok_or_else(|| Error::Catalog(format!("no value for {name:?}")))?
        .as_constant()
        .ok_or_else(|| Error::Catalog(format!("{name:?} is not a constant")))
}

/// FNV-1a, used to derive a per-record stream from the global seed.
fn stream_id(id: &str, draw: u64) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in id.bytes().chain(draw.to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn sample_value(rng: &mut ChaCha8Rng, kind: ParamKind) -> FieldElement {
    loop {
        let n: i64 = rng.random_range(-8..=8);
        let d: i64 = rng.random_range(1..=4);
        if kind == ParamKind::Nonint && n % d == 0 {
            continue;
        }
        return FieldElement::from_ratio(n, d);
    }
}

impl Catalog {
    pub fn bundled() -> Result<Catalog> {
        Self::from_json_str(BUNDLED)
    }

    pub fn from_json_str(s: &str) -> Result<Catalog> {
        let cat: Catalog = serde_json::from_str(s)?;
        let mut seen = BTreeSet::new();
        for c in &cat.cases {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::Catalog(format!("duplicate id {}", c.id)));
            }
        }
        for c in &cat.cases {
            if let Some(r) = &c.referral {
                if cat.get(&r.target).is_none() {
                    return Err(Error::Catalog(format!("{} refers to unknown {}", c.id, r.target)));
                }
            }
        }
        Ok(cat)
    }

    pub fn empty() -> Catalog {
        Catalog { version: 1, ..Default::default() }
    }

    pub fn enumerate_cases(&self) -> &[CaseRecord] {
        &self.cases
    }

    pub fn get(&self, id: &str) -> Option<&CaseRecord> {
        self.cases.iter().find(|c| c.id == id)
    }

    pub fn record(&self, id: &str) -> Result<&CaseRecord> {
        self.get(id).ok_or_else(|| Error::UnknownCase(id.to_string()))
    }

    /// Full evaluation environment: free values, then fixed relations (unless
    /// overridden), then derived names.
    pub fn environment(&self, rec: &CaseRecord, values: &BTreeMap<String, FieldElement>) -> Result<Env> {
        for f in &rec.free {
            if !values.contains_key(&f.name) {
                return Err(Error::InvalidParams(format!("{}: missing value for {}", rec.id, f.name)));
            }
        }
        let mut env = constant_env(values);
        for b in &rec.fixed {
            let (n, e) = expr::split_binding(b)?;
            if values.contains_key(n) {
                continue;
            }
            let v = expr::eval(e, &env)?;
            env.insert(n.to_string(), v);
        }
        if rec.family == Family::Heun && !env.contains_key("eps") {
            let eps = expr::eval("alpha + beta + 1 - delta - gamma", &env)?;
            env.insert("eps".into(), eps);
        }
        expr::bind_all(&rec.derived, &mut env)?;
        Ok(env)
    }

    /// Documented example values of the free parameters, if any.
    pub fn example(&self, rec: &CaseRecord) -> Result<Option<BTreeMap<String, FieldElement>>> {
        if rec.example.is_empty() {
            return Ok(None);
        }
        let mut env = Env::new();
        expr::bind_all(&rec.example, &mut env)?;
        let mut out = BTreeMap::new();
        for (k, v) in env {
            let c = v.as_constant().ok_or_else(|| Error::Catalog(format!("{}: example {k} not constant", rec.id)))?;
            out.insert(k, c);
        }
        Ok(Some(out))
    }

    /// Deterministic admissible draw `draw` for `seed`: small rationals,
    /// resampled until every `nonzero` expression is nonzero and `P` is valid.
    pub fn sample(&self, rec: &CaseRecord, seed: u64, draw: u64) -> Result<BTreeMap<String, FieldElement>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ stream_id(&rec.id, draw));
        for _ in 0..10_000 {
            let values: BTreeMap<String, FieldElement> =
                rec.free.iter().map(|f| (f.name.clone(), sample_value(&mut rng, f.kind))).collect();
            if self.admissible(rec, &values) {
                return Ok(values);
            }
        }
        Err(Error::Catalog(format!("{}: no admissible parameters found", rec.id)))
    }

    fn admissible(&self, rec: &CaseRecord, values: &BTreeMap<String, FieldElement>) -> bool {
        let check = || -> Result<bool> {
            let env = self.environment(rec, values)?;
            for c in &rec.nonzero {
                if expr::eval(c, &env)?.is_zero() {
                    return Ok(false);
                }
            }
            family_params(rec.family, &env)?.validate()?;
            Ok(true)
        };
        check().unwrap_or(false)
    }

    fn printed_q(&self, family: Family, degree: u8) -> Option<&PrintedQ> {
        self.printed_q.iter().find(|p| p.family == family && p.degree == degree)
    }

    /// Run every check of one record at the given free-parameter values
    /// (plus optional overrides of fixed names).
    pub fn verify_case(
        &self,
        rec: &CaseRecord,
        values: &BTreeMap<String, FieldElement>,
        opts: &SeriesOptions,
    ) -> VerificationVerdict {
        let mut v = match self.verify_inner(rec, values, opts) {
            Ok(v) => v,
            Err(e) => return VerificationVerdict::failed(&rec.id, values.clone(), e),
        };
        if let Some((s, t)) = &rec.symmetry {
            match self.swapped_values(rec, values, s, t).and_then(|sw| self.verify_inner(rec, &sw, opts)) {
                Ok(w) => {
                    v.commutator_zero &= w.commutator_zero;
                    v.factorization_equal &= w.factorization_equal;
                    v.basis_annihilated.extend(w.basis_annihilated.into_iter().map(|mut b| {
                        b.label = format!("{} [{s}<->{t}]", b.label);
                        b
                    }));
                }
                Err(e) => v.error = Some(format!("swapped orientation: {e}")),
            }
        }
        v.settle();
        v
    }

    /// Values with the two symmetric names exchanged (evaluated, then pinned
    /// as overrides).
    fn swapped_values(
        &self,
        rec: &CaseRecord,
        values: &BTreeMap<String, FieldElement>,
        s: &str,
        t: &str,
    ) -> Result<BTreeMap<String, FieldElement>> {
        let env = self.environment(rec, values)?;
        let mut out = values.clone();
        out.insert(s.to_string(), get_const(&env, t)?);
        out.insert(t.to_string(), get_const(&env, s)?);
        Ok(out)
    }

    fn verify_inner(
        &self,
        rec: &CaseRecord,
        values: &BTreeMap<String, FieldElement>,
        opts: &SeriesOptions,
    ) -> Result<VerificationVerdict> {
        let env = self.environment(rec, values)?;
        let hp = family_params(rec.family, &env)?;
        hp.validate()?;
        let p = hp.build_p()?;
        let printed_spec = labelled_spec(rec.degree, &env)?;
        let spec = from_absorbed_labels(&p, &printed_spec)?;
        let q = build_q(&p, &spec)?;

        let pq = p.compose(&q);
        let qp = q.compose(&p);
        let l = qp.clone();
        let mut out = VerificationVerdict {
            id: rec.id.clone(),
            params: values.clone(),
            commutator_zero: (&pq - &qp).is_zero(),
            factorization_equal: qp.op_equal(&pq),
            basis_annihilated: Vec::new(),
            wronskian: None,
            gauge_match: None,
            nontrivial_excluded: None,
            printed_diff: Vec::new(),
            error: None,
            pass: false,
        };

        let (basis, basis_env) = match &rec.referral {
            Some(r) => {
                let target = self.record(&r.target)?;
                let mut e = env.clone();
                expr::bind_all(&r.substitute, &mut e)?;
                expr::bind_all(&target.derived, &mut e)?;
                (target.basis.clone(), e)
            }
            None => (rec.basis.clone(), env.clone()),
        };
        let mut closed = Vec::new();
        for b in &basis {
            let verdict = check_basis(b, &basis_env, &p, &q, &l, opts)?;
            if b.series.is_none() {
                closed.push(basis_function(b, &basis_env)?);
            }
            out.basis_annihilated.push(verdict);
        }
        if !closed.is_empty() && closed.len() == basis.len() && closed.len() == l.order() {
            out.wronskian = Some(wronskian(&closed, Complex64::new(1.0 / 3.0, 0.0))?.norm());
        }

        if rec.no_nontrivial {
            out.nontrivial_excluded = Some(nontrivial_excluded(&p)?);
        }
        let printed_q = rec.printed_q.as_ref().or(self.printed_q(rec.family, rec.degree).map(|p| &p.coeffs));
        if let Some(coeffs) = printed_q {
            let printed = DiffOp::new(eval_all(coeffs, &env)?);
            diff_ops("Q", &printed, &q, rec, &mut out.printed_diff);
        }
        if let Some(pl) = &rec.printed_l {
            let (printed, lead) = self.printed_operator(pl, &env)?;
            let lc = l.leading().as_constant().ok_or_else(|| Error::Catalog("non-constant leading coefficient".into()))?;
            let scaled = l.scale(&lead.checked_div(&lc)?);
            diff_ops("L", &printed, &scaled, rec, &mut out.printed_diff);
        }
        if let Some(g) = &rec.printed_gauge {
            let mut e = env.clone();
            expr::bind_all(&g.values, &mut e)?;
            let exponent = LaurentPolynomial::from_rational_function(&expr::eval(&g.exponent, &e)?)?;
            let computed = q.monic().gauge_transform(&exponent);
            let printed = DiffOp::new(eval_all(&g.coeffs, &e)?);
            let before = out.printed_diff.len();
            diff_ops("gauge", &printed, &computed, rec, &mut out.printed_diff);
            out.gauge_match = Some(out.printed_diff.len() == before);
        }
        if !rec.printed_basis.is_empty() {
            let fs = rec.printed_basis.iter().map(|b| basis_function(b, &env)).collect::<Result<Vec<_>>>()?;
            let annihilated = fs.iter().all(|f| apply_op(&l, f).is_zero());
            let w = wronskian(&fs, Complex64::new(1.0 / 3.0, 0.0))?.norm();
            if !annihilated || w <= 1e-8 {
                let labels: Vec<String> = rec.printed_basis.iter().map(BasisEntry::label).collect();
                out.printed_diff.push(Mismatch {
                    item: "basis".into(),
                    printed: labels.join(", "),
                    computed: format!("annihilated by L: {annihilated}, |W(1/3)| = {w:.3e}"),
                    known: known(rec, "basis"),
                });
            }
        }
        Ok(out)
    }

    fn printed_operator(&self, pl: &PrintedOp, env: &Env) -> Result<(DiffOp, FieldElement)> {
        let mut e = env.clone();
        for n in &pl.names {
            e.insert(n.clone(), RationalFunction::zero());
        }
        let coeffs = match (&pl.template, &pl.coeffs) {
            (Some(t), None) => {
                let t = self.templates.get(t).ok_or_else(|| Error::Catalog(format!("unknown template {t}")))?;
                for n in &t.names {
                    e.insert(n.clone(), RationalFunction::zero());
                }
                t.coeffs.clone()
            }
            (None, Some(c)) => c.clone(),
            _ => return Err(Error::Catalog("printed operator needs exactly one of template, coeffs".into())),
        };
        expr::bind_all(&pl.values, &mut e)?;
        let mut cs = eval_all(&coeffs, &e)?;
        let lead = match &pl.lead {
            Some(l) => expr::parse(l)?.eval_constant(&e)?,
            None => cs
                .last()
                .and_then(RationalFunction::as_constant)
                .ok_or_else(|| Error::Catalog("printed leading coefficient must be constant".into()))?,
        };
        if let Some(top) = cs.last_mut() {
            *top = RationalFunction::constant(lead.clone());
        }
        Ok((DiffOp::new(cs), lead))
    }

    /// Verify at the example values when present, else at draw 0 of `seed`.
    pub fn verify_default(&self, rec: &CaseRecord, seed: u64, opts: &SeriesOptions) -> VerificationVerdict {
        let values = match self.example(rec) {
            Ok(Some(v)) => Ok(v),
            Ok(None) => self.sample(rec, seed, 0),
            Err(e) => Err(e),
        };
        match values {
            Ok(v) => self.verify_case(rec, &v, opts),
            Err(e) => VerificationVerdict::failed(&rec.id, BTreeMap::new(), e),
        }
    }

    /// Verify every record (in parallel) at seeded admissible parameters.
    pub fn verify_all(&self, seed: u64, opts: &SeriesOptions) -> Report {
        let mut cases: Vec<VerificationVerdict> = self
            .cases
            .par_iter()
            .map(|rec| match self.sample(rec, seed, 0) {
                Ok(v) => self.verify_case(rec, &v, opts),
                Err(e) => VerificationVerdict::failed(&rec.id, BTreeMap::new(), e),
            })
            .collect();
        cases.sort_by(|a, b| a.id.cmp(&b.id));
        let diffs = cases
            .iter()
            .flat_map(|c| c.printed_diff.iter().map(|m| DiffEntry { id: c.id.clone(), mismatch: m.clone() }))
            .collect();
        let summary = Summary {
            total: cases.len(),
            passed: cases.iter().filter(|c| c.pass).count(),
            failed: cases.iter().filter(|c| !c.pass).map(|c| c.id.clone()).collect(),
            commutator_zero: cases.iter().filter(|c| c.commutator_zero).count(),
        };
        Report { seed, summary, cases, diffs }
    }
}

fn known(rec: &CaseRecord, item: &str) -> Option<String> {
    rec.known_discrepancies.iter().find(|k| k.item == item).map(|k| k.note.clone())
}

fn diff_ops(tag: &str, printed: &DiffOp, computed: &DiffOp, rec: &CaseRecord, out: &mut Vec<Mismatch>) {
    let n = printed.coeffs().len().max(computed.coeffs().len());
    for k in 0..n {
        let (a, b) = (printed.coeff(k), computed.coeff(k));
        if a != b {
            let item = format!("{tag} d^{k}");
            out.push(Mismatch { known: known(rec, &item), item, printed: a.to_string(), computed: b.to_string() });
        }
    }
}

fn eval_all(src: &[String], env: &Env) -> Result<Vec<RationalFunction>> {
    src.iter().map(|s| expr::eval(s, env)).collect()
}

pub fn family_params(family: Family, env: &Env) -> Result<HeunParams> {
    let mut map = BTreeMap::new();
    for n in family.param_names() {
        map.insert(n.to_string(), get_const(env, n)?);
    }
    HeunParams::from_map(family, &map)
}

/// Integration constants as labelled in the printed families.
pub fn labelled_spec(degree: u8, env: &Env) -> Result<SemiCommuteSpec> {
    match degree {
        1 => Ok(SemiCommuteSpec::degree1(get_const(env, "beta1")?, get_const(env, "beta0")?)),
        2 => Ok(SemiCommuteSpec::degree2(get_const(env, "beta2")?, get_const(env, "beta1")?, get_const(env, "beta0")?)),
        d => Err(Error::Catalog(format!("unsupported degree {d}"))),
    }
}

pub fn basis_function(b: &BasisEntry, env: &Env) -> Result<FunctionSum> {
    let rat = match &b.rat {
        Some(s) => expr::eval(s, env)?,
        None => RationalFunction::one(),
    };
    let rho = match &b.rho {
        Some(s) => expr::parse(s)?.eval_constant(env)?,
        None => FieldElement::zero(),
    };
    let g = match &b.exp {
        Some(s) => LaurentPolynomial::from_rational_function(&expr::eval(s, env)?)?,
        None => LaurentPolynomial::zero(),
    };
    Ok(FunctionSum::from_mono(ExpMonomial::new(rat, rho, g)?))
}

fn check_basis(b: &BasisEntry, env: &Env, p: &DiffOp, q: &DiffOp, l: &DiffOp, opts: &SeriesOptions) -> Result<BasisVerdict> {
    let factor = match b.factor {
        Factor::P => p,
        Factor::Q => q,
    };
    if let Some(s) = &b.series {
        let x0 = expr::parse(&s.x0)?.eval_constant(env)?;
        let rho = expr::parse(&s.rho)?.eval_constant(env)?;
        let sol = frobenius_series(factor, &x0, &rho, opts.truncation)?;
        let r = match opts.radius {
            Some(r) => FieldElement::from_rational(
                num_rational::BigRational::from_float(r).ok_or_else(|| Error::InvalidParams("bad radius".into()))?,
            ),
            None => default_radius(l, &x0, 0.1)?,
        };
        let rf = series_residual(factor, &sol, &r, opts.samples)?;
        let rl = series_residual(l, &sol, &r, opts.samples)?;
        let worst = rf.max(rl);
        return Ok(BasisVerdict {
            label: b.label(),
            method: "series".into(),
            by_factor: rf <= opts.tolerance,
            by_l: rl <= opts.tolerance,
            residual: Some(worst),
            pass: worst <= opts.tolerance,
        });
    }
    let f = basis_function(b, env)?;
    let by_factor = apply_op(factor, &f).is_zero();
    let by_l = apply_op(l, &f).is_zero();
    Ok(BasisVerdict { label: b.label(), method: "exact".into(), by_factor, by_l, residual: None, pass: by_factor && by_l })
}

/// With `beta1 = 1, beta0 = 0` the degree-1 residual is nonzero, so only
/// `beta1 = 0` commutes.
fn nontrivial_excluded(p: &DiffOp) -> Result<bool> {
    let q = build_q(p, &SemiCommuteSpec::degree1(FieldElement::one(), FieldElement::zero()))?;
    Ok(!residual(p, &q)?.commutes)
}
