//! Command-line front end.
//!
//! Output is JSON by default (exact numbers as rational strings, floating
//! diagnostics tagged `"approx": true`) or plain text with `--format text`.
//! Exit codes: 0 success, 1 a check was falsified, 2 usage or input error.

use std::collections::BTreeMap;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::algebra::{FieldElement, LaurentPolynomial, RationalFunction};
use crate::catalog::{Catalog, Report, SeriesOptions, VerificationVerdict};
use crate::diffop::DiffOp;
use crate::expr::{self, Env};
use crate::family::{classify_singularities, Family, HeunParams};
use crate::semicommute::{self, ResidualReport, SemiCommuteSpec};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "heunops", version, about = "Exact commuting operators for the Heun family")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the seven families and their parameters.
    Families,
    /// Build P and classify its singular points.
    Build(OpSource),
    /// Build the semi-commuting operator Q of degree 1 or 2.
    Semicommute(SemiArgs),
    /// Order-0 residual of [P, Q] and the points where it vanishes.
    Residual(ResidualArgs),
    /// Only the points where the residual of [P, Q] vanishes.
    LocalPoints(ResidualArgs),
    /// Compose two operators; also reports their commutator.
    Compose {
        /// Left factor (operator syntax as for --op).
        #[arg(long)]
        left: String,
        /// Right factor.
        #[arg(long)]
        right: String,
    },
    /// Gauge transform e^{-g} A e^{g} for a Laurent polynomial g.
    Gauge {
        #[command(flatten)]
        src: OpSource,
        /// Exponent g as an expression in x, e.g. "x^2/2 - 1/x".
        #[arg(long)]
        exponent: String,
    },
    /// Verify one catalog record.
    VerifyCase {
        #[arg(long)]
        id: String,
        /// `name=value` pairs (repeatable or comma separated); may replace
        /// fixed relations as well as free values.
        #[arg(long = "override")]
        overrides: Vec<String>,
        /// Sample parameters with this seed instead of the documented example.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        draw: u64,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Verify every catalog record at seeded parameters.
    VerifyAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        series: SeriesArgs,
    },
    /// Show that the uncorrected degree-1 recursion fails on P = d^2 - d - 1.
    CounterexampleGorder,
}

/// Exactly one of `--family/--params` or `--op`.
#[derive(Args, Debug, Clone)]
pub struct OpSource {
    #[arg(long, conflicts_with = "op")]
    pub family: Option<Family>,
    /// Comma separated `name=value`, values in the expression language.
    #[arg(long, conflicts_with = "op")]
    pub params: Option<String>,
    /// `c0; c1; ...` coefficient expressions in x (ascending order), or
    /// `@FILE` holding operator JSON or a `{"family", "params"}` object.
    #[arg(long)]
    pub op: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SemiArgs {
    #[command(flatten)]
    pub src: OpSource,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub degree: u8,
    #[arg(long)]
    pub beta2: Option<String>,
    #[arg(long, default_value = "1")]
    pub beta1: String,
    #[arg(long, default_value = "0")]
    pub beta0: String,
    /// Read the betas in the labelling of the catalog families, where the
    /// constant terms of the polynomial parts of p1 and p0 are absorbed.
    #[arg(long)]
    pub absorbed: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub semi: SemiArgs,
    /// Use this Q instead of building one from the betas.
    #[arg(long)]
    pub q: Option<String>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct SeriesArgs {
    /// Frobenius truncation order.
    #[arg(long, default_value_t = 40)]
    pub truncation: usize,
    /// Sampling radius around the expansion point.
    #[arg(long)]
    pub radius: Option<f64>,
}

impl SeriesArgs {
    fn options(self) -> SeriesOptions {
        SeriesOptions { truncation: self.truncation, radius: self.radius, ..SeriesOptions::default() }
    }
}

/// What a command produced: a JSON value, its text rendering, and whether
/// every check it performed held.
struct Outcome {
    json: Value,
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(json: Value, text: String) -> Self {
        Outcome { json, text, ok: true }
    }
}

fn usage_error(e: &Error) -> bool {
    matches!(e, Error::Parse(_) | Error::InvalidParams(_) | Error::UnknownCase(_) | Error::Json(_) | Error::Catalog(_))
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(o) => {
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&o.json).expect("serializable"),
                Format::Text => o.text.trim_end().to_string(),
            };
            let _ = writeln!(out, "{body}");
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Families => Ok(families()),
        Command::Build(src) => build(src),
        Command::Semicommute(a) => semicommute_cmd(a),
        Command::Residual(a) => residual_cmd(a, false),
        Command::LocalPoints(a) => residual_cmd(a, true),
        Command::Compose { left, right } => compose(left, right),
        Command::Gauge { src, exponent } => gauge(src, exponent),
        Command::VerifyCase { id, overrides, seed, draw, series } => {
            verify_case(id, overrides, *seed, *draw, series.options())
        }
        Command::VerifyAll { seed, series } => verify_all(*seed, series.options()),
        Command::CounterexampleGorder => counterexample(),
    }
}

fn constant(src: &str) -> Result<FieldElement> {
    expr::parse(src)?.eval_constant(&Env::new())
}

/// `a=1,b=2/3` into a map; later entries win.
pub fn parse_assignments<S: AsRef<str>>(items: &[S]) -> Result<BTreeMap<String, FieldElement>> {
    let mut out = BTreeMap::new();
    for item in items {
        for part in item.as_ref().split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (n, e) = expr::split_binding(part)?;
            out.insert(n.to_string(), constant(e)?);
        }
    }
    Ok(out)
}

/// Operator syntax shared by `--op`, `--q`, `--left` and `--right`.
pub fn parse_op(spec: &str) -> Result<DiffOp> {
    if let Some(path) = spec.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{path}: {e}")))?;
        let v: Value = serde_json::from_str(&text)?;
        if v.get("family").is_some() {
            return HeunParams::from_json(&v)?.build_p();
        }
        return Ok(serde_json::from_value(v)?);
    }
    let coeffs = spec
        .split(';')
        .map(|c| expr::eval(c.trim(), &Env::new()))
        .collect::<Result<Vec<RationalFunction>>>()?;
    Ok(DiffOp::new(coeffs))
}

impl OpSource {
    fn resolve(&self) -> Result<(DiffOp, Option<HeunParams>)> {
        match (&self.family, &self.params, &self.op) {
            (Some(f), params, None) => {
                let map = parse_assignments(params.as_slice())?;
                let hp = HeunParams::from_map(*f, &map)?;
                Ok((hp.build_p()?, Some(hp)))
            }
            (None, None, Some(op)) => Ok((parse_op(op)?, None)),
            _ => Err(Error::Parse("give either --family with --params, or --op".into())),
        }
    }
}

fn op_json(op: &DiffOp) -> Value {
    json!({ "coeffs": op.coeffs(), "text": op.to_string() })
}

fn families() -> Outcome {
    let list: Vec<Value> = Family::ALL
        .iter()
        .map(|f| json!({ "family": f.name(), "params": f.param_names(), "description": f.description() }))
        .collect();
    let text = Family::ALL
        .iter()
        .map(|f| format!("{:<22} {:<32} {}\n", f.name(), f.param_names().join(","), f.description()))
        .collect();
    Outcome::ok(Value::Array(list), text)
}

fn build(src: &OpSource) -> Result<Outcome> {
    let (p, hp) = src.resolve()?;
    let sing = classify_singularities(&p)?;
    let sing_json: Vec<Value> = sing.iter().map(|(l, k)| json!({ "location": l.to_json(), "kind": k })).collect();
    let mut text = format!("P = {p}\n");
    for (l, k) in &sing {
        text += &format!("  {}: {}\n", l.to_json(), serde_json::to_value(k).expect("kind"));
    }
    Ok(Outcome::ok(json!({ "params": hp, "operator": op_json(&p), "singularities": sing_json }), text))
}

fn read_spec(p: &DiffOp, a: &SemiArgs) -> Result<SemiCommuteSpec> {
    let beta1 = constant(&a.beta1)?;
    let beta0 = constant(&a.beta0)?;
    let spec = match (a.degree, &a.beta2) {
        (1, None) => SemiCommuteSpec::degree1(beta1, beta0),
        (1, Some(_)) => return Err(Error::InvalidParams("--beta2 needs --degree 2".into())),
        (_, b2) => SemiCommuteSpec::degree2(constant(b2.as_deref().unwrap_or("1"))?, beta1, beta0),
    };
    if a.absorbed {
        semicommute::from_absorbed_labels(p, &spec)
    } else {
        Ok(spec)
    }
}

fn semicommute_cmd(a: &SemiArgs) -> Result<Outcome> {
    let (p, _) = a.src.resolve()?;
    let spec = read_spec(&p, a)?;
    let q = semicommute::build_q(&p, &spec)?;
    let text = format!("P = {p}\nQ = {q}\n");
    Ok(Outcome::ok(json!({ "spec": spec, "p": op_json(&p), "q": op_json(&q) }), text))
}

fn residual_cmd(a: &ResidualArgs, points_only: bool) -> Result<Outcome> {
    let (p, _) = a.semi.src.resolve()?;
    let q = match &a.q {
        Some(s) => parse_op(s)?,
        None => semicommute::build_q(&p, &read_spec(&p, &a.semi)?)?,
    };
    let rep: ResidualReport = semicommute::residual(&p, &q)?;
    let points: Vec<Value> = rep.local_points.iter().map(|r| r.to_json()).collect();
    let mut text = String::new();
    if !points_only {
        text += &format!("Q = {q}\nresidual = {}\ncommutes = {}\n", rep.residual, rep.commutes);
    }
    for r in &points {
        text += &format!("local point {r}\n");
    }
    let json = if points_only { json!({ "local_points": points }) } else {
        let mut v = rep.to_json();
        v["q"] = op_json(&q);
        v
    };
    Ok(Outcome::ok(json, text))
}

fn compose(left: &str, right: &str) -> Result<Outcome> {
    let (a, b) = (parse_op(left)?, parse_op(right)?);
    let prod = a.compose(&b);
    let comm = a.commutator(&b);
    let text = format!("AB = {prod}\n[A, B] = {comm}\n");
    Ok(Outcome::ok(json!({ "product": op_json(&prod), "commutator": op_json(&comm) }), text))
}

fn gauge(src: &OpSource, exponent: &str) -> Result<Outcome> {
    let (a, _) = src.resolve()?;
    let g = LaurentPolynomial::from_rational_function(&expr::eval(exponent, &Env::new())?)?;
    let t = a.gauge_transform(&g);
    Ok(Outcome::ok(json!({ "exponent": g, "operator": op_json(&t) }), format!("{t}\n")))
}

fn verdict_text(v: &VerificationVerdict) -> String {
    let mut s = format!(
        "{} {}  commutator_zero={} factorization_equal={}",
        if v.pass { "PASS" } else { "FAIL" },
        v.id,
        v.commutator_zero,
        v.factorization_equal
    );
    if let Some(w) = v.wronskian {
        s += &format!(" wronskian~{w:.3e}");
    }
    if let Some(g) = v.gauge_match {
        s += &format!(" gauge_match={g}");
    }
    if let Some(e) = &v.error {
        s += &format!(" error: {e}");
    }
    s.push('\n');
    for b in &v.basis_annihilated {
        s += &format!("  basis {} [{}] {}\n", b.label, b.method, if b.pass { "ok" } else { "FAIL" });
    }
    for m in &v.printed_diff {
        let tag = if m.known.is_some() { "known" } else { "UNKNOWN" };
        s += &format!("  diff {} ({tag}): printed {} computed {}\n", m.item, m.printed, m.computed);
    }
    s
}

fn verify_case(id: &str, overrides: &[String], seed: Option<u64>, draw: u64, opts: SeriesOptions) -> Result<Outcome> {
    let cat = Catalog::bundled()?;
    let rec = cat.record(id)?;
    let mut values = match (seed, cat.example(rec)?) {
        (None, Some(ex)) => ex,
        (s, _) => cat.sample(rec, s.unwrap_or(0), draw)?,
    };
    let over = parse_assignments(overrides)?;
    let known_names = |n: &str| {
        rec.free.iter().any(|f| f.name == n)
            || rec.fixed.iter().any(|b| expr::split_binding(b).is_ok_and(|(m, _)| m == n))
    };
    if let Some(bad) = over.keys().find(|n| !known_names(n)) {
        return Err(Error::InvalidParams(format!("{id} has no parameter {bad:?}")));
    }
    values.extend(over);
    let v = cat.verify_case(rec, &values, &opts);
    let text = verdict_text(&v);
    Ok(Outcome { json: serde_json::to_value(&v)?, text, ok: v.pass })
}

fn report_text(r: &Report) -> String {
    let mut s: String = r.cases.iter().map(verdict_text).collect();
    s += &format!(
        "{}/{} passed, {} with zero commutator, seed {}\n",
        r.summary.passed, r.summary.total, r.summary.commutator_zero, r.seed
    );
    s
}

fn verify_all(seed: u64, opts: SeriesOptions) -> Result<Outcome> {
    let r = Catalog::bundled()?.verify_all(seed, &opts);
    let ok = r.summary.failed.is_empty();
    Ok(Outcome { json: serde_json::to_value(&r)?, text: report_text(&r), ok })
}

fn counterexample() -> Result<Outcome> {
    let one = RationalFunction::one();
    let p = DiffOp::new(vec![-&one, -&one, one]);
    let labelled = SemiCommuteSpec::degree1(FieldElement::one(), FieldElement::zero());
    let spec = semicommute::from_absorbed_labels(&p, &labelled)?;
    let bad = semicommute::gorder_q1(&p, &spec)?;
    let good = semicommute::build_q1(&p, &spec)?;
    let (cb, cg) = (p.commutator(&bad), p.commutator(&good));
    let reproduced = !cb.is_zero() && cg.is_zero();
    let json = json!({
        "p": op_json(&p),
        "spec": labelled,
        "uncorrected": { "q": op_json(&bad), "commutator": op_json(&cb), "commutes": cb.is_zero() },
        "corrected": { "q": op_json(&good), "commutator": op_json(&cg), "commutes": cg.is_zero() },
        "reproduced": reproduced,
    });
    let text = format!(
        "P = {p}\nuncorrected Q = {bad}\n  [P, Q] = {cb}\ncorrected Q = {good}\n  [P, Q] = {cg}\nreproduced = {reproduced}\n"
    );
    Ok(Outcome { json, text, ok: reproduced })
}
