use std::process::Command;

use heunops::algebra::{FieldElement, RationalFunction};
use heunops::catalog::{Report, VerificationVerdict};
use heunops::diffop::DiffOp;
use heunops::family::HeunParams;
use heunops::semicommute::SemiCommuteSpec;
use serde_json::Value;

const HEUN: &str = "a=2,q=0,alpha=0,beta=1,gamma=0,delta=0";

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_heunops")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
    (code, v)
}

fn op(v: &Value) -> DiffOp {
    serde_json::from_value(v.clone()).unwrap()
}

fn pole(c: i64, at: i64) -> RationalFunction {
    RationalFunction::pole_term(&FieldElement::from_i64(c), &FieldElement::from_i64(at), 1)
}

#[test]
fn semicommute_heun_instance() {
    let (code, v) = run_json(&["semicommute", "--family", "heun", "--degree", "1", "--params", HEUN, "--beta1", "1", "--beta0", "0"]);
    assert_eq!(code, 0);
    let q = op(&v["q"]);
    assert_eq!(q, DiffOp::new(vec![pole(1, 2), RationalFunction::one()]));
    let spec: SemiCommuteSpec = serde_json::from_value(v["spec"].clone()).unwrap();
    assert_eq!(spec, SemiCommuteSpec::degree1(FieldElement::one(), FieldElement::zero()));
}

#[test]
fn degree2_without_beta1_beta0_is_multiple_of_p() {
    let (code, v) = run_json(&[
        "semicommute", "--family", "heun", "--degree", "2", "--params", HEUN, "--beta2", "3", "--beta1", "0", "--beta0", "0",
    ]);
    assert_eq!(code, 0);
    assert_eq!(op(&v["q"]), op(&v["p"]).scale(&FieldElement::from_i64(3)));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["semicommute", "--family", "heun", "--params", "a=2,q=0"][..],
        &["semicommute", "--family", "heun", "--params", "a=2;;q"][..],
        &["build", "--family", "heun", "--params", "a=1,q=0,alpha=0,beta=1,gamma=0,delta=0"][..],
        &["build", "--family", "nonesuch", "--params", "a=1"][..],
        &["build"][..],
        &["build", "--family", "heun", "--params", HEUN, "--op", "1; 0; 1"][..],
        &["verify-case", "--id", "heun.n9.case9"][..],
        &["verify-case", "--id", "heun.n1.case1", "--override", "zeta=1"][..],
        &["frobnicate"][..],
    ] {
        let (code, out, err) = run(args);
        assert_eq!(code, 2, "{args:?}: {out}");
        assert!(!err.is_empty(), "{args:?} printed no diagnostic");
    }
}

#[test]
fn verify_case_pass_and_negative_control() {
    let (code, v) = run_json(&["verify-case", "--id", "heun.n1.case3"]);
    assert_eq!(code, 0);
    let verdict: VerificationVerdict = serde_json::from_value(v.clone()).unwrap();
    assert!(verdict.pass);
    assert_eq!(serde_json::to_value(&verdict).unwrap(), v);

    let (code, v) = run_json(&["verify-case", "--id", "heun.n1.case1", "--override", "beta=2"]);
    assert_eq!(code, 1);
    assert_eq!(v["commutator_zero"], Value::Bool(false));
}

#[test]
fn counterexample_reproduces() {
    let (code, v) = run_json(&["counterexample-gorder"]);
    assert_eq!(code, 0);
    let half = RationalFunction::constant(FieldElement::from_ratio(-1, 2));
    assert_eq!(op(&v["uncorrected"]["commutator"]), DiffOp::new(vec![half, RationalFunction::one()]));
    assert!(op(&v["corrected"]["commutator"]).is_zero());
}

#[test]
fn residual_and_local_points() {
    // Heun with a generic Q of degree 1 does not commute; the residual and its
    // vanishing set are reported.
    let args = ["--family", "heun", "--params", "a=2,q=1,alpha=1,beta=2,gamma=1/2,delta=1/3", "--beta1", "1"];
    let (code, v) = run_json(&[&["residual"][..], &args].concat());
    assert_eq!(code, 0);
    assert_eq!(v["commutes"], Value::Bool(false));
    let res: RationalFunction = serde_json::from_value(v["residual"].clone()).unwrap();
    let (_, lp) = run_json(&[&["local-points"][..], &args].concat());
    let pts = lp["local_points"].as_array().unwrap();
    assert_eq!(pts.len(), v["local_points"].as_array().unwrap().len());
    for p in pts {
        if p.get("approx").is_none() {
            let x0 = FieldElement::from_json(&p["value"]).unwrap();
            assert!(res.eval(&x0).unwrap().is_zero());
        }
    }
}

#[test]
fn compose_and_gauge() {
    let (code, v) = run_json(&["compose", "--left", "0; 1", "--right", "x"]);
    assert_eq!(code, 0);
    // d o x = x d + 1
    assert_eq!(op(&v["product"]), DiffOp::new(vec![RationalFunction::one(), RationalFunction::x()]));
    assert_eq!(op(&v["commutator"]), DiffOp::identity());

    let (code, v) = run_json(&["gauge", "--op", "0; 0; 1", "--exponent", "2*x"]);
    assert_eq!(code, 0);
    // (d + 2)^2
    let want = DiffOp::new(vec![RationalFunction::from_i64(4), RationalFunction::from_i64(4), RationalFunction::one()]);
    assert_eq!(op(&v["operator"]), want);
}

#[test]
fn build_round_trips_params_and_reads_files() {
    let (code, v) = run_json(&["build", "--family", "confluent", "--params", "p=1/2,q=1/3,alpha=1,gamma=1/2,delta=3/2"]);
    assert_eq!(code, 0);
    let hp: HeunParams = serde_json::from_value(v["params"].clone()).unwrap();
    let p = op(&v["operator"]);
    assert_eq!(hp.build_p().unwrap(), p);
    let kinds: Vec<&str> = v["singularities"].as_array().unwrap().iter().map(|s| s["kind"].as_str().unwrap()).collect();
    assert!(kinds.contains(&"irregular-singular"));

    let dir = std::env::temp_dir().join(format!("heunops-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let params_file = dir.join("params.json");
    std::fs::write(&params_file, serde_json::to_string(&v["params"]).unwrap()).unwrap();
    let op_file = dir.join("op.json");
    std::fs::write(&op_file, serde_json::to_string(&v["operator"]).unwrap()).unwrap();
    for f in [&params_file, &op_file] {
        let (code, w) = run_json(&["build", "--op", &format!("@{}", f.display())]);
        assert_eq!(code, 0);
        assert_eq!(op(&w["operator"]), p);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn families_lists_seven() {
    let (code, v) = run_json(&["families"]);
    assert_eq!(code, 0);
    assert_eq!(v.as_array().unwrap().len(), 7);
    let (code, text, _) = run(&["families", "--format", "text"]);
    assert_eq!(code, 0);
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn verify_all_report_round_trips() {
    let (code, v) = run_json(&["verify-all", "--seed", "3", "--truncation", "20"]);
    assert_eq!(code, 0, "{}", v["summary"]);
    let report: Report = serde_json::from_value(v.clone()).unwrap();
    assert_eq!(report.summary.passed, report.summary.total);
    assert_eq!(serde_json::to_value(&report).unwrap(), v);
    let ids: Vec<&str> = report.cases.iter().map(|c| c.id.as_str()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}
