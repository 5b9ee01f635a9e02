//! Python bindings. Every function returns the same JSON text the CLI emits,
//! so exact values survive as rational strings.

use std::collections::BTreeMap;

use heunops::catalog::{Catalog, SeriesOptions};
use heunops::cli;
use heunops::family::{Family, HeunParams};
use heunops::semicommute::{build_q, SemiCommuteSpec};
use heunops::Error;
use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::UnknownCase(id) => PyKeyError::new_err(id),
        Error::Parse(_) | Error::InvalidParams(_) | Error::Json(_) => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn params(family: &str, values: BTreeMap<String, String>) -> Result<HeunParams, Error> {
    let family: Family = family.parse()?;
    let items: Vec<String> = values.into_iter().map(|(k, v)| format!("{k}={v}")).collect();
    HeunParams::from_map(family, &cli::parse_assignments(&items)?)
}

fn dumps<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// `P` for a family, e.g. `build_p("heun", {"a": "2", "q": "1/3", ...})`.
#[pyfunction]
fn build_p(family: &str, values: BTreeMap<String, String>) -> PyResult<String> {
    let p = params(family, values).and_then(|hp| hp.build_p()).map_err(to_py)?;
    dumps(&p)
}

/// Semi-commuting `Q` (structural labels); `beta2` selects degree 2.
#[pyfunction]
#[pyo3(signature = (family, values, beta1, beta0, beta2=None))]
fn semicommute(
    family: &str,
    values: BTreeMap<String, String>,
    beta1: &str,
    beta0: &str,
    beta2: Option<&str>,
) -> PyResult<String> {
    let run = || -> Result<_, Error> {
        let p = params(family, values)?.build_p()?;
        let c = |s: &str| heunops::expr::parse(s)?.eval_constant(&Default::default());
        let spec = match beta2 {
            Some(b2) => SemiCommuteSpec::degree2(c(b2)?, c(beta1)?, c(beta0)?),
            None => SemiCommuteSpec::degree1(c(beta1)?, c(beta0)?),
        };
        build_q(&p, &spec)
    };
    dumps(&run().map_err(to_py)?)
}

/// Verdict for one catalog record at its documented example (or seed 0).
#[pyfunction]
fn verify_case(id: &str) -> PyResult<String> {
    let cat = Catalog::bundled().map_err(to_py)?;
    let rec = cat.record(id).map_err(to_py)?;
    dumps(&cat.verify_default(rec, 0, &SeriesOptions::default()))
}

#[pyfunction]
#[pyo3(signature = (seed=0))]
fn verify_all(py: Python<'_>, seed: u64) -> PyResult<String> {
    let cat = Catalog::bundled().map_err(to_py)?;
    let report = py.detach(|| cat.verify_all(seed, &SeriesOptions::default()));
    dumps(&report)
}

#[pyfunction]
fn case_ids() -> PyResult<Vec<String>> {
    let cat = Catalog::bundled().map_err(to_py)?;
    Ok(cat.enumerate_cases().iter().map(|c| c.id.clone()).collect())
}

/// Run the command-line interface; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(args: Vec<String>) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(std::iter::once("heunops".to_string()).chain(args), &mut out, &mut err);
    (code, String::from_utf8_lossy(&out).into_owned(), String::from_utf8_lossy(&err).into_owned())
}

#[pymodule]
pub fn pyheunops(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(build_p, m)?)?;
    m.add_function(wrap_pyfunction!(semicommute, m)?)?;
    m.add_function(wrap_pyfunction!(verify_case, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    m.add_function(wrap_pyfunction!(case_ids, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
