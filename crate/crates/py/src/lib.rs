//! Python bindings. Structured results cross the boundary as JSON and are
//! decoded with the standard `json` module, so field names match the CLI output.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

use monotest::harness::{generate as gen_instance, run_suite as run, write_csv, Certification, Family, SuiteConfig};
use monotest::tester::run_mono_test;
use monotest::truth::dist_ltf_to_monotone;
use monotest::{build_schedule, verify_certificate as verify, AntiMonotoneEdge, LtfSpec, Oracle, Point, Profile, SeedKey};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn profile(name: &str) -> PyResult<Profile> {
    match name {
        "practical" => Ok(Profile::Practical),
        "theoretical" => Ok(Profile::Theoretical),
        other => Err(value_error(format!("unknown profile {other:?}"))),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Runs the tester once and returns the verdict, certificate, diagnostic, query ledger and schedule.
#[pyfunction]
#[pyo3(signature = (weights, theta, epsilon, profile_name = "practical", seed = 0, max_queries = None))]
fn mono_test<'py>(
    py: Python<'py>,
    weights: Vec<f64>,
    theta: f64,
    epsilon: f64,
    profile_name: &str,
    seed: u64,
    max_queries: Option<u64>,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = LtfSpec::new(weights, theta).map_err(value_error)?;
    let sched = build_schedule(spec.dim(), epsilon, profile(profile_name)?).map_err(value_error)?;
    let report = py
        .detach(|| {
            let f = Oracle::ltf_with_cap(spec, max_queries);
            run_mono_test(&f, &sched, &mut SeedKey::new(seed).named("tester").rng())
        })
        .map_err(value_error)?;
    let out = serde_json::json!({
        "verdict": report.verdict.label(),
        "certificate": report.verdict.certificate(),
        "diagnostic": report.verdict.diagnostic.code(),
        "budget_exhausted": report.budget_exhausted,
        "queries": report.ledger,
        "schedule": sched,
    });
    to_py(py, &out)
}

/// Re-checks an anti-monotone edge certificate with two queries.
#[pyfunction]
fn verify_certificate(weights: Vec<f64>, theta: f64, point: &str, coordinate: usize) -> PyResult<bool> {
    let spec = LtfSpec::new(weights, theta).map_err(value_error)?;
    let cert = AntiMonotoneEdge::new(Point::parse_sign_string(point).map_err(value_error)?, coordinate)
        .map_err(value_error)?;
    verify(&Oracle::ltf(spec), &cert).map_err(value_error)
}

/// Distance to the nearest monotone function: exact up to 20 coordinates, sampled beyond.
#[pyfunction]
#[pyo3(signature = (weights, theta, radius = 0.01, delta = 1e-3, seed = 0))]
fn distance_to_monotone<'py>(
    py: Python<'py>,
    weights: Vec<f64>,
    theta: f64,
    radius: f64,
    delta: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let spec = LtfSpec::new(weights, theta).map_err(value_error)?;
    let report = py
        .detach(|| dist_ltf_to_monotone(&spec, radius, delta, &mut SeedKey::new(seed).named("distance").rng()))
        .map_err(value_error)?;
    to_py(py, &report)
}

/// Draws one instance of a family such as `"planted:0.25"` with its certified distance.
#[pyfunction]
#[pyo3(signature = (family, n, seed = 0, epsilon = 0.05))]
fn generate<'py>(py: Python<'py>, family: &str, n: usize, seed: u64, epsilon: f64) -> PyResult<Bound<'py, PyAny>> {
    let family: Family = family.parse().map_err(value_error)?;
    let inst = py.detach(|| gen_instance(&family, n, seed, Certification::for_epsilon(epsilon))).map_err(value_error)?;
    to_py(py, &inst)
}

/// Runs a seeded suite; returns the summary, per-dimension summaries and the CSV text.
#[pyfunction]
#[pyo3(signature = (family, dims, trials, epsilon, seed = 0, profile_name = "practical", threads = None))]
#[allow(clippy::too_many_arguments)]
fn run_suite<'py>(
    py: Python<'py>,
    family: &str,
    dims: Vec<usize>,
    trials: u64,
    epsilon: f64,
    seed: u64,
    profile_name: &str,
    threads: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = SuiteConfig::new(family.parse().map_err(value_error)?, dims, trials, epsilon);
    cfg.master_seed = seed;
    cfg.profile = profile(profile_name)?;
    cfg.threads = threads;
    let res = py.detach(|| run(&cfg)).map_err(value_error)?;
    let mut csv = Vec::new();
    write_csv(&res.records, &mut csv).map_err(value_error)?;
    let out = serde_json::json!({
        "summary": res.summary,
        "by_dim": res.by_dim,
        "csv": String::from_utf8(csv).map_err(value_error)?,
    });
    to_py(py, &out)
}

#[pymodule]
fn monotest_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(mono_test, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(distance_to_monotone, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}

