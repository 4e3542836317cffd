//! Python bindings: profile solves, thresholds, spectra and the lemma suite.
//! Structured results are returned as dictionaries (nested parts as JSON text).

use hedgehog::algebra::{self, SuiteOptions, WVector};
use hedgehog::profile::{self, RadialGrid};
use hedgehog::spectra::{self, StabilityOptions};
use hedgehog::{HedgehogError, ScalingParams};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: HedgehogError) -> PyErr {
    match e {
        HedgehogError::Domain(m) => PyValueError::new_err(m),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pyfunction]
fn h_plus(t: f64) -> PyResult<f64> {
    Ok(ScalingParams::new(t).map_err(to_py)?.h_plus)
}

/// Solve the profile ODE; returns `r`, `h`, `energy`, `min_h`, `residual`.
#[pyfunction]
#[pyo3(signature = (r_outer, t, n = 1025, tol = 1e-10))]
fn solve_profile<'py>(py: Python<'py>, r_outer: f64, t: f64, n: usize, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let p = ScalingParams::new(t).map_err(to_py)?;
    let grid = RadialGrid::uniform(r_outer, n).map_err(to_py)?;
    let prof = py.detach(|| profile::solve_profile(r_outer, &p, &grid, tol)).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("r", prof.grid.nodes().to_vec())?;
    d.set_item("h", prof.h.clone())?;
    d.set_item("energy", profile::profile_energy(&prof))?;
    d.set_item("min_h", prof.min_h())?;
    d.set_item("residual", prof.residual_norm)?;
    d.set_item("bounds", to_json(&profile::verify_bounds(&prof).map_err(to_py)?)?)?;
    Ok(d)
}

#[pyfunction]
fn eta_min(r_outer: f64) -> PyResult<f64> {
    profile::eta_min(r_outer).map_err(to_py)
}

#[pyfunction]
fn r_star() -> PyResult<f64> {
    profile::r_star().map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (r_outer, k = 1, n = 1025))]
fn hardy_eigen(r_outer: f64, k: usize, n: usize) -> PyResult<f64> {
    spectra::hardy_eigen(r_outer, k, n).map_err(to_py)
}

#[pyfunction]
fn hardy_closed_form(r_outer: f64, k: usize) -> f64 {
    spectra::hardy_closed_form(r_outer, k)
}

/// Stability report for one `(R, t)` as JSON text.
#[pyfunction]
#[pyo3(signature = (r_outer, t, n = 1025))]
fn stability_report(py: Python<'_>, r_outer: f64, t: f64, n: usize) -> PyResult<String> {
    let opts = StabilityOptions { n, ..Default::default() };
    let rep = py.detach(|| spectra::stability_report(r_outer, t, &opts)).map_err(to_py)?;
    to_json(&rep)
}

#[pyfunction]
fn psi(w: [f64; 5]) -> f64 {
    algebra::psi(&WVector::from_array(w))
}

#[pyfunction(name = "G")]
fn g(eps: f64) -> PyResult<f64> {
    algebra::G(eps).map_err(to_py)
}

#[pyfunction]
fn varphi(v0: f64, v1: f64, v4: f64, h: f64) -> f64 {
    algebra::varphi(v0, v1, v4, h)
}

/// Exact `y²` of the `y ≠ 0` critical branch at rational `h = num/den`, as `"p/q"`.
#[pyfunction]
fn critical_y2(num: i64, den: i64) -> PyResult<String> {
    if den == 0 {
        return Err(PyValueError::new_err("zero denominator"));
    }
    Ok(algebra::critical_system(&algebra::rat(num, den)).y2_exact.to_string())
}

/// Runs the sampled and exact lemma checks; returns the report as JSON text.
#[pyfunction]
#[pyo3(signature = (samples = 100_000, seed = 42))]
fn verify_lemmas(py: Python<'_>, samples: usize, seed: u64) -> PyResult<String> {
    let opts = SuiteOptions { samples, seed, ..Default::default() };
    let rep = py.detach(|| algebra::run_all(&opts));
    to_json(&rep)
}

/// `(name, value, source)` rows of the threshold table.
#[pyfunction]
fn thresholds() -> PyResult<Vec<(String, f64, String)>> {
    let t = hedgehog::thresholds::threshold_table().map_err(to_py)?;
    Ok(t.into_iter().map(|r| (r.name, r.value, r.source)).collect())
}

#[pymodule]
fn hedgehog_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(h_plus, m)?)?;
    m.add_function(wrap_pyfunction!(solve_profile, m)?)?;
    m.add_function(wrap_pyfunction!(eta_min, m)?)?;
    m.add_function(wrap_pyfunction!(r_star, m)?)?;
    m.add_function(wrap_pyfunction!(hardy_eigen, m)?)?;
    m.add_function(wrap_pyfunction!(hardy_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(stability_report, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(g, m)?)?;
    m.add_function(wrap_pyfunction!(varphi, m)?)?;
    m.add_function(wrap_pyfunction!(critical_y2, m)?)?;
    m.add_function(wrap_pyfunction!(verify_lemmas, m)?)?;
    m.add_function(wrap_pyfunction!(thresholds, m)?)?;
    Ok(())
}
