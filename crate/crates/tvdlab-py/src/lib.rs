use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use tvdlab::experiments::{convergence_study, StudyConfig, FIT_RANGE};
use tvdlab::limiter::{self, bound_m};
use tvdlab::reconstruction::total_variation;
use tvdlab::solver::{max_stable_sigma, simulate as run_sim};

fn err(e: tvdlab::Error) -> PyErr {
    match e {
        tvdlab::Error::CflRefusal { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(name = "Limiter", module = "tvdlab_py")]
#[derive(Clone)]
struct PyLimiter {
    inner: tvdlab::Limiter,
}

#[pymethods]
impl PyLimiter {
    #[new]
    #[pyo3(signature = (name, kappa=None))]
    fn new(name: &str, kappa: Option<f64>) -> PyResult<Self> {
        let inner = match kappa {
            Some(_) => tvdlab::Limiter::from_catalog(name, kappa),
            None => name.parse(),
        }
        .map_err(err)?;
        Ok(Self { inner })
    }

    /// Piecewise-linear limiter from `r_break slope intercept` lines.
    #[staticmethod]
    fn from_description(name: &str, text: &str) -> PyResult<Self> {
        let inner = tvdlab::Limiter::parse_description(name, text).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    fn phi(&self, r: f64) -> f64 {
        self.inner.phi(r)
    }

    fn psi(&self, lam: f64) -> f64 {
        self.inner.psi(lam)
    }

    fn bound_m(&self) -> f64 {
        bound_m(&self.inner)
    }

    fn max_stable_sigma(&self) -> f64 {
        max_stable_sigma(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Limiter({})", self.inner)
    }
}

#[pyclass(name = "Report", module = "tvdlab_py", get_all)]
struct PyReport {
    limiter: String,
    predicate: String,
    param: Option<f64>,
    passed: bool,
    /// (argument, lhs, rhs) of the first violation.
    witness: Option<(f64, f64, f64)>,
    csv_row: String,
}

#[pymethods]
impl PyReport {
    fn __bool__(&self) -> bool {
        self.passed
    }

    fn __repr__(&self) -> String {
        format!(
            "Report({}, {}, {})",
            self.limiter,
            self.predicate,
            if self.passed { "pass" } else { "fail" }
        )
    }
}

impl From<limiter::AdmissibilityReport> for PyReport {
    fn from(r: limiter::AdmissibilityReport) -> Self {
        Self {
            csv_row: r.csv_row(),
            limiter: r.limiter,
            predicate: r.predicate.as_str().to_string(),
            param: r.param,
            passed: r.passed,
            witness: r.witness.map(|w| (w.arg, w.lhs, w.rhs)),
        }
    }
}

/// Runs one predicate: monotonicity, convexity, tvd_region (param α),
/// second_order_extremum or extremum_identity (param δ).
#[pyfunction]
#[pyo3(signature = (limiter, predicate, param=None))]
fn check(limiter: &PyLimiter, predicate: &str, param: Option<f64>) -> PyResult<PyReport> {
    let l = &limiter.inner;
    let need = |what: &str| {
        param.ok_or_else(|| PyValueError::new_err(format!("{predicate} needs {what}")))
    };
    let r = match predicate {
        "monotonicity" => limiter::check_monotonicity(l),
        "convexity" => limiter::check_convexity(l),
        "tvd_region" => limiter::check_tvd_region(l, need("alpha")?).map_err(err)?,
        "second_order_extremum" => limiter::check_second_order_extremum(l),
        "extremum_identity" => limiter::check_extremum_identity(l, need("delta")?).map_err(err)?,
        _ => return Err(PyValueError::new_err(format!("unknown predicate `{predicate}`"))),
    };
    Ok(r.into())
}

/// (minus, plus) interface values; index i is the interface between cells i and i+1.
#[pyfunction]
fn interface_values(u: Vec<f64>, reconstruction: &str) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let rec: tvdlab::Reconstruction = reconstruction.parse().map_err(err)?;
    let iv = rec.interface_values(&u).map_err(err)?;
    Ok((iv.minus, iv.plus))
}

#[pyfunction(name = "total_variation")]
fn tv(u: Vec<f64>) -> f64 {
    total_variation(&u)
}

#[pyclass(name = "NumericalFlux", module = "tvdlab_py")]
#[derive(Clone)]
struct PyFlux {
    inner: tvdlab::NumericalFlux,
}

#[pymethods]
impl PyFlux {
    /// `problem` is advection or burgers; `kind` is upwind, godunov,
    /// engquist_osher or lax_wendroff (with `mu`).
    #[new]
    #[pyo3(signature = (problem, kind, speed=1.0, mu=None))]
    fn new(problem: &str, kind: &str, speed: f64, mu: Option<f64>) -> PyResult<Self> {
        let spec = match problem {
            "advection" => tvdlab::FluxSpec::advection(speed),
            "burgers" => tvdlab::FluxSpec::burgers(),
            _ => return Err(PyValueError::new_err(format!("unknown problem `{problem}`"))),
        };
        let kind = match (kind, mu) {
            ("lax_wendroff", Some(mu)) => tvdlab::FluxKind::LaxWendroffType { mu },
            ("lax_wendroff", None) => return Err(PyValueError::new_err("lax_wendroff needs mu")),
            (k, _) => k.parse().map_err(err)?,
        };
        let inner = tvdlab::NumericalFlux::new(spec, kind, None).map_err(err)?;
        Ok(Self { inner })
    }

    fn __call__(&self, u: f64, v: f64) -> f64 {
        self.inner.eval(u, v)
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }
}

#[pyclass(name = "RunResult", module = "tvdlab_py", get_all)]
struct PyRun {
    u: Vec<f64>,
    t: f64,
    dt: f64,
    tv: Vec<f64>,
    tv_increases: usize,
    maxprin_violations: usize,
    max_mass_drift: f64,
}

/// Advances cell averages `u` on the unit periodic grid to `t_final`.
#[pyfunction]
#[pyo3(signature = (u, flux, limiter="minmod", scheme="heun", sigma=0.4, t_final=1.0, cfl="warn"))]
fn simulate(
    py: Python<'_>,
    u: Vec<f64>,
    flux: &PyFlux,
    limiter: &str,
    scheme: &str,
    sigma: f64,
    t_final: f64,
    cfl: &str,
) -> PyResult<PyRun> {
    let h = 1.0 / u.len().max(1) as f64;
    let state = tvdlab::GridState::new(u, h, 0.0).map_err(err)?;
    let cfg = tvdlab::SchemeConfig::new(
        scheme.parse().map_err(err)?,
        limiter.parse::<tvdlab::Reconstruction>().map_err(err)?,
        flux.inner.clone(),
        sigma,
    )
    .map_err(err)?
    .with_monitors(tvdlab::Monitors {
        tv: true,
        maxprin: true,
        harten: false,
    })
    .with_cfl_policy(cfl.parse().map_err(err)?);
    let out = py.allow_threads(|| run_sim(state, &cfg, t_final, None)).map_err(err)?;
    Ok(PyRun {
        t: out.state.t(),
        u: out.state.u().to_vec(),
        dt: out.dt,
        tv: out.trajectory.iter().map(|r| r.tv).collect(),
        tv_increases: out.tv_increases,
        maxprin_violations: out.maxprin_violations,
        max_mass_drift: out.max_mass_drift,
    })
}

#[pyfunction]
fn eval_profile(x: f64) -> PyResult<f64> {
    tvdlab::experiments::eval_profile(x).map_err(err)
}

/// Returns (error table CSV, fitted orders CSV).
#[pyfunction]
#[pyo3(signature = (scheme, sigma, limiters, k_min=3, k_max=9))]
fn convergence(
    py: Python<'_>,
    scheme: &str,
    sigma: f64,
    limiters: Vec<String>,
    k_min: u32,
    k_max: u32,
) -> PyResult<(String, String)> {
    let scheme: tvdlab::TimeScheme = scheme.parse().map_err(err)?;
    let configs = limiters
        .iter()
        .map(|l| {
            Ok(StudyConfig {
                scheme,
                reconstruction: l.parse().map_err(err)?,
                sigma,
            })
        })
        .collect::<PyResult<Vec<_>>>()?;
    let table = py
        .allow_threads(|| convergence_study(&configs, k_min..=k_max))
        .map_err(err)?;
    let lo = k_min.max(*FIT_RANGE.start());
    let hi = k_max.min(*FIT_RANGE.end());
    let levels = if hi >= lo + 2 { lo..=hi } else { k_min..=k_max };
    Ok((table.to_csv(), table.orders_csv(levels)))
}

#[pymodule]
fn tvdlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLimiter>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyFlux>()?;
    m.add_class::<PyRun>()?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(interface_values, m)?)?;
    m.add_function(wrap_pyfunction!(tv, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(eval_profile, m)?)?;
    m.add_function(wrap_pyfunction!(convergence, m)?)?;
    m.add("CATALOG", limiter::CATALOG.to_vec())?;
    Ok(())
}
