//! Python bindings: the main types and operations of the core crate,
//! exported as the `levy_reset` extension module.

use levy_reset_core::asymptotics::{
    brownian_bulk_approx, brownian_tail_approx, classify_regime, rho_ratio_diagnostic,
    stable_ratio_diagnostic, BulkMethod, Regime,
};
use levy_reset_core::kernels::KernelModel;
use levy_reset_core::measures;
use levy_reset_core::montecarlo::{self, HistogramSpec, SimConfig, SimKernel};
use levy_reset_core::qspecial;
use levy_reset_core::resetdensity::{ResetModel as CoreModel, RhoMethod};
use levy_reset_core::splines::{truncation_level, SplineFamilyBuilder};
use levy_reset_core::{Error, ResetParams};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use std::sync::Arc;

fn py_err(err: Error) -> PyErr {
    match err {
        Error::Domain(_) | Error::Pole(_) | Error::Config(_) => PyValueError::new_err(err.to_string()),
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

/// Scalar or list endpoint, so one-dimensional kernels take plain floats.
#[derive(FromPyObject)]
enum Point {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Point {
    fn into_vec(self) -> Vec<f64> {
        match self {
            Point::Scalar(v) => vec![v],
            Point::Vector(v) => v,
        }
    }
}

// --- q-special layer -------------------------------------------------------

#[pyfunction]
#[pyo3(signature = (a, q, n=None))]
fn q_pochhammer(a: f64, q: f64, n: Option<usize>) -> PyResult<f64> {
    let order = match n {
        Some(n) => qspecial::Order::Finite(n),
        None => qspecial::Order::Infinite,
    };
    qspecial::q_pochhammer(a, q, order).map_err(py_err)
}

#[pyfunction]
fn q_gamma(q: f64, x: f64) -> PyResult<f64> {
    qspecial::q_gamma(q, x).map_err(py_err)
}

#[pyfunction]
fn gamma_ratio(gamma: f64, m: f64) -> PyResult<f64> {
    qspecial::gamma_ratio(gamma, m).map_err(py_err)
}

#[pyfunction]
fn q_binomial(n: f64, k: f64, q: f64) -> PyResult<f64> {
    qspecial::q_binomial(n, k, q).map_err(py_err)
}

#[pyfunction]
fn mittag_leffler(alpha: f64, beta: f64, t: f64) -> PyResult<f64> {
    qspecial::mittag_leffler(alpha, beta, t).map_err(py_err)
}

// --- spline moments and measures -------------------------------------------

#[pyfunction]
fn moment_a(gamma: f64, n: usize, m: f64) -> PyResult<f64> {
    levy_reset_core::splines::moment_a(gamma, n, m).map_err(py_err)
}

#[pyfunction]
fn scaled_moment_b(gamma: f64, n: usize, m: f64) -> PyResult<f64> {
    levy_reset_core::splines::scaled_moment_b(gamma, n, m).map_err(py_err)
}

#[pyfunction]
fn mu_t_moment(gamma: f64, t: f64, m: f64) -> PyResult<f64> {
    measures::mu_t_moment(gamma, t, m).map_err(py_err)
}

#[pyfunction]
fn mu_t_integer_moment(k: usize, t: f64, m: f64) -> PyResult<f64> {
    measures::mu_t_integer_moment(k, t, m).map_err(py_err)
}

#[pyfunction]
fn mu_limit_moment(gamma: f64, m: f64) -> PyResult<f64> {
    measures::mu_limit_moment(gamma, m).map_err(py_err)
}

#[pyfunction]
fn mu_density(u: f64, m: f64) -> PyResult<f64> {
    measures::mu_density(u, m).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (t, m, k=0))]
fn phi(t: f64, m: f64, k: usize) -> PyResult<f64> {
    measures::phi(k, t, m).map_err(py_err)
}

#[pyfunction]
fn vartheta(r: f64, m: f64) -> PyResult<f64> {
    measures::vartheta(r, m).map_err(py_err)
}

// --- asymptotics ------------------------------------------------------------

#[pyfunction]
#[pyo3(signature = (m, t, y, delta=0.05))]
fn regime(m: f64, t: f64, y: Point, delta: f64) -> PyResult<String> {
    let report = classify_regime(m, t, &y.into_vec(), delta).map_err(py_err)?;
    Ok(match report.regime {
        Regime::Bulk => "bulk",
        Regime::Tail => "tail",
        Regime::Uncovered => "uncovered",
    }
    .to_string())
}

#[pyfunction]
#[pyo3(signature = (m, t, y, d=1, delta=0.05, leading=false))]
fn bulk_approx(m: f64, t: f64, y: Point, d: usize, delta: f64, leading: bool) -> PyResult<(f64, f64)> {
    let method = if leading { BulkMethod::Leading } else { BulkMethod::SteepestDescent };
    brownian_bulk_approx(m, t, &y.into_vec(), d, delta, method).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (m, t, y, d=1, delta=0.05))]
fn tail_approx(m: f64, t: f64, y: Point, d: usize, delta: f64) -> PyResult<(f64, f64)> {
    brownian_tail_approx(m, t, &y.into_vec(), d, delta).map_err(py_err)
}

// --- the reset model ---------------------------------------------------------

/// A base kernel with resetting parameters and its spline family.
///
/// `kernel`: one of "brownian", "stable", "cauchy", "subordinator",
/// "cylindrical"; `t_max` sizes the spline family for the horizons you
/// plan to evaluate.
#[pyclass(name = "ResetModel")]
struct PyResetModel {
    inner: CoreModel,
}

#[pymethods]
impl PyResetModel {
    #[new]
    #[pyo3(signature = (kernel, c=None, m=None, alpha=None, d=1, drift=0.0, t_max=10.0))]
    fn new(
        kernel: &str,
        c: Option<f64>,
        m: Option<f64>,
        alpha: Option<f64>,
        d: usize,
        drift: f64,
        t_max: f64,
    ) -> PyResult<Self> {
        let need_alpha =
            || alpha.ok_or_else(|| PyValueError::new_err("this kernel needs alpha="));
        let kernel = match kernel {
            "brownian" => KernelModel::Brownian { dim: d },
            "stable" => KernelModel::SymmetricStable1D { alpha: need_alpha()? },
            "cauchy" => KernelModel::Cauchy1D { drift },
            "subordinator" => {
                let a = need_alpha()?;
                if (a - 0.5).abs() < 1e-14 {
                    KernelModel::SubordinatorHalf
                } else {
                    KernelModel::SubordinatorGeneral { alpha: a }
                }
            }
            "cylindrical" => KernelModel::Cylindrical { alpha: need_alpha()?, dim: d },
            other => {
                return Err(PyValueError::new_err(format!("unknown kernel '{other}'")));
            }
        };
        kernel.validate().map_err(py_err)?;
        let params = match (c, m) {
            (Some(c), None) => ResetParams::from_c(kernel.alpha(), c, kernel.dim()),
            (None, Some(m)) => ResetParams::from_m(kernel.alpha(), m, kernel.dim()),
            _ => Err(Error::config("provide exactly one of c= or m=")),
        }
        .map_err(py_err)?;
        let depth = (truncation_level(t_max.max(1.0)) + 8).min(400);
        let builder = SplineFamilyBuilder::new(params.m, depth).map_err(py_err)?;
        let builder = if depth > 80 {
            builder.support_floor((0.02 / t_max).min(1e-4)).map_err(py_err)?
        } else {
            builder
        };
        let family = Arc::new(builder.build().map_err(py_err)?);
        Ok(Self { inner: CoreModel::new(kernel, params, family).map_err(py_err)? })
    }

    /// Reduced parameter m = c^α.
    #[getter]
    fn m(&self) -> f64 {
        self.inner.params().m
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.params().c
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.params().alpha
    }

    /// Transition density p(t; x, y) through the level series.
    fn p(&self, t: f64, x: Point, y: Point) -> PyResult<f64> {
        self.inner.p_reset(t, &x.into_vec(), &y.into_vec()).map_err(py_err)
    }

    /// p(t; 0, y) through the collapsed series.
    fn p_origin(&self, t: f64, y: Point) -> PyResult<f64> {
        self.inner.p_reset_origin(t, &y.into_vec()).map_err(py_err)
    }

    /// Base-process density p_0(t; x, y).
    fn p0(&self, t: f64, x: Point, y: Point) -> PyResult<f64> {
        self.inner.kernel().p0(t, &x.into_vec(), &y.into_vec()).map_err(py_err)
    }

    /// Stationary density ρ(y); method "mixture" or "resolvent".
    #[pyo3(signature = (y, method="mixture"))]
    fn rho(&self, y: Point, method: &str) -> PyResult<f64> {
        let method = match method {
            "mixture" => RhoMethod::Mixture,
            "resolvent" => RhoMethod::ResolventSeries,
            other => return Err(PyValueError::new_err(format!("unknown rho method '{other}'"))),
        };
        self.inner.rho(&y.into_vec(), method).map_err(py_err)
    }

    /// ∫ |y|^γ ρ(y) dy from the closed forms.
    fn rho_moment(&self, gamma: f64) -> PyResult<f64> {
        self.inner.rho_moment(gamma).map_err(py_err)
    }

    /// Spline level value P_n(u).
    fn spline(&self, n: usize, u: f64) -> PyResult<f64> {
        self.inner.family().eval_p(n, u).map_err(py_err)
    }

    /// Relative deviation of p from its Lévy-density limit (jump kernels).
    fn ratio_diagnostic(&self, t: f64, x: Point, y: Point) -> PyResult<f64> {
        stable_ratio_diagnostic(&self.inner, t, &x.into_vec(), &y.into_vec()).map_err(py_err)
    }

    /// ρ/ν - 1/(1-m) (jump kernels).
    fn rho_diagnostic(&self, y: Point) -> PyResult<f64> {
        rho_ratio_diagnostic(&self.inner, &y.into_vec()).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "ResetModel(kernel={:?}, c={:.6}, m={:.6})",
            self.inner.kernel(),
            self.inner.params().c,
            self.inner.params().m
        )
    }
}

/// Monte Carlo endpoint simulation; returns a dict with moments, standard
/// errors, reset counts, and the optional histogram.
#[pyfunction]
#[pyo3(signature = (kernel, c, t, paths=100_000, seed=0, alpha=None, hist=None))]
fn simulate(
    py: Python<'_>,
    kernel: &str,
    c: f64,
    t: f64,
    paths: usize,
    seed: u64,
    alpha: Option<f64>,
    hist: Option<(f64, f64, usize)>,
) -> PyResult<PyObject> {
    let (sim_kernel, a) = match kernel {
        "gaussian" | "brownian" => (SimKernel::Gaussian, 2.0),
        "drift" => (SimKernel::Drift, 1.0),
        "stable" => {
            let a = alpha.ok_or_else(|| PyValueError::new_err("stable needs alpha="))?;
            (SimKernel::SymmetricStable { alpha: a }, a)
        }
        "subordinator" => {
            let a = alpha.ok_or_else(|| PyValueError::new_err("subordinator needs alpha="))?;
            (SimKernel::Subordinator { alpha: a }, a)
        }
        other => return Err(PyValueError::new_err(format!("unknown sim kernel '{other}'"))),
    };
    let params = ResetParams::from_c(a, c, 1).map_err(py_err)?;
    let config = SimConfig {
        params,
        kernel: sim_kernel,
        t,
        paths,
        seed,
        histogram: hist.map(|(lo, hi, bins)| HistogramSpec { lo, hi, bins }),
    };
    let stats = montecarlo::simulate_endpoint(&config).map_err(py_err)?;
    let json = stats.to_json();
    let loads = py.import_bound("json")?.getattr("loads")?;
    Ok(loads.call1((json,))?.unbind())
}

#[pymodule]
fn levy_reset(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyResetModel>()?;
    m.add_function(wrap_pyfunction!(q_pochhammer, m)?)?;
    m.add_function(wrap_pyfunction!(q_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(q_binomial, m)?)?;
    m.add_function(wrap_pyfunction!(mittag_leffler, m)?)?;
    m.add_function(wrap_pyfunction!(moment_a, m)?)?;
    m.add_function(wrap_pyfunction!(scaled_moment_b, m)?)?;
    m.add_function(wrap_pyfunction!(mu_t_moment, m)?)?;
    m.add_function(wrap_pyfunction!(mu_t_integer_moment, m)?)?;
    m.add_function(wrap_pyfunction!(mu_limit_moment, m)?)?;
    m.add_function(wrap_pyfunction!(mu_density, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(vartheta, m)?)?;
    m.add_function(wrap_pyfunction!(regime, m)?)?;
    m.add_function(wrap_pyfunction!(bulk_approx, m)?)?;
    m.add_function(wrap_pyfunction!(tail_approx, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
