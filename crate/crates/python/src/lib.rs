//! Python bindings for `bell_mdl`.
//!
//! Angles are plain floats in radians and γ is a float; invalid values raise
//! `ValueError`, numerical failures raise `RuntimeError`.

use bell_mdl::correlation::{self, TSIRELSON_ANGLES};
use bell_mdl::distance::{self as dist, DistancePair, DEFAULT_GRID_N, DEFAULT_REFINE_TOL};
use bell_mdl::model::{self, GammaParam, SettingAngle};
use bell_mdl::numerics::{self, QuadratureSpec};
use bell_mdl::Error;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    let mut inner = &e;
    while let Error::AtGamma { source, .. } = inner {
        inner = source;
    }
    match inner {
        Error::Domain(_) => PyValueError::new_err(msg),
        Error::Io(_) => PyOSError::new_err(msg),
        _ => PyRuntimeError::new_err(msg),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for bell_mdl::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn quad(tol: f64) -> PyResult<QuadratureSpec> {
    let d = QuadratureSpec::default();
    QuadratureSpec::new(tol, d.abs_tol, d.max_subdivisions).py_err()
}

fn args(phi: f64, gamma: f64) -> PyResult<(SettingAngle, GammaParam)> {
    Ok((SettingAngle::new(phi).py_err()?, GammaParam::new(gamma).py_err()?))
}

/// Solved normalization coefficients for one setting angle and γ.
#[pyclass(frozen, get_all, skip_from_py_object, module = "bell_mdl_py")]
#[derive(Clone)]
pub struct Coefficients {
    pub c1: f64,
    pub c2: f64,
    pub phi: f64,
    pub gamma: f64,
}

impl Coefficients {
    fn inner(&self) -> PyResult<model::Coefficients> {
        let (phi, gamma) = args(self.phi, self.gamma)?;
        model::Coefficients::new(self.c1, self.c2, phi, gamma).py_err()
    }
}

impl From<model::Coefficients> for Coefficients {
    fn from(c: model::Coefficients) -> Self {
        Self { c1: c.c1, c2: c.c2, phi: c.phi.radians(), gamma: c.gamma.value() }
    }
}

#[pymethods]
impl Coefficients {
    /// Weight f(u, v) with u = cos φ′, v = cos(φ′ − φ).
    fn weight(&self, u: f64, v: f64) -> PyResult<f64> {
        model::weight_f(u, v, &self.inner()?).py_err()
    }

    /// Reduced density of the azimuth φ′.
    fn density(&self, phi_prime: f64) -> PyResult<f64> {
        Ok(model::reduced_density_g(phi_prime, &self.inner()?))
    }

    fn __repr__(&self) -> String {
        format!("Coefficients(c1={}, c2={}, phi={}, gamma={})", self.c1, self.c2, self.phi, self.gamma)
    }
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "bell_mdl_py")]
#[derive(Clone)]
pub struct CorrelationEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n_accepted: u64,
    pub n_proposed: u64,
    pub seed: u64,
}

#[pymethods]
impl CorrelationEstimate {
    fn __repr__(&self) -> String {
        format!("CorrelationEstimate(mean={}, std_err={}, n_accepted={})", self.mean, self.std_err, self.n_accepted)
    }
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "bell_mdl_py")]
#[derive(Clone)]
pub struct DmaxResult {
    pub gamma: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    pub d_max: f64,
}

#[pymethods]
impl DmaxResult {
    fn __repr__(&self) -> String {
        format!("DmaxResult(gamma={}, phi_a={}, phi_b={}, d_max={})", self.gamma, self.phi_a, self.phi_b, self.d_max)
    }
}

#[pyfunction]
#[pyo3(signature = (phi, gamma = 0.0, tol = 1e-10))]
fn solve_coefficients(phi: f64, gamma: f64, tol: f64) -> PyResult<Coefficients> {
    let (phi, gamma) = args(phi, gamma)?;
    Ok(model::solve_coefficients(phi, gamma, &quad(tol)?).py_err()?.into())
}

/// Closed-form coefficients for γ = 0.
#[pyfunction]
fn coefficients_gamma0(phi: f64) -> PyResult<Coefficients> {
    Ok(model::coefficients_gamma0_closed(SettingAngle::new(phi).py_err()?).into())
}

#[pyfunction]
fn quantum_correlation(phi: f64) -> f64 {
    correlation::quantum_correlation(phi)
}

/// Model correlation E(φ) by quadrature.
#[pyfunction]
#[pyo3(signature = (phi, gamma = 0.0, tol = 1e-10))]
fn expectation(phi: f64, gamma: f64, tol: f64) -> PyResult<f64> {
    let (phi, gamma) = args(phi, gamma)?;
    correlation::expectation_quadrature(phi, gamma, &quad(tol)?).py_err()
}

#[pyfunction]
#[pyo3(signature = (phi, gamma = 0.0, n = 1_000_000, seed = 0))]
fn estimate_correlation_mc(py: Python<'_>, phi: f64, gamma: f64, n: usize, seed: u64) -> PyResult<CorrelationEstimate> {
    let (phi, gamma) = args(phi, gamma)?;
    let q = QuadratureSpec::default();
    let e = py
        .detach(|| correlation::estimate_correlation_mc(phi, gamma, n, seed, &q))
        .py_err()?;
    Ok(CorrelationEstimate {
        mean: e.mean,
        std_err: e.std_err,
        n_accepted: e.n_accepted,
        n_proposed: e.n_proposed,
        seed: e.seed,
    })
}

#[pyfunction]
#[pyo3(signature = (phi_a, phi_b, gamma = 0.0, tol = 1e-10))]
fn distance(phi_a: f64, phi_b: f64, gamma: f64, tol: f64) -> PyResult<f64> {
    let pair = DistancePair::new(phi_a, phi_b).py_err()?;
    let gamma = GammaParam::new(gamma).py_err()?;
    dist::distance_d(pair, gamma, &quad(tol)?).py_err()
}

#[pyfunction]
#[pyo3(signature = (gamma = 0.0, grid_n = DEFAULT_GRID_N, refine_tol = DEFAULT_REFINE_TOL))]
fn find_dmax(py: Python<'_>, gamma: f64, grid_n: usize, refine_tol: f64) -> PyResult<DmaxResult> {
    let g = GammaParam::new(gamma).py_err()?;
    let q = QuadratureSpec::default();
    let r = py.detach(|| dist::find_dmax(g, grid_n, refine_tol, &q)).py_err()?;
    Ok(DmaxResult {
        gamma,
        phi_a: r.argmax.phi_a.radians(),
        phi_b: r.argmax.phi_b.radians(),
        d_max: r.d_max,
    })
}

/// (φ*, d_max, residual) for the γ = 0 maximum.
#[pyfunction]
fn gamma0_maximum() -> PyResult<(f64, f64, f64)> {
    let m = dist::solve_gamma0_maximum().py_err()?;
    Ok((m.phi_star, m.d_max, m.residual))
}

fn correlator(gamma: Option<f64>) -> PyResult<impl FnMut(f64) -> bell_mdl::Result<f64>> {
    let gamma = gamma.map(GammaParam::new).transpose().py_err()?;
    let q = QuadratureSpec::default();
    Ok(move |p: f64| match gamma {
        None => Ok(correlation::quantum_correlation(p)),
        Some(g) => correlation::expectation_quadrature(SettingAngle::new(p)?, g, &q),
    })
}

/// (lhs, rhs, violated) for |E(xy) − E(xz)| ≤ 1 + E(yz). Quantum E unless
/// `gamma` is given.
#[pyfunction]
#[pyo3(signature = (phi_xy, phi_xz, phi_yz, gamma = None))]
fn bell_check(phi_xy: f64, phi_xz: f64, phi_yz: f64, gamma: Option<f64>) -> PyResult<(f64, f64, bool)> {
    let r = correlation::bell_original_check(phi_xy, phi_xz, phi_yz, correlator(gamma)?).py_err()?;
    Ok((r.lhs, r.rhs, r.violated))
}

/// CHSH combination at four relative angles, the Tsirelson set by default.
#[pyfunction]
#[pyo3(signature = (angles = TSIRELSON_ANGLES, gamma = None))]
fn chsh(angles: [f64; 4], gamma: Option<f64>) -> PyResult<f64> {
    let [a, b, c, d] = angles;
    correlation::chsh_value(a, b, c, d, correlator(gamma)?).py_err()
}

#[pyfunction]
fn ln_gamma(x: f64) -> PyResult<f64> {
    numerics::ln_gamma(x).py_err()
}

#[pyfunction]
fn theta_prefactor(gamma: f64) -> PyResult<f64> {
    numerics::theta_prefactor(gamma).py_err()
}

#[pymodule]
fn bell_mdl_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Coefficients>()?;
    m.add_class::<CorrelationEstimate>()?;
    m.add_class::<DmaxResult>()?;
    m.add_function(wrap_pyfunction!(solve_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(coefficients_gamma0, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(expectation, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_correlation_mc, m)?)?;
    m.add_function(wrap_pyfunction!(distance, m)?)?;
    m.add_function(wrap_pyfunction!(find_dmax, m)?)?;
    m.add_function(wrap_pyfunction!(gamma0_maximum, m)?)?;
    m.add_function(wrap_pyfunction!(bell_check, m)?)?;
    m.add_function(wrap_pyfunction!(chsh, m)?)?;
    m.add_function(wrap_pyfunction!(ln_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(theta_prefactor, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_to_python_types() {
        Python::attach(|py| {
            let e = to_py(Error::Domain("bad".into()));
            assert!(e.is_instance_of::<PyValueError>(py));
            let e = to_py(Error::NonConvergence { method: "brent", detail: "x".into() });
            assert!(e.is_instance_of::<PyRuntimeError>(py));
            let wrapped = Error::AtGamma { gamma: 0.1, source: Box::new(Error::Domain("bad".into())) };
            assert!(to_py(wrapped).is_instance_of::<PyValueError>(py));
        });
    }

    #[test]
    fn functions_match_core() {
        let c = solve_coefficients(1.0, 0.0, 1e-10).unwrap();
        let closed = coefficients_gamma0(1.0).unwrap();
        assert!((c.c1 - closed.c1).abs() < 1e-12 && (c.c2 - closed.c2).abs() < 1e-12);
        assert!((chsh(TSIRELSON_ANGLES, Some(0.2)).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
        let (lhs, rhs, violated) = bell_check(1.5, 0.7, 0.8, None).unwrap();
        assert!(violated && lhs > rhs);
        assert!(solve_coefficients(0.0, 0.0, 1e-10).is_err());
    }
}
