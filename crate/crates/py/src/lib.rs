//! Python bindings. Structured results are returned as plain dicts and
//! lists; covariance matrices as the `CovMat` class.

use mechent_core::constants::hz_to_rad;
use mechent_core::error::{Error, ErrorClass};
use mechent_core::gaussian::{self, CovMat4, TmstParams};
use mechent_core::lab::{self, CalibrationPoint, RfChain};
use mechent_core::model::{self, DeviceConfig, ScatterParams};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    match e.class() {
        ErrorClass::Numeric => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for mechent_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(err)
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn config(text: Option<&str>) -> PyResult<DeviceConfig> {
    match text {
        Some(t) => DeviceConfig::parse(t).py_err(),
        None => Ok(DeviceConfig::default()),
    }
}

/// Two-mode covariance matrix, quadrature order (X1, P1, X2, P2), vacuum 1/2.
#[pyclass(name = "CovMat", frozen, from_py_object)]
#[derive(Clone)]
struct PyCovMat(CovMat4);

#[pymethods]
impl PyCovMat {
    #[new]
    fn new(v: [[f64; 4]; 4]) -> PyResult<Self> {
        CovMat4::new(v).py_err().map(Self)
    }

    #[staticmethod]
    fn vacuum() -> Self {
        Self(CovMat4::vacuum())
    }

    #[staticmethod]
    fn from_normal_form(v11: f64, v33: f64, v13: f64) -> PyResult<Self> {
        CovMat4::from_normal_form(v11, v33, v13).py_err().map(Self)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CovMat4::from_json(text).py_err().map(Self)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().py_err()
    }

    fn to_list(&self) -> [[f64; 4]; 4] {
        self.0.as_array()
    }

    fn symplectic_eigenvalues(&self) -> (f64, f64) {
        self.0.symplectic_eigenvalues()
    }

    fn is_physical(&self) -> bool {
        self.0.is_physical()
    }

    /// `(V11, V33, V13)`.
    fn normal_form(&self) -> PyResult<(f64, f64, f64)> {
        let nf = self.0.normal_form().py_err()?;
        Ok((nf.v11, nf.v33, nf.v13))
    }

    fn rotate_mode1(&self, phi: f64) -> Self {
        Self(self.0.rotate_mode1(phi))
    }

    fn __repr__(&self) -> String {
        format!("CovMat({:?})", self.0.as_array())
    }
}

#[pyfunction]
fn entanglement_report<'py>(py: Python<'py>, cm: &PyCovMat) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &gaussian::entanglement_report(&cm.0).py_err()?)
}

#[pyfunction]
fn epr_duan<'py>(py: Python<'py>, cm: &PyCovMat, phi: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &gaussian::epr_duan(&cm.0, phi))
}

#[pyfunction]
fn log_negativity(cm: &PyCovMat) -> PyResult<f64> {
    Ok(gaussian::negativity(&cm.0).py_err()?.e_n)
}

#[pyfunction]
fn quantum_discord(cm: &PyCovMat) -> PyResult<f64> {
    gaussian::quantum_discord(&cm.0).py_err()
}

/// `(r, phi, n1, n2)`.
#[pyfunction]
fn tmst_from_cm(cm: &PyCovMat) -> PyResult<(f64, f64, f64, f64)> {
    let p = gaussian::tmst_from_cm(&cm.0).py_err()?;
    Ok((p.r, p.phi, p.n1, p.n2))
}

#[pyfunction]
fn cm_from_tmst(r: f64, phi: f64, n1: f64, n2: f64) -> PyResult<PyCovMat> {
    Ok(PyCovMat(gaussian::cm_from_tmst(&TmstParams::new(r, phi, n1, n2).py_err()?)))
}

#[pyfunction]
fn wigner_density(cm: &PyCovMat, psi: [f64; 4]) -> PyResult<f64> {
    gaussian::wigner_density(&cm.0, &psi).py_err()
}

/// Scattering coefficients at angular sideband argument `omega` (rad/s),
/// as a dict of complex numbers.
#[pyfunction]
#[pyo3(signature = (omega, c1, c2, eta1, eta2, kappa1, kappa2, gamma_m))]
#[allow(clippy::too_many_arguments)]
fn scattering_coefficients<'py>(
    py: Python<'py>,
    omega: f64,
    c1: f64,
    c2: f64,
    eta1: f64,
    eta2: f64,
    kappa1: f64,
    kappa2: f64,
    gamma_m: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let p = ScatterParams { c1, c2, eta1, eta2, kappa1, kappa2, gamma_m };
    let a = model::scattering_coefficients(omega, &p).py_err()?;
    let dict = pyo3::types::PyDict::new(py);
    let names = ["a1", "a12", "a1m", "a1in", "a12in", "a2", "a21", "a2m", "a2in", "a21in"];
    for (name, z) in names.iter().zip(a.as_array()) {
        dict.set_item(name, pyo3::types::PyComplex::from_doubles(py, z.re, z.im))?;
    }
    Ok(dict.into_any())
}

/// Stability, cooperativities and drive quantities for a `key = value`
/// device configuration (built-in defaults when `config` is None).
#[pyfunction]
#[pyo3(signature = (config=None))]
fn operating_point<'py>(py: Python<'py>, config: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &self::config(config)?.operating_point().py_err()?)
}

/// Filtered output covariance matrix of the configured device.
#[pyfunction]
#[pyo3(signature = (config=None))]
fn output_cm(config: Option<&str>) -> PyResult<PyCovMat> {
    let cfg = self::config(config)?;
    let op = cfg.operating_point().py_err()?;
    Ok(PyCovMat(model::filtered_output_cm(&op.model, cfg.bandwidth_hz, cfg.filter).py_err()?))
}

#[pyfunction]
#[pyo3(signature = (p_red_dbm, config=None))]
fn power_sweep<'py>(py: Python<'py>, p_red_dbm: Vec<f64>, config: Option<&str>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &model::power_sweep(&self::config(config)?, &p_red_dbm).py_err()?)
}

/// Weighted straight-line calibration fit; returns gain, added noise and
/// their standard errors.
#[pyfunction]
#[pyo3(signature = (temps_k, noise_v2hz, sigma, omega_c_hz, r_ohm=50.0, bandwidth_hz=100.0))]
fn calibrate_chain<'py>(
    py: Python<'py>,
    temps_k: Vec<f64>,
    noise_v2hz: Vec<f64>,
    sigma: Vec<f64>,
    omega_c_hz: f64,
    r_ohm: f64,
    bandwidth_hz: f64,
) -> PyResult<Bound<'py, PyAny>> {
    if temps_k.len() != noise_v2hz.len() || temps_k.len() != sigma.len() {
        return Err(PyValueError::new_err("temps_k, noise_v2hz and sigma must have equal length"));
    }
    let points: Vec<CalibrationPoint> = temps_k
        .iter()
        .zip(&noise_v2hz)
        .zip(&sigma)
        .map(|((&temp_k, &noise_v2hz), &sigma)| CalibrationPoint { temp_k, noise_v2hz, sigma })
        .collect();
    to_py(py, &lab::calibrate_chain(&points, hz_to_rad(omega_c_hz), r_ohm, bandwidth_hz).py_err()?)
}

/// Samples on/off batches from `cm` through the configured detection
/// chains and returns the estimated covariance with standard errors.
#[pyfunction]
#[pyo3(signature = (cm, n_on, n_off, seed, config=None))]
fn virtual_measurement<'py>(
    py: Python<'py>,
    cm: &PyCovMat,
    n_on: usize,
    n_off: usize,
    seed: u64,
    config: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = self::config(config)?;
    let chain = |j: usize| {
        RfChain::new(cfg.gain_db[j], cfg.n_add[j], cfg.adc_ohm, cfg.bandwidth_hz, hz_to_rad(cfg.omega_c_hz[j])).py_err()
    };
    let chains = [chain(0)?, chain(1)?];
    let (truth, on_seed, off_seed) = (cm.0, seed.wrapping_mul(2), seed.wrapping_mul(2).wrapping_add(1));
    let est = py
        .detach(move || -> mechent_core::Result<_> {
            let on = lab::sample_quadratures(&truth, &chains, n_on, on_seed, true)?;
            let off = lab::sample_quadratures(&truth, &chains, n_off, off_seed, false)?;
            let omegas = [chains[0].omega_c, chains[1].omega_c];
            lab::estimate_cm(&on, &off, cfg.t_in_k, omegas)
        })
        .py_err()?;
    to_py(py, &est)
}

#[pymodule]
fn mechent(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCovMat>()?;
    m.add_function(wrap_pyfunction!(entanglement_report, m)?)?;
    m.add_function(wrap_pyfunction!(epr_duan, m)?)?;
    m.add_function(wrap_pyfunction!(log_negativity, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_discord, m)?)?;
    m.add_function(wrap_pyfunction!(tmst_from_cm, m)?)?;
    m.add_function(wrap_pyfunction!(cm_from_tmst, m)?)?;
    m.add_function(wrap_pyfunction!(wigner_density, m)?)?;
    m.add_function(wrap_pyfunction!(scattering_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(operating_point, m)?)?;
    m.add_function(wrap_pyfunction!(output_cm, m)?)?;
    m.add_function(wrap_pyfunction!(power_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_chain, m)?)?;
    m.add_function(wrap_pyfunction!(virtual_measurement, m)?)?;
    Ok(())
}
