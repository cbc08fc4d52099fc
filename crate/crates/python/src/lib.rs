use std::path::Path;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use xentangle::entanglement::{self as ent, DensityMatrix2Q, IdealState};
use xentangle::fock::Spin;
use xentangle::model::{GridSpec, Model, ModelConfig};
use xentangle::presets::{self, PRESET_NAMES};
use xentangle::selection;
use xentangle::simulation;
use xentangle::spectra::SpectrumGrid;

fn err(e: xentangle::Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn parse_spin(s: &str) -> PyResult<Spin> {
    match s {
        "up" => Ok(Spin::Up),
        "down" => Ok(Spin::Down),
        _ => Err(PyValueError::new_err(format!("spin must be `up` or `down`, got `{s}`"))),
    }
}

fn grid_arg(grid: Option<(f64, f64, f64)>, default: GridSpec) -> PyResult<GridSpec> {
    match grid {
        Some((a, b, s)) => GridSpec::new(a, b, s).map_err(err),
        None => Ok(default),
    }
}

fn spectrum_dict<'py>(py: Python<'py>, spec: &SpectrumGrid) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item(&spec.axis_name, spec.axis.clone())?;
    for (name, v) in &spec.channels {
        d.set_item(name, v.clone())?;
    }
    Ok(d)
}

fn rho_rows(rho: &[[Complex64; 4]; 4]) -> Vec<Vec<Complex64>> {
    rho.iter().map(|r| r.to_vec()).collect()
}

fn rho_array(rows: Vec<Vec<Complex64>>) -> PyResult<[[Complex64; 4]; 4]> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(PyValueError::new_err("density matrix must be 4x4"));
    }
    let mut rho = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (i, r) in rows.iter().enumerate() {
        rho[i].copy_from_slice(r);
    }
    Ok(rho)
}

/// Two-qubit (photoelectron spin x photon polarization) density matrix.
#[pyclass(name = "DensityMatrix", module = "xentangle_py", frozen)]
struct PyDensityMatrix {
    inner: DensityMatrix2Q,
    ideal: IdealState,
}

#[pymethods]
impl PyDensityMatrix {
    #[new]
    #[pyo3(signature = (rho, e_b = 0.0, omega = 0.0))]
    fn new(rho: Vec<Vec<Complex64>>, e_b: f64, omega: f64) -> PyResult<Self> {
        let inner = DensityMatrix2Q::new(rho_array(rho)?, e_b, omega).map_err(err)?;
        Ok(Self {
            inner,
            ideal: IdealState::PhasedPair { a: 0, b: 3 },
        })
    }

    #[getter]
    fn rho(&self) -> Vec<Vec<Complex64>> {
        rho_rows(&self.inner.rho)
    }

    #[getter]
    fn e_b(&self) -> f64 {
        self.inner.e_b
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.inner.omega
    }

    #[getter]
    fn concurrence(&self) -> PyResult<f64> {
        Ok(ent::concurrence_tangle(&self.inner).map_err(err)?.0)
    }

    #[getter]
    fn tangle(&self) -> PyResult<f64> {
        Ok(ent::concurrence_tangle(&self.inner).map_err(err)?.1)
    }

    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        self.inner.eigenvalues().map_err(err)
    }

    /// Fidelity with `psi` (four amplitudes in U1, U2, D1, D2 order).
    fn fidelity(&self, psi: Vec<Complex64>) -> PyResult<f64> {
        let psi: [Complex64; 4] = psi
            .try_into()
            .map_err(|_| PyValueError::new_err("state must have 4 amplitudes"))?;
        ent::fidelity(&self.inner, &psi).map_err(err)
    }

    /// Best fidelity with `(|a> + e^{i alpha}|b>)/sqrt2` and the maximizing alpha.
    fn optimal_phase_fidelity(&self, a: usize, b: usize) -> PyResult<(f64, f64)> {
        if a > 3 || b > 3 || a == b {
            return Err(PyValueError::new_err("a and b must be distinct channel indices 0..3"));
        }
        Ok(ent::optimal_phase_fidelity(&self.inner, a, b))
    }

    /// Metrics block against the scenario's reference state, as JSON.
    fn report_json(&self) -> PyResult<String> {
        let r = ent::report(&self.inner, self.ideal).map_err(err)?;
        Ok(serde_json::to_string(&r).expect("serializable"))
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(e_b={}, omega={})", self.inner.e_b, self.inner.omega)
    }
}

/// Solved three-stage model for one scenario.
#[pyclass(name = "Simulation", module = "xentangle_py", frozen)]
struct PySimulation {
    sim: simulation::Simulation,
}

#[pymethods]
impl PySimulation {
    /// `config` is a preset name or a path to a config file.
    #[new]
    fn new(py: Python<'_>, config: &str) -> PyResult<Self> {
        let model = if Path::new(config).exists() {
            Model::load(config)
        } else if PRESET_NAMES.contains(&config) {
            presets::preset(config)
        } else {
            return Err(PyValueError::new_err(format!(
                "`{config}` is neither a file nor a preset ({})",
                PRESET_NAMES.join(", ")
            )));
        }
        .map_err(err)?;
        Self::solve(py, model)
    }

    /// Build from a config document; relative data paths resolve against `base`.
    #[staticmethod]
    #[pyo3(signature = (text, base = "."))]
    fn from_json(py: Python<'_>, text: &str, base: &str) -> PyResult<Self> {
        let config = ModelConfig::from_json(text, "python").map_err(err)?;
        let model = Model::from_config(config, Path::new(base)).map_err(err)?;
        Self::solve(py, model)
    }

    #[getter]
    fn scenario(&self) -> String {
        format!("{:?}", self.sim.model.scenario())
    }

    #[getter]
    fn config_json(&self) -> String {
        self.sim.model.config.to_json()
    }

    #[getter]
    fn config_sha256(&self) -> String {
        self.sim.model.config_sha256.clone()
    }

    #[getter]
    fn ground_energy(&self) -> f64 {
        self.sim.ground_energy()
    }

    /// XPS on `grid = (start, stop, step)`; keys are the axis name and the channels.
    #[pyo3(signature = (grid = None))]
    fn xps<'py>(&self, py: Python<'py>, grid: Option<(f64, f64, f64)>) -> PyResult<Bound<'py, PyDict>> {
        let grid = grid_arg(grid, self.sim.model.config.grids.xps)?;
        let spec = py.detach(|| self.sim.xps_spectrum(&grid)).map_err(err)?;
        spectrum_dict(py, &spec)
    }

    /// Unbroadened XPS lines `(position, weight)` for one photoelectron spin.
    fn xps_lines(&self, spin: &str) -> PyResult<Vec<(f64, f64)>> {
        let lines = self.sim.xps_lines(parse_spin(spin)?);
        Ok(lines.lines.iter().map(|l| (l.position, l.weight)).collect())
    }

    #[pyo3(signature = (e_b, omega = None))]
    fn xepecs<'py>(&self, py: Python<'py>, e_b: f64, omega: Option<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
        let omega = omega.unwrap_or_else(|| self.sim.model.config.grids.omega.nodes());
        let spec = py.detach(|| self.sim.xepecs_spectrum(e_b, &omega)).map_err(err)?;
        spectrum_dict(py, &spec)
    }

    fn xepecs_weight(&self, e_b: f64) -> PyResult<f64> {
        self.sim.xepecs_weight(e_b).map_err(err)
    }

    #[pyo3(signature = (omega = None))]
    fn nxes<'py>(&self, py: Python<'py>, omega: Option<Vec<f64>>) -> PyResult<Bound<'py, PyDict>> {
        let omega = omega.unwrap_or_else(|| self.sim.model.config.grids.omega.nodes());
        let binding = self.sim.model.config.grids.binding;
        let spec = py.detach(|| self.sim.nxes(&binding, &omega)).map_err(err)?;
        spectrum_dict(py, &spec)
    }

    /// Density matrix at `(e_b, omega)`; omitted values follow the brightest-point rule.
    #[pyo3(signature = (e_b = None, omega = None))]
    fn density_matrix(&self, py: Python<'_>, e_b: Option<f64>, omega: Option<f64>) -> PyResult<PyDensityMatrix> {
        let ideal = IdealState::for_scenario(self.sim.model.scenario());
        let point = py
            .detach(|| {
                let e_b = match e_b {
                    Some(e) => e,
                    None => {
                        let profile = selection::xepecs_weight_profile(&self.sim, &self.sim.model.config.grids.binding)?;
                        selection::brightest_binding(&profile)?
                    }
                };
                selection::metrics_at(&self.sim, e_b, omega, ideal)
            })
            .map_err(err)?;
        Ok(PyDensityMatrix {
            inner: point.density,
            ideal,
        })
    }

    /// Core-hole (up, down) occupancy reached at `e_b` with photoelectron `spin`.
    fn core_hole_spin_occupancy(&self, e_b: f64, spin: &str) -> PyResult<(f64, f64)> {
        let o = self
            .sim
            .core_hole_spin_occupancy(e_b, parse_spin(spin)?)
            .map_err(err)?;
        Ok((o[0], o[1]))
    }

    /// Main peak, main centroid and satellite binding energies.
    fn peak_summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let cfg = &self.sim.model.config;
        let s = py
            .detach(|| {
                let xps = self.sim.xps_spectrum(&cfg.grids.xps)?;
                let profile = selection::xepecs_weight_profile(&self.sim, &cfg.grids.binding)?;
                selection::peak_summary(&xps, &profile)
            })
            .map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("main_peak", s.main_peak)?;
        d.set_item("main_centroid", s.main_centroid)?;
        d.set_item("satellite", s.satellite)?;
        d.set_item("separation", s.separation())?;
        Ok(d)
    }
}

impl PySimulation {
    fn solve(py: Python<'_>, model: Model) -> PyResult<Self> {
        let sim = py.detach(|| simulation::Simulation::new(model)).map_err(err)?;
        Ok(Self { sim })
    }
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    PRESET_NAMES.to_vec()
}

/// JSON text of a bundled preset.
#[pyfunction]
fn preset_config(name: &str) -> PyResult<String> {
    Ok(presets::preset_config(name).map_err(err)?.to_json())
}

/// `(ok, report_json)` of the preset and data-file check.
#[pyfunction]
fn verify_presets() -> PyResult<(bool, String)> {
    let r = presets::verify_presets().map_err(err)?;
    Ok((r.ok(), serde_json::to_string(&r).expect("serializable")))
}

#[pyfunction]
fn wigner_3j(j1: f64, j2: f64, j3: f64, m1: f64, m2: f64, m3: f64) -> f64 {
    xentangle::angular::wigner_3j(j1, j2, j3, m1, m2, m3)
}

#[pyfunction]
fn gaunt(k: u32, l: u32, m: i32, lp: u32, mp: i32) -> f64 {
    xentangle::angular::gaunt_ck(k, l, m, lp, mp)
}

/// Area-normalized Voigt profile with Lorentzian and Gaussian HWHM.
#[pyfunction]
fn voigt(x: f64, lorentz: f64, gauss: f64) -> f64 {
    xentangle::spectra::voigt(x, xentangle::model::Width { lorentz, gauss })
}

#[pymodule]
fn xentangle_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySimulation>()?;
    m.add_class::<PyDensityMatrix>()?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset_config, m)?)?;
    m.add_function(wrap_pyfunction!(verify_presets, m)?)?;
    m.add_function(wrap_pyfunction!(wigner_3j, m)?)?;
    m.add_function(wrap_pyfunction!(gaunt, m)?)?;
    m.add_function(wrap_pyfunction!(voigt, m)?)?;
    m.add("CHANNELS", simulation::CHANNEL_LABELS.to_vec())?;
    Ok(())
}
