//! Python bindings for `branchpath`.
//!
//! Domain errors are raised as `BranchpathError` (a `ValueError` subclass)
//! whose message starts with the error name, e.g. `"GridMismatch: ..."`.

use branchpath::branches::{self as br, PushGeometry, RecordMode};
use branchpath::catbox::{self as cb, DecayModel, EngineKind, ExperimentWindow};
use branchpath::propagator::{self as pr, PotentialSpec, TabulatedPotential, TimeSlicing};
use branchpath::units::UnitMode;
use branchpath::wavepacket as wp;
use branchpath::{Complex64, Grid1D, UnitSystem, WaveFunction};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

create_exception!(branchpath_py, BranchpathError, PyValueError);

fn err(e: branchpath::Error) -> PyErr {
    BranchpathError::new_err(e.to_string())
}

trait OrRaise<T> {
    fn or_raise(self) -> PyResult<T>;
}

impl<T> OrRaise<T> for branchpath::Result<T> {
    fn or_raise(self) -> PyResult<T> {
        self.map_err(err)
    }
}

/// `"si"` or `"natural"`.
pub fn units_from_name(name: &str) -> PyResult<UnitSystem> {
    match name {
        "si" => Ok(UnitSystem::new(UnitMode::Si)),
        "natural" => Ok(UnitSystem::new(UnitMode::Natural)),
        other => Err(PyValueError::new_err(format!("units must be 'si' or 'natural', got '{other}'"))),
    }
}

fn record_from_name(name: &str) -> PyResult<RecordMode> {
    match name {
        "which-path" => Ok(RecordMode::WhichPath),
        "none" => Ok(RecordMode::NoRecord),
        other => Err(PyValueError::new_err(format!("record must be 'which-path' or 'none', got '{other}'"))),
    }
}

fn engine_from_name(name: &str) -> PyResult<EngineKind> {
    EngineKind::ALL
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown engine '{name}'")))
}

#[pyclass(name = "Grid", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyGrid(pub Grid1D);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(x_min: f64, x_max: f64, n_points: usize) -> PyResult<Self> {
        Ok(Self(Grid1D::new(x_min, x_max, n_points).or_raise()?))
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.0.dx()
    }

    #[getter]
    fn x_min(&self) -> f64 {
        self.0.x_min()
    }

    #[getter]
    fn x_max(&self) -> f64 {
        self.0.x_max()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn points(&self) -> Vec<f64> {
        self.0.points().collect()
    }

    fn __repr__(&self) -> String {
        format!("Grid({}, {}, {})", self.0.x_min(), self.0.x_max(), self.0.len())
    }
}

#[pyclass(name = "WaveFunction", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyWaveFunction(pub WaveFunction);

#[pymethods]
impl PyWaveFunction {
    #[new]
    fn new(grid: PyGrid, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        Ok(Self(WaveFunction::new(grid.0, amplitudes).or_raise()?))
    }

    /// Normalised Gaussian whose |ψ|² has standard deviation `sigma`.
    #[staticmethod]
    #[pyo3(signature = (grid, center, sigma, wavenumber = 0.0))]
    fn gaussian(grid: PyGrid, center: f64, sigma: f64, wavenumber: f64) -> PyResult<Self> {
        Ok(Self(WaveFunction::gaussian(grid.0, center, sigma, wavenumber).or_raise()?))
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn normalize(&self) -> PyResult<Self> {
        Ok(Self(self.0.normalize().or_raise()?))
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    fn inner_product(&self, other: &PyWaveFunction) -> PyResult<Complex64> {
        self.0.inner_product(&other.0).or_raise()
    }

    fn mean_position(&self) -> f64 {
        self.0.mean_position()
    }

    fn position_spread(&self) -> f64 {
        self.0.position_spread()
    }
}

#[pyclass(name = "Lagrangian", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyLagrangian(pub pr::LagrangianSpec);

#[pymethods]
impl PyLagrangian {
    #[staticmethod]
    fn free(mass: f64) -> PyResult<Self> {
        Ok(Self(pr::LagrangianSpec::free(mass).or_raise()?))
    }

    /// Potential `V(x) = −F·x`.
    #[staticmethod]
    fn constant_force(mass: f64, force: f64) -> PyResult<Self> {
        Ok(Self(pr::LagrangianSpec::constant_force(mass, force).or_raise()?))
    }

    /// Linearly interpolated potential sampled on `grid`.
    #[staticmethod]
    fn tabulated(mass: f64, grid: PyGrid, values: Vec<f64>) -> PyResult<Self> {
        let table = TabulatedPotential::new(grid.0, values).or_raise()?;
        Ok(Self(pr::LagrangianSpec::new(mass, PotentialSpec::Tabulated(table)).or_raise()?))
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass()
    }

    fn potential_at(&self, x: f64) -> PyResult<f64> {
        self.0.potential_at(x).or_raise()
    }

    fn __repr__(&self) -> String {
        format!("Lagrangian({})", self.0.id())
    }
}

fn slicing(time: f64, n_slices: usize) -> PyResult<TimeSlicing> {
    TimeSlicing::new(time, n_slices).or_raise()
}

/// Closed-form kernel `K(x_b, T; x_a, 0)` for free and constant-force motion.
#[pyfunction]
#[pyo3(signature = (x_a, x_b, time, lagrangian, units = "natural"))]
pub fn analytic_kernel(x_a: f64, x_b: f64, time: f64, lagrangian: &PyLagrangian, units: &str) -> PyResult<Complex64> {
    pr::analytic_kernel(x_a, x_b, time, &lagrangian.0, &units_from_name(units)?).or_raise()
}

/// Time-sliced kernel entry between the grid points nearest `x_a` and `x_b`.
#[pyfunction]
#[pyo3(signature = (grid, time, n_slices, lagrangian, x_a, x_b, units = "natural"))]
pub fn kernel_element(
    grid: PyGrid,
    time: f64,
    n_slices: usize,
    lagrangian: &PyLagrangian,
    x_a: f64,
    x_b: f64,
    units: &str,
) -> PyResult<Complex64> {
    pr::kernel_element(&grid.0, &slicing(time, n_slices)?, &lagrangian.0, &units_from_name(units)?, x_a, x_b).or_raise()
}

/// Evolves `psi` over `time` in `n_slices` steps. No renormalisation.
#[pyfunction]
#[pyo3(signature = (psi, time, n_slices, lagrangian, units = "natural"))]
pub fn propagate(
    psi: &PyWaveFunction,
    time: f64,
    n_slices: usize,
    lagrangian: &PyLagrangian,
    units: &str,
) -> PyResult<PyWaveFunction> {
    let out =
        pr::propagate_sliced(&psi.0, &slicing(time, n_slices)?, &lagrangian.0, &units_from_name(units)?).or_raise()?;
    Ok(PyWaveFunction(out))
}

/// Action of the piecewise-linear path through `(times, positions)`.
#[pyfunction]
pub fn action(times: Vec<f64>, positions: Vec<f64>, lagrangian: &PyLagrangian) -> PyResult<f64> {
    let path = pr::Path::new(times, positions).or_raise()?;
    pr::action(&path, &lagrangian.0).or_raise()
}

#[pyfunction]
#[pyo3(signature = (grid, time, n_slices, lagrangian, half_width, x_a, x_b, units = "natural"))]
#[allow(clippy::too_many_arguments)]
pub fn tube_amplitude_fraction(
    grid: PyGrid,
    time: f64,
    n_slices: usize,
    lagrangian: &PyLagrangian,
    half_width: f64,
    x_a: f64,
    x_b: f64,
    units: &str,
) -> PyResult<f64> {
    pr::tube_amplitude_fraction(
        &grid.0,
        &slicing(time, n_slices)?,
        &lagrangian.0,
        &units_from_name(units)?,
        half_width,
        (x_a, x_b),
    )
    .or_raise()
}

#[pyclass(name = "GaussianPacket", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyGaussianPacket(pub wp::GaussianPacket);

#[pymethods]
impl PyGaussianPacket {
    #[new]
    #[pyo3(signature = (mass, width, center = 0.0, velocity = 0.0))]
    fn new(mass: f64, width: f64, center: f64, velocity: f64) -> PyResult<Self> {
        Ok(Self(wp::GaussianPacket::new(mass, center, width, velocity).or_raise()?))
    }

    #[staticmethod]
    #[pyo3(signature = (exact_compton = false))]
    fn electron(exact_compton: bool) -> Self {
        Self(wp::GaussianPacket::electron(exact_compton))
    }

    #[staticmethod]
    fn elevator() -> Self {
        Self(wp::GaussianPacket::elevator())
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass
    }

    #[getter]
    fn width(&self) -> f64 {
        self.0.width
    }

    #[pyo3(signature = (units = "si"))]
    fn spread_rate(&self, units: &str) -> PyResult<f64> {
        Ok(wp::spread_rate(&self.0, &units_from_name(units)?))
    }

    #[pyo3(signature = (delta_t, units = "si"))]
    fn spread_from_velocity(&self, delta_t: f64, units: &str) -> PyResult<f64> {
        wp::spread_from_velocity(&self.0, delta_t, &units_from_name(units)?).or_raise()
    }

    #[pyo3(signature = (delta_t, units = "si"))]
    fn spread_total(&self, delta_t: f64, units: &str) -> PyResult<f64> {
        wp::spread_total(&self.0, delta_t, &units_from_name(units)?).or_raise()
    }

    #[pyo3(signature = (target, units = "si"))]
    fn wait_time_for_spread(&self, target: f64, units: &str) -> PyResult<f64> {
        wp::wait_time_for_spread(&self.0, target, &units_from_name(units)?).or_raise()
    }

    fn __repr__(&self) -> String {
        format!("GaussianPacket(mass={:e}, width={:e})", self.0.mass, self.0.width)
    }
}

#[pyclass(name = "BranchEnsemble", frozen)]
pub struct PyBranchEnsemble(pub br::BranchEnsemble);

#[pymethods]
impl PyBranchEnsemble {
    fn visibility(&self) -> PyResult<f64> {
        br::visibility(&self.0).or_raise()
    }

    fn outcome_distribution(&self, phi: f64, detector: &PyWaveFunction) -> PyResult<f64> {
        br::outcome_distribution(&self.0, phi, &detector.0).or_raise()
    }

    /// Half peak-to-peak of the 64-point phase sweep; the detector defaults to
    /// the first branch state.
    #[pyo3(signature = (detector = None))]
    fn fringe_contrast(&self, detector: Option<&PyWaveFunction>) -> PyResult<f64> {
        let d = match detector {
            Some(d) => d.0.clone(),
            None => br::reference_detector(&self.0).or_raise()?,
        };
        br::fringe_contrast(&self.0, &d).or_raise()
    }

    fn decohere(&self, s: f64) -> PyResult<Self> {
        Ok(Self(self.0.decohere(s).or_raise()?))
    }

    fn weights(&self) -> Vec<Complex64> {
        self.0.branches().iter().map(|b| b.weight()).collect()
    }

    fn states(&self) -> Vec<PyWaveFunction> {
        self.0.branches().iter().map(|b| PyWaveFunction(b.psi().clone())).collect()
    }

    fn pointers(&self) -> Vec<String> {
        self.0.branches().iter().map(|b| b.pointer().id().to_string()).collect()
    }
}

/// Down branch evolves under `lagrangian_down`, up branch under
/// `lagrangian_up`, both over `time` in `n_slices` steps.
#[pyfunction]
#[pyo3(signature = (a_down, a_up, packet, lagrangian_up, lagrangian_down, time, n_slices, grid, record = "which-path", units = "natural"))]
#[allow(clippy::too_many_arguments)]
pub fn evolve_conditional(
    a_down: Complex64,
    a_up: Complex64,
    packet: &PyGaussianPacket,
    lagrangian_up: &PyLagrangian,
    lagrangian_down: &PyLagrangian,
    time: f64,
    n_slices: usize,
    grid: PyGrid,
    record: &str,
    units: &str,
) -> PyResult<PyBranchEnsemble> {
    let ens = br::evolve_conditional(
        (a_down, a_up),
        &packet.0,
        &lagrangian_up.0,
        &lagrangian_down.0,
        &slicing(time, n_slices)?,
        &grid.0,
        record_from_name(record)?,
        &units_from_name(units)?,
    )
    .or_raise()?;
    Ok(PyBranchEnsemble(ens))
}

/// Equal-weight experiment in which the up branch is lifted by `lift` and
/// either held there or, with `recombine`, brought back so the packets overlap
/// by `target_overlap`.
#[pyfunction]
#[pyo3(signature = (grid, record = "none", recombine = false, mass = 1.0, sigma0 = 0.5, lift = 1.0, time = 1.0, n_slices = 64, target_overlap = 0.95))]
#[allow(clippy::too_many_arguments)]
pub fn lift_experiment(
    grid: PyGrid,
    record: &str,
    recombine: bool,
    mass: f64,
    sigma0: f64,
    lift: f64,
    time: f64,
    n_slices: usize,
    target_overlap: f64,
) -> PyResult<PyBranchEnsemble> {
    let up = if recombine {
        let residual = br::residual_for_overlap(sigma0, target_overlap).or_raise()?;
        br::recombining_schedule(mass, lift, residual, time, n_slices).or_raise()?
    } else {
        br::lift_schedule(mass, lift, time, n_slices).or_raise()?
    };
    let down = br::static_schedule(mass, &up).or_raise()?;
    let packet = wp::GaussianPacket::new(mass, 0.0, sigma0, 0.0).or_raise()?;
    let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ens = br::evolve_conditional_schedule(
        (w, w),
        &packet,
        &up,
        &down,
        &grid.0,
        record_from_name(record)?,
        &UnitSystem::natural(),
    )
    .or_raise()?;
    Ok(PyBranchEnsemble(ens))
}

/// `(mass, visibility, predicted)` rows for a record-free push of fixed geometry.
#[pyfunction]
#[pyo3(signature = (masses, grid, sigma0 = 0.5, distance = 0.05, time = 1.0, n_slices = 32))]
pub fn mass_sweep(
    masses: Vec<f64>,
    grid: PyGrid,
    sigma0: f64,
    distance: f64,
    time: f64,
    n_slices: usize,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let g = PushGeometry { sigma0, distance, duration: time, n_slices };
    let rows = br::mass_sweep(&masses, &g, &grid.0, &UnitSystem::natural()).or_raise()?;
    Ok(rows.into_iter().map(|r| (r.mass, r.visibility, r.predicted)).collect())
}

fn window(t_start: f64, duration: f64) -> PyResult<ExperimentWindow> {
    ExperimentWindow::new(t_start, t_start + duration).or_raise()
}

/// One trial: `(stopped, stop_time, collapse_time_internal)` in clock seconds.
#[pyfunction]
#[pyo3(signature = (engine, half_life, duration, seed, t_start = 39600.0))]
pub fn run_trial(
    engine: &str,
    half_life: f64,
    duration: f64,
    seed: u64,
    t_start: f64,
) -> PyResult<(bool, Option<f64>, Option<f64>)> {
    let model = DecayModel::new(half_life).or_raise()?;
    let o = cb::run_trial(engine_from_name(engine)?, &model, &window(t_start, duration)?, seed);
    Ok((o.stopped, o.stop_time, o.collapse_time_internal))
}

/// `p_stopped` of the analytic decay law.
#[pyfunction]
pub fn analytic_p_stopped(half_life: f64, duration: f64) -> PyResult<f64> {
    let model = DecayModel::new(half_life).or_raise()?;
    Ok(cb::analytic_stop_distribution(&model, &window(0.0, duration)?).p_stopped)
}

/// Runs the three collapse engines and returns the equivalence report as JSON.
#[pyfunction]
#[pyo3(signature = (n_trials, half_life, duration, seed, alpha = 0.01, t_start = 39600.0))]
pub fn compare_engines(
    n_trials: usize,
    half_life: f64,
    duration: f64,
    seed: u64,
    alpha: f64,
    t_start: f64,
) -> PyResult<String> {
    let model = DecayModel::new(half_life).or_raise()?;
    Ok(cb::compare_engines(n_trials, &model, &window(t_start, duration)?, seed, alpha).or_raise()?.to_json())
}

#[pymodule]
pub fn branchpath_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BranchpathError", m.py().get_type::<BranchpathError>())?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyWaveFunction>()?;
    m.add_class::<PyLagrangian>()?;
    m.add_class::<PyGaussianPacket>()?;
    m.add_class::<PyBranchEnsemble>()?;
    m.add_function(wrap_pyfunction!(analytic_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_element, m)?)?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(action, m)?)?;
    m.add_function(wrap_pyfunction!(tube_amplitude_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_conditional, m)?)?;
    m.add_function(wrap_pyfunction!(lift_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(mass_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_trial, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_p_stopped, m)?)?;
    m.add_function(wrap_pyfunction!(compare_engines, m)?)?;
    Ok(())
}
