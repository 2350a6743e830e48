//! Python bindings: environment construction, wrappers, stepping, rendering,
//! logged sessions, replay verification and the reward-curve metrics.
//!
//! Images cross the boundary as raw `bytes` in row-major height x width x
//! channel order together with their shape, so callers can wrap them with
//! `numpy.frombuffer(obs["image"], dtype=numpy.uint8).reshape(obs["shape"])`.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::sync::{Mutex, MutexGuard};

use miniverse_core::metrics::{
    area_under_curve as auc, plot_trajectory, read_log, transfer_improvement as transfer, verify_log, LogError,
    MetricsError, Recorder as CoreRecorder, RewardCurve,
};
use miniverse_core::registry::{self, study_variant as core_study_variant, ENV_IDS};
use miniverse_core::rng::{label, stream};
use miniverse_core::wrappers::{FullyObservable, ImageOnly, OneHotMission, ResizeObservation, StochasticActions};
use miniverse_core::{Env as CoreEnv, EnvError, Info, MissionField, Observation, Pose, RenderMode, StepOutcome};
use miniverse_server::keys::{assign_keys as core_assign_keys, KeyError};
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict, PyList};

fn env_err(e: EnvError) -> PyErr {
    match e {
        EnvError::EpisodeEnded | EnvError::NotReset => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn log_err(e: LogError) -> PyErr {
    match e {
        LogError::Env(inner) => env_err(inner),
        LogError::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn metrics_err(e: MetricsError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn key_err(e: KeyError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_mode(mode: &str) -> PyResult<RenderMode> {
    match mode {
        "agent_view" => Ok(RenderMode::AgentView),
        "top_down" => Ok(RenderMode::TopDown),
        other => Err(PyValueError::new_err(format!("unknown render mode {other:?}; use \"agent_view\" or \"top_down\""))),
    }
}

fn obs_dict<'py>(py: Python<'py>, obs: &Observation) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let [h, w, c] = obs.image.shape();
    d.set_item("image", PyBytes::new(py, obs.image.as_bytes()))?;
    d.set_item("shape", (h, w, c))?;
    d.set_item("direction", obs.direction)?;
    match &obs.mission {
        Some(MissionField::Text(t)) => d.set_item("mission", t)?,
        Some(MissionField::OneHot(v)) => d.set_item("mission", PyList::new(py, v)?)?,
        None => d.set_item("mission", py.None())?,
    }
    Ok(d)
}

fn info_dict<'py>(py: Python<'py>, info: &Info) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("seed", info.seed)?;
    d.set_item("step_count", info.step_count)?;
    d.set_item("success", info.success)?;
    d.set_item("executed_action", info.executed_action)?;
    Ok(d)
}

fn pose_dict<'py>(py: Python<'py>, pose: Option<Pose>) -> PyResult<Option<Bound<'py, PyDict>>> {
    let Some(pose) = pose else { return Ok(None) };
    let d = PyDict::new(py);
    match pose {
        Pose::Grid { x, y, dir } => {
            d.set_item("x", x)?;
            d.set_item("y", y)?;
            d.set_item("dir", dir)?;
        }
        Pose::World { x, z, yaw } => {
            d.set_item("x", x)?;
            d.set_item("z", z)?;
            d.set_item("yaw", yaw)?;
        }
    }
    Ok(Some(d))
}

type StepTuple<'py> = (Bound<'py, PyDict>, f64, bool, bool, Bound<'py, PyDict>);

fn step_tuple<'py>(py: Python<'py>, o: &StepOutcome) -> PyResult<StepTuple<'py>> {
    Ok((obs_dict(py, &o.observation)?, o.reward, o.terminated, o.truncated, info_dict(py, &o.info)?))
}

fn image_dict<'py>(py: Python<'py>, env: &dyn CoreEnv, mode: &str) -> PyResult<Bound<'py, PyDict>> {
    let img = env.render_frame(parse_mode(mode)?).map_err(env_err)?;
    let [h, w, c] = img.shape();
    let d = PyDict::new(py);
    d.set_item("image", PyBytes::new(py, img.as_bytes()))?;
    d.set_item("shape", (h, w, c))?;
    Ok(d)
}

/// Applies wrappers innermost first: full observability, resize, stochastic
/// actions, one-hot mission, image only.
fn build(
    env_id: &str,
    fully_observable: bool,
    resize: Option<(usize, usize)>,
    epsilon: Option<f64>,
    one_hot_mission: bool,
    image_only: bool,
) -> Result<Box<dyn CoreEnv>, EnvError> {
    let mut env = registry::make(env_id)?;
    if fully_observable {
        env = Box::new(FullyObservable::new(env)?);
    }
    if let Some((w, h)) = resize {
        env = Box::new(ResizeObservation::new(env, w, h)?);
    }
    if let Some(eps) = epsilon {
        env = Box::new(StochasticActions::new(env, eps)?);
    }
    if one_hot_mission {
        env = Box::new(OneHotMission::new(env)?);
    }
    if image_only {
        env = Box::new(ImageOnly::new(env));
    }
    Ok(env)
}

/// An environment with the reset/step contract. `step` returns
/// `(observation, reward, terminated, truncated, info)`.
#[pyclass(name = "Env", module = "miniverse")]
pub struct PyEnv {
    inner: Mutex<Box<dyn CoreEnv>>,
}

impl PyEnv {
    fn env(&self) -> MutexGuard<'_, Box<dyn CoreEnv>> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }
}

#[pymethods]
impl PyEnv {
    #[pyo3(signature = (seed=None))]
    fn reset<'py>(&self, py: Python<'py>, seed: Option<u64>) -> PyResult<(Bound<'py, PyDict>, Bound<'py, PyDict>)> {
        let (obs, info) = self.env().reset(seed);
        Ok((obs_dict(py, &obs)?, info_dict(py, &info)?))
    }

    fn step<'py>(&self, py: Python<'py>, action: usize) -> PyResult<StepTuple<'py>> {
        let out = self.env().step(action).map_err(env_err)?;
        step_tuple(py, &out)
    }

    /// Renders `"agent_view"` or `"top_down"` as an RGB image dict.
    #[pyo3(signature = (mode="agent_view"))]
    fn render<'py>(&self, py: Python<'py>, mode: &str) -> PyResult<Bound<'py, PyDict>> {
        image_dict(py, self.env().as_ref(), mode)
    }

    #[getter]
    fn env_id(&self) -> String {
        self.env().env_id().to_string()
    }

    #[getter]
    fn action_names(&self) -> Vec<String> {
        self.env().action_space().names().to_vec()
    }

    #[getter]
    fn n_actions(&self) -> usize {
        self.env().action_space().n()
    }

    #[getter]
    fn observation_shape(&self) -> (usize, usize, usize) {
        let [h, w, c] = self.env().observation_spec().image_shape;
        (h, w, c)
    }

    #[getter]
    fn max_steps(&self) -> u32 {
        self.env().max_steps()
    }

    #[getter]
    fn mission(&self) -> Option<String> {
        self.env().mission().map(str::to_string)
    }

    #[getter]
    fn pose<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyDict>>> {
        let pose = self.env().pose();
        pose_dict(py, pose)
    }

    fn __repr__(&self) -> String {
        format!("Env({:?})", self.env().env_id())
    }
}

/// Builds an environment by id with optional wrappers.
#[pyfunction]
#[pyo3(signature = (env_id, *, image_only=false, one_hot_mission=false, fully_observable=false, resize=None, epsilon=None))]
fn make(
    env_id: &str,
    image_only: bool,
    one_hot_mission: bool,
    fully_observable: bool,
    resize: Option<(usize, usize)>,
    epsilon: Option<f64>,
) -> PyResult<PyEnv> {
    let env = build(env_id, fully_observable, resize, epsilon, one_hot_mission, image_only).map_err(env_err)?;
    Ok(PyEnv { inner: Mutex::new(env) })
}

/// An environment whose resets and steps are written to an episode log.
/// `step(None)` records a no-op.
#[pyclass(name = "Recorder", module = "miniverse")]
pub struct PyRecorder {
    inner: Mutex<CoreRecorder<BufWriter<File>>>,
}

impl PyRecorder {
    fn rec(&self) -> MutexGuard<'_, CoreRecorder<BufWriter<File>>> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }
}

#[pymethods]
impl PyRecorder {
    #[new]
    #[pyo3(signature = (env_id, path, seed=0))]
    fn new(env_id: &str, path: &str, seed: u64) -> PyResult<Self> {
        let env = registry::make(env_id).map_err(env_err)?;
        let file = File::create(path).map_err(|e| PyOSError::new_err(format!("{path}: {e}")))?;
        let rec = CoreRecorder::new(env, BufWriter::new(file), seed, None).map_err(log_err)?;
        Ok(Self { inner: Mutex::new(rec) })
    }

    fn reset<'py>(&self, py: Python<'py>, seed: u64) -> PyResult<(Bound<'py, PyDict>, Bound<'py, PyDict>)> {
        let (obs, info) = self.rec().reset(seed).map_err(log_err)?;
        Ok((obs_dict(py, &obs)?, info_dict(py, &info)?))
    }

    #[pyo3(signature = (action))]
    fn step<'py>(&self, py: Python<'py>, action: Option<usize>) -> PyResult<Option<StepTuple<'py>>> {
        let out = self.rec().step(action, None).map_err(log_err)?;
        out.map(|o| step_tuple(py, &o)).transpose()
    }

    /// Episode number, 1-based; 0 before the first reset.
    #[getter]
    fn episode(&self) -> u32 {
        self.rec().episode()
    }

    /// Log contents so far as JSON lines.
    fn to_jsonl(&self) -> String {
        self.rec().log().to_jsonl()
    }

    /// Flushes and closes the log. Further steps fail.
    fn close(&self) -> PyResult<()> {
        self.rec().close().map_err(log_err)?;
        Ok(())
    }
}

fn load_log(path: &str) -> PyResult<miniverse_core::metrics::EpisodeLog> {
    let file = File::open(path).map_err(|e| PyOSError::new_err(format!("{path}: {e}")))?;
    read_log(BufReader::new(file)).map_err(|e| PyValueError::new_err(format!("{path}: {e}")))
}

/// Re-simulates every episode in the log; `True` when all recorded rewards,
/// end flags and poses are reproduced.
#[pyfunction]
fn replay_verify(path: &str) -> PyResult<bool> {
    let log = load_log(path)?;
    let verdict = verify_log(&log).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(verdict.is_ok())
}

/// SVG trajectory plot, one panel per episode.
#[pyfunction]
fn plot_log(path: &str) -> PyResult<String> {
    let log = load_log(path)?;
    plot_trajectory(&log).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
fn env_ids() -> Vec<&'static str> {
    ENV_IDS.to_vec()
}

#[pyfunction]
fn study_variant(env_id: &str) -> PyResult<&'static str> {
    core_study_variant(env_id).map_err(env_err)
}

/// One dict per registered environment.
#[pyfunction]
fn catalog(py: Python<'_>) -> PyResult<Bound<'_, PyList>> {
    let out = PyList::empty(py);
    for s in registry::catalog() {
        let d = PyDict::new(py);
        d.set_item("env_id", &s.env_id)?;
        d.set_item("family", &s.family)?;
        d.set_item("n_actions", s.n_actions)?;
        d.set_item("action_names", &s.action_names)?;
        d.set_item("obs_shape", (s.obs_shape[0], s.obs_shape[1], s.obs_shape[2]))?;
        d.set_item("max_steps", s.max_steps)?;
        out.append(d)?;
    }
    Ok(out)
}

/// Draws a random digit-key binding for `n_actions` actions: `{digit: action}`.
#[pyfunction]
fn assign_keys(seed: u64, n_actions: usize) -> PyResult<Vec<(u8, usize)>> {
    let mut rng = stream(seed, label::KEYS);
    let mapping = core_assign_keys(&mut rng, n_actions).map_err(key_err)?;
    Ok(mapping.entries().iter().map(|(&d, &a)| (d, a)).collect())
}

/// Trapezoidal area under `(environment_steps, mean_reward)` points.
#[pyfunction]
fn area_under_curve(points: Vec<(u64, f64)>) -> PyResult<f64> {
    let curve = RewardCurve::new(points).map_err(metrics_err)?;
    auc(&curve).map_err(metrics_err)
}

/// Relative AUC improvement as a fraction: 0.04 means 4%.
#[pyfunction]
fn transfer_improvement(auc_transfer: f64, auc_baseline: f64) -> PyResult<f64> {
    transfer(auc_transfer, auc_baseline).map_err(metrics_err)
}

#[pymodule]
pub fn miniverse(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEnv>()?;
    m.add_class::<PyRecorder>()?;
    m.add_function(wrap_pyfunction!(make, m)?)?;
    m.add_function(wrap_pyfunction!(env_ids, m)?)?;
    m.add_function(wrap_pyfunction!(study_variant, m)?)?;
    m.add_function(wrap_pyfunction!(catalog, m)?)?;
    m.add_function(wrap_pyfunction!(assign_keys, m)?)?;
    m.add_function(wrap_pyfunction!(replay_verify, m)?)?;
    m.add_function(wrap_pyfunction!(plot_log, m)?)?;
    m.add_function(wrap_pyfunction!(area_under_curve, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_improvement, m)?)?;
    Ok(())
}
