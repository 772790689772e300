//! Python bindings for `gavqa`.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gavqa::config::{Experiment, Overrides, RunConfig};
use gavqa::cost::{self, Target};
use gavqa::genome::CircuitGenome;
use gavqa::pipelines::{self, RunOptions};
use gavqa::rng::stream;
use gavqa::sim::{self, DenseOperator, GateKind, C64};
use nalgebra::DMatrix;

fn to_py(e: gavqa::Error) -> PyErr {
    match e {
        gavqa::Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn gate_kind(name: &str) -> PyResult<GateKind> {
    let kind = match name.to_ascii_uppercase().as_str() {
        "H" => GateKind::H,
        "S" => GateKind::S,
        "SDG" => GateKind::Sdg,
        "X" => GateKind::X,
        "CX" => GateKind::Cx,
        "RX" => GateKind::Rx,
        "RY" => GateKind::Ry,
        "RZ" => GateKind::Rz,
        "RXX" => GateKind::Rxx,
        "RYY" => GateKind::Ryy,
        "RZZ" => GateKind::Rzz,
        _ => return Err(PyValueError::new_err(format!("unknown gate {name:?}"))),
    };
    Ok(kind)
}

fn matrix(rows: Vec<Vec<C64>>) -> PyResult<DenseOperator> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(DenseOperator::new(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
}

fn rows(op: &DenseOperator) -> Vec<Vec<C64>> {
    let m = op.matrix();
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

/// Little-endian statevector: qubit `q` is bit `q` of the basis index.
#[pyclass(name = "Statevector", module = "gavqa", from_py_object)]
#[derive(Clone)]
struct PyStatevector(sim::Statevector);

#[pymethods]
impl PyStatevector {
    #[new]
    fn new(amplitudes: Vec<C64>) -> PyResult<Self> {
        sim::Statevector::from_amplitudes(amplitudes).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn zero(num_qubits: usize) -> Self {
        Self(sim::Statevector::zero(num_qubits))
    }

    #[staticmethod]
    fn basis(num_qubits: usize, index: usize) -> PyResult<Self> {
        sim::Statevector::basis(num_qubits, index).map(Self).map_err(to_py)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn amplitudes(&self) -> Vec<C64> {
        self.0.amplitudes().to_vec()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// Applies a gate in place, e.g. `apply("rx", [0], 0.3)`.
    #[pyo3(signature = (gate, qubits, theta=None))]
    fn apply(&mut self, gate: &str, qubits: Vec<usize>, theta: Option<f64>) -> PyResult<()> {
        self.0.apply_gate(gate_kind(gate)?, &qubits, theta).map_err(to_py)
    }

    /// `⟨self|other⟩`.
    fn inner(&self, other: &PyStatevector) -> PyResult<C64> {
        self.0.inner(&other.0).map_err(to_py)
    }

    fn magnetization(&self, qubit: usize) -> PyResult<f64> {
        cost::magnetization(&self.0, qubit).map_err(to_py)
    }

    fn __len__(&self) -> usize {
        self.0.dim()
    }

    fn __repr__(&self) -> String {
        format!("Statevector(num_qubits={})", self.0.num_qubits())
    }
}

/// Gate-sequence genome with shared parameter slots.
#[pyclass(name = "CircuitGenome", module = "gavqa", from_py_object)]
#[derive(Clone)]
struct PyGenome(CircuitGenome);

#[pymethods]
impl PyGenome {
    #[staticmethod]
    fn random(num_qubits: usize, depth: usize, seed: u64) -> PyResult<Self> {
        CircuitGenome::random(num_qubits, depth, &mut stream(seed, &[])).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        text.parse().map(Self).map_err(to_py)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    #[getter]
    fn param_count(&self) -> usize {
        self.0.param_count()
    }

    fn metrics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let m = self.0.metrics();
        let d = PyDict::new(py);
        d.set_item("depth", m.depth)?;
        d.set_item("one_qubit_gates", m.one_qubit_gates)?;
        d.set_item("two_qubit_gates", m.two_qubit_gates)?;
        d.set_item("param_count", m.param_count)?;
        Ok(d)
    }

    /// Runs the circuit (or its adjoint) on a copy of `state`.
    #[pyo3(signature = (theta, state, adjoint=false))]
    fn run(&self, theta: Vec<f64>, state: &PyStatevector, adjoint: bool) -> PyResult<PyStatevector> {
        self.0.bind_and_run(&theta, &state.0, adjoint).map(PyStatevector).map_err(to_py)
    }

    /// Kernel against a unitary (square nested list) or a target state.
    fn kernel(&self, target: &Bound<'_, PyAny>, theta: Vec<f64>) -> PyResult<f64> {
        let target = if let Ok(s) = target.extract::<PyStatevector>() {
            Target::State(s.0)
        } else {
            Target::Unitary(matrix(target.extract()?)?)
        };
        let reference = sim::Statevector::zero(self.0.num_qubits());
        cost::kernel(&target, &self.0, &theta, &reference).map_err(to_py)
    }

    fn __eq__(&self, other: &PyGenome) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_text()
    }

    fn __repr__(&self) -> String {
        let m = self.0.metrics();
        format!("CircuitGenome(num_qubits={}, depth={}, params={})", self.0.num_qubits(), m.depth, m.param_count)
    }
}

/// Outcome of one experiment run.
#[pyclass(name = "RunResult", module = "gavqa")]
struct PyRunResult(pipelines::RunResult);

#[pymethods]
impl PyRunResult {
    #[getter]
    fn passed(&self) -> bool {
        self.0.passed
    }

    #[getter]
    fn best_circuit(&self) -> PyGenome {
        PyGenome(self.0.best_circuit.clone())
    }

    #[getter]
    fn column_names(&self) -> Vec<String> {
        self.0.columns.iter().map(|c| c.0.clone()).collect()
    }

    fn column(&self, name: &str) -> PyResult<Vec<f64>> {
        self.0.column(name).map(<[f64]>::to_vec).ok_or_else(|| PyValueError::new_err(format!("no column {name:?}")))
    }

    /// Per-generation `(best_fitness, mean_fitness)`.
    fn history(&self) -> Vec<(f64, f64)> {
        self.0.history.iter().map(|h| (h.best_fitness, h.mean_fitness)).collect()
    }

    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let text = serde_json::to_string(&self.0.summary).map_err(|e| PyValueError::new_err(e.to_string()))?;
        py.import("json")?.call_method1("loads", (text,))
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    /// Writes results.csv, manifest.json and best_circuit.txt into `dir`.
    fn write(&self, dir: std::path::PathBuf) -> PyResult<()> {
        self.0.write(&dir).map_err(to_py)
    }
}

/// Runs `experiment` with keyword overrides named like the CLI flags
/// (underscores for dashes), e.g. `run("benchmark", qubits=2, seed=1)`.
#[pyfunction]
#[pyo3(signature = (experiment, **overrides))]
fn run(py: Python<'_>, experiment: &str, overrides: Option<&Bound<'_, PyDict>>) -> PyResult<PyRunResult> {
    let experiment: Experiment = serde_json::from_value(serde_json::Value::String(experiment.into()))
        .map_err(|_| PyValueError::new_err(format!("unknown experiment {experiment:?}")))?;
    let overrides: Overrides = match overrides {
        Some(d) => {
            let text: String = py.import("json")?.call_method1("dumps", (d,))?.extract()?;
            serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))?
        }
        None => Overrides::default(),
    };
    let cfg = RunConfig::resolve(experiment, &overrides).map_err(to_py)?;
    let result = py.detach(|| pipelines::run(&cfg, &RunOptions::default())).map_err(to_py)?;
    Ok(PyRunResult(result))
}

/// Haar-random unitary as a nested list.
#[pyfunction]
fn haar_random_unitary(dim: usize, seed: u64) -> PyResult<Vec<Vec<C64>>> {
    sim::haar_random_unitary(dim, &mut stream(seed, &[])).map(|u| rows(&u)).map_err(to_py)
}

/// Built-in consistency checks as `(name, passed, detail)` tuples.
#[pyfunction]
#[pyo3(signature = (seed=0))]
fn verify(py: Python<'_>, seed: u64) -> PyResult<Vec<(String, bool, String)>> {
    py.detach(|| gavqa::verify::run_all(seed))
        .into_iter()
        .map(|r| match r {
            Ok(c) => Ok((c.name.to_string(), c.passed, c.detail)),
            Err((name, e)) => Err(PyValueError::new_err(format!("{name}: {e}"))),
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "gavqa")]
fn gavqa_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStatevector>()?;
    m.add_class::<PyGenome>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(haar_random_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
