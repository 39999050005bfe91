//! Python bindings for the core library.

use lab::frame::{self, FrameFunction};
use lab::measurement::{self as meas};
use lab::operator::{self as op, BlochCoefficients};
use lab::report;
use lab::simulability::{self as sim, VerdictStatus};
use num_complex::Complex64 as C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: lab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

type Matrix = Vec<Vec<C64>>;

fn rows(h: &lab::HermitianOperator) -> Matrix {
    let d = h.dim();
    (0..d).map(|i| (0..d).map(|j| h.entry(i, j)).collect()).collect()
}

/// Hermitian operator with `0 ≤ e ≤ 1`.
#[pyclass(name = "Effect", module = "gleason_lab", from_py_object)]
#[derive(Clone)]
pub struct PyEffect {
    inner: lab::Effect,
}

#[pymethods]
impl PyEffect {
    /// Qubit effect `a·1 + b σx + c σy + d σz`.
    #[new]
    fn new(a: f64, b: f64, c: f64, d: f64) -> PyResult<Self> {
        let inner = op::bloch_to_effect(BlochCoefficients::new(a, b, c, d)).map_err(err)?;
        Ok(Self { inner })
    }

    /// Effect from a square matrix of (complex) entries.
    #[staticmethod]
    fn from_matrix(rows: Vec<Vec<C64>>) -> PyResult<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(PyValueError::new_err("matrix must be square"));
        }
        let entries: Vec<(f64, f64)> = rows.iter().flatten().map(|z| (z.re, z.im)).collect();
        let h = lab::HermitianOperator::from_entries(d, &entries).map_err(err)?;
        Ok(Self { inner: lab::Effect::new(h).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Vec<Vec<C64>> {
        rows(self.inner.op())
    }

    /// `(a, b, c, d)` of a qubit effect.
    fn bloch(&self) -> PyResult<(f64, f64, f64, f64)> {
        let b = self.inner.bloch().map_err(err)?;
        Ok((b.a, b.b, b.c, b.d))
    }

    fn eigenvalues(&self) -> PyResult<Vec<f64>> {
        self.inner.op().eigenvalues().map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Effect({:?})", self.inner.op())
    }
}

/// Ordered sequence of effects summing to the identity.
#[pyclass(name = "Measurement", module = "gleason_lab", from_py_object)]
#[derive(Clone)]
pub struct PyMeasurement {
    inner: lab::Measurement,
}

#[pymethods]
impl PyMeasurement {
    #[new]
    fn new(effects: Vec<PyEffect>) -> PyResult<Self> {
        let effects = effects.into_iter().map(|e| e.inner).collect();
        Ok(Self { inner: meas::make_measurement(effects, lab::tolerance::VALIDATION_TOL).map_err(err)? })
    }

    /// Named measurement: M_x, M_z, M_xz, M_r, M_s, E, Tprime, D_m.
    #[staticmethod]
    #[pyo3(signature = (name, p = 0.5))]
    fn catalog(name: &str, p: f64) -> PyResult<Self> {
        Ok(Self { inner: meas::catalog_entry(name, p).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("measurements serialize")
    }

    #[getter]
    fn n_outcomes(&self) -> usize {
        self.inner.n_outcomes()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn effects(&self) -> Vec<PyEffect> {
        self.inner.effects().iter().map(|e| PyEffect { inner: e.clone() }).collect()
    }

    fn is_projective(&self) -> bool {
        self.inner.is_projective(lab::tolerance::VALIDATION_TOL)
    }

    fn __len__(&self) -> usize {
        self.inner.n_outcomes()
    }

    fn __repr__(&self) -> String {
        format!("Measurement({})", self.inner)
    }
}

/// `D_e = ⟦e, 1 - e⟧`.
#[pyfunction]
fn d_e(e: &PyEffect) -> PyMeasurement {
    PyMeasurement { inner: meas::d_e(&e.inner) }
}

/// `T_e = ⟦e/2, e/2, 1 - e⟧`.
#[pyfunction]
fn t_e(e: &PyEffect) -> PyMeasurement {
    PyMeasurement { inner: meas::t_e(&e.inner) }
}

#[pyfunction]
fn t_ee(e: &PyEffect, f: &PyEffect) -> PyResult<PyMeasurement> {
    Ok(PyMeasurement { inner: meas::t_ee(&e.inner, &f.inner).map_err(err)? })
}

/// Outcome-wise mixture of `(weight, measurement)` pairs.
#[pyfunction]
fn mix(parts: Vec<(f64, PyMeasurement)>) -> PyResult<PyMeasurement> {
    let refs: Vec<(f64, &lab::Measurement)> = parts.iter().map(|(w, m)| (*w, &m.inner)).collect();
    Ok(PyMeasurement { inner: meas::mix(&refs).map_err(err)? })
}

#[pyfunction]
fn depolarize(m: &PyMeasurement, visibility: f64) -> PyResult<PyMeasurement> {
    Ok(PyMeasurement { inner: meas::depolarize(&m.inner, visibility).map_err(err)? })
}

/// `(probabilities, projector matrices)` with `e = Σ p_k Q_k`.
#[pyfunction]
fn staircase(e: &PyEffect) -> PyResult<(Vec<f64>, Vec<Matrix>)> {
    let st = sim::staircase(&e.inner).map_err(err)?;
    Ok((st.probabilities, st.projectors.iter().map(|q| rows(q.op())).collect()))
}

/// Projective mixture for `D_e` as `(weight, measurement)` pairs.
#[pyfunction]
fn simulate_two_outcome(e: &PyEffect) -> PyResult<Vec<(f64, PyMeasurement)>> {
    let dec = sim::simulate_two_outcome(&e.inner).map_err(err)?;
    Ok(dec.parts.into_iter().map(|p| (p.weight, PyMeasurement { inner: p.measurement })).collect())
}

/// Verdict of the simulability test.
#[pyclass(name = "Verdict", module = "gleason_lab", get_all, skip_from_py_object)]
pub struct PyVerdict {
    /// "Simulable", "NotSimulable" or "Inconclusive".
    status: String,
    distance: f64,
    gap: f64,
    iterations: usize,
    margin: Option<f64>,
    witness: Option<Vec<(f64, PyMeasurement)>>,
}

#[pymethods]
impl PyVerdict {
    fn __repr__(&self) -> String {
        format!("Verdict(status={}, distance={:e}, margin={:?})", self.status, self.distance, self.margin)
    }
}

#[pyfunction]
#[pyo3(signature = (m, tol = None, max_iter = lab::tolerance::MEMBERSHIP_MAX_ITER))]
fn membership(py: Python<'_>, m: &PyMeasurement, tol: Option<f64>, max_iter: usize) -> PyResult<PyVerdict> {
    let tol = tol.unwrap_or_else(lab::tolerance::membership_tol_from_env);
    let target = m.inner.clone();
    let v = py.detach(move || sim::membership(&target, tol, max_iter)).map_err(err)?;
    let status = match v.status {
        VerdictStatus::Simulable => "Simulable",
        VerdictStatus::NotSimulable => "NotSimulable",
        VerdictStatus::Inconclusive => "Inconclusive",
    };
    Ok(PyVerdict {
        status: status.into(),
        distance: v.distance,
        gap: v.gap,
        iterations: v.iterations,
        margin: v.certificate.map(|c| c.margin),
        witness: v
            .witness
            .map(|w| w.parts.into_iter().map(|p| (p.weight, PyMeasurement { inner: p.measurement })).collect()),
    })
}

/// Value of the counterexample frame function on a qubit effect.
#[pyfunction]
fn counterexample_g(e: &PyEffect) -> PyResult<f64> {
    frame::CounterexampleG.value(&e.inner).map_err(err)
}

/// Born probability `Tr(ρ e)` for the qubit state with Bloch vector `s`.
#[pyfunction]
fn born(s: [f64; 3], e: &PyEffect) -> PyResult<f64> {
    let rho = lab::DensityOperator::qubit(s).map_err(err)?;
    op::born_probability(&rho, &e.inner).map_err(err)
}

/// `(quantity, value, expected, ok)` rows of the published-table check.
#[pyfunction]
fn reproduce() -> PyResult<Vec<(String, f64, f64, bool)>> {
    let cells = report::reproduce_cells(None).map_err(err)?;
    Ok(cells.into_iter().map(|c| (c.quantity, c.value, c.expected, c.ok)).collect())
}

/// Frame-function report for a sampled measurement set, as JSON text.
#[pyfunction]
fn rigidity_json(py: Python<'_>, set: &str, seed: u64, counts: Vec<usize>) -> PyResult<String> {
    let tag: lab::MeasurementSetTag = set.parse().map_err(err)?;
    let r = py.detach(move || report::frame_report(tag, seed, &counts)).map_err(err)?;
    Ok(serde_json::to_string(&r).expect("reports serialize"))
}

#[pymodule]
#[pyo3(name = "gleason_lab")]
fn gleason_lab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEffect>()?;
    m.add_class::<PyMeasurement>()?;
    m.add_class::<PyVerdict>()?;
    m.add_function(wrap_pyfunction!(d_e, m)?)?;
    m.add_function(wrap_pyfunction!(t_e, m)?)?;
    m.add_function(wrap_pyfunction!(t_ee, m)?)?;
    m.add_function(wrap_pyfunction!(mix, m)?)?;
    m.add_function(wrap_pyfunction!(depolarize, m)?)?;
    m.add_function(wrap_pyfunction!(staircase, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_two_outcome, m)?)?;
    m.add_function(wrap_pyfunction!(membership, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample_g, m)?)?;
    m.add_function(wrap_pyfunction!(born, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    m.add_function(wrap_pyfunction!(rigidity_json, m)?)?;
    Ok(())
}
