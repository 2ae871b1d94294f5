//! Python bindings: `import gdiscord_py`.

// pyo3 0.22 method macros trip this lint on every `PyResult` return.
#![allow(clippy::useless_conversion)]

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gdiscord::homodyne::{self, JointSignal};
use gdiscord::metrics::{self, EminBranch};
use gdiscord::oracle::OracleGrid;
use gdiscord::Units;

create_exception!(gdiscord_py, UnphysicalError, PyValueError, "State violates the uncertainty bound.");

fn to_py(e: gdiscord::Error) -> PyErr {
    if e.is_unphysical() {
        UnphysicalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn parse_units(units: &str) -> PyResult<Units> {
    units.parse().map_err(PyValueError::new_err)
}

fn branch_name(b: EminBranch) -> &'static str {
    match b {
        EminBranch::First => "first",
        EminBranch::Second => "second",
    }
}

/// Two-mode state in standard form. Values are stored in half units.
#[pyclass(frozen, name = "StandardForm")]
#[derive(Clone, Copy)]
struct PyStandardForm(gdiscord::StandardForm);

#[pymethods]
impl PyStandardForm {
    #[new]
    #[pyo3(signature = (n, m, c1, c2, units = "half"))]
    fn new(n: f64, m: f64, c1: f64, c2: f64, units: &str) -> PyResult<Self> {
        gdiscord::StandardForm::with_units(n, m, c1, c2, parse_units(units)?)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn vacuum() -> Self {
        Self(gdiscord::StandardForm::vacuum())
    }

    #[staticmethod]
    fn tmsv(r: f64) -> Self {
        Self(gdiscord::StandardForm::tmsv(r))
    }

    #[getter]
    fn n(&self) -> f64 {
        self.0.n
    }
    #[getter]
    fn m(&self) -> f64 {
        self.0.m
    }
    #[getter]
    fn c1(&self) -> f64 {
        self.0.c1
    }
    #[getter]
    fn c2(&self) -> f64 {
        self.0.c2
    }

    #[pyo3(signature = (units = "half"))]
    fn values(&self, units: &str) -> PyResult<[f64; 4]> {
        Ok(self.0.values_in(parse_units(units)?))
    }

    fn swapped(&self) -> Self {
        Self(self.0.swapped())
    }

    /// 4x4 covariance matrix (half units) as nested lists.
    fn covariance(&self) -> Vec<Vec<f64>> {
        let m = self.0.embed();
        let e = m.entries();
        (0..4).map(|i| (0..4).map(|j| e[(i, j)]).collect()).collect()
    }

    fn symplectic<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let sd = gdiscord::symplectic_data(&self.0).map_err(to_py)?;
        let d = PyDict::new_bound(py);
        d.set_item("i1", sd.i1)?;
        d.set_item("i2", sd.i2)?;
        d.set_item("i3", sd.i3)?;
        d.set_item("i4", sd.i4)?;
        d.set_item("delta", sd.delta)?;
        d.set_item("d_plus", sd.d_plus)?;
        d.set_item("d_minus", sd.d_minus)?;
        d.set_item("physical", sd.physical)?;
        Ok(d)
    }

    fn report(&self) -> PyResult<PyCorrelationReport> {
        gdiscord::CorrelationReport::compute(&self.0).map(PyCorrelationReport).map_err(to_py)
    }

    fn attenuate(&self, eta: f64) -> PyResult<Self> {
        gdiscord::attenuate_symmetric(&self.0, eta).map(Self).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        let s = self.0;
        format!("StandardForm(n={}, m={}, c1={}, c2={})", s.n, s.m, s.c1, s.c2)
    }
}

#[pyclass(frozen, name = "CorrelationReport")]
#[derive(Clone)]
struct PyCorrelationReport(gdiscord::CorrelationReport);

#[pymethods]
impl PyCorrelationReport {
    #[getter]
    fn mutual_information(&self) -> f64 {
        self.0.mutual_information
    }
    #[getter]
    fn classical_correlations(&self) -> f64 {
        self.0.classical_correlations
    }
    #[getter]
    fn discord_ab(&self) -> f64 {
        self.0.discord_ab
    }
    #[getter]
    fn discord_ba(&self) -> f64 {
        self.0.discord_ba
    }
    #[getter]
    fn e_min(&self) -> f64 {
        self.0.e_min
    }
    #[getter]
    fn e_min_branch(&self) -> &'static str {
        branch_name(self.0.e_min_branch)
    }
    /// Duan-type inseparability sum in SNL units; below 2 means entangled.
    #[getter]
    fn inseparability(&self) -> f64 {
        self.0.inseparability
    }
    #[getter]
    fn d_plus(&self) -> f64 {
        self.0.d_plus
    }
    #[getter]
    fn d_minus(&self) -> f64 {
        self.0.d_minus
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = &self.0;
        let d = PyDict::new_bound(py);
        d.set_item("mutual_information", r.mutual_information)?;
        d.set_item("classical_correlations", r.classical_correlations)?;
        d.set_item("discord_ab", r.discord_ab)?;
        d.set_item("discord_ba", r.discord_ba)?;
        d.set_item("e_min", r.e_min)?;
        d.set_item("e_min_branch", branch_name(r.e_min_branch))?;
        d.set_item("inseparability", r.inseparability)?;
        d.set_item("d_plus", r.d_plus)?;
        d.set_item("d_minus", r.d_minus)?;
        d.set_item("entangled_sufficient", r.flags.entangled_sufficient)?;
        d.set_item("classical", r.flags.classical)?;
        d.set_item("inseparable", r.flags.inseparable)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "CorrelationReport(discord_ab={}, mutual_information={}, classical_correlations={})",
            self.0.discord_ab, self.0.mutual_information, self.0.classical_correlations
        )
    }
}

/// Homodyne variances at one RF frequency.
#[pyclass(frozen, name = "VarianceRecord")]
#[derive(Clone, Copy)]
struct PyVarianceRecord(gdiscord::VarianceRecord);

#[pymethods]
impl PyVarianceRecord {
    #[new]
    #[pyo3(signature = (rf_hz, var_xa, var_ya, var_xb, var_yb, var_xminus, var_yplus, snl_ref = 1.0, n_samples = 0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        rf_hz: f64,
        var_xa: f64,
        var_ya: f64,
        var_xb: f64,
        var_yb: f64,
        var_xminus: f64,
        var_yplus: f64,
        snl_ref: f64,
        n_samples: u64,
    ) -> PyResult<Self> {
        let rec = gdiscord::VarianceRecord {
            rf_hz,
            var_xa,
            var_ya,
            var_xb,
            var_yb,
            var_xminus,
            var_yplus,
            snl_reference: snl_ref,
            n_samples,
        };
        rec.validate().map_err(to_py)?;
        Ok(Self(rec))
    }

    #[staticmethod]
    #[pyo3(signature = (state, rf_hz = 0.0, n_samples = 0))]
    fn ideal(state: &PyStandardForm, rf_hz: f64, n_samples: u64) -> Self {
        Self(gdiscord::VarianceRecord::ideal(&state.0, rf_hz, n_samples))
    }

    #[getter]
    fn rf_hz(&self) -> f64 {
        self.0.rf_hz
    }
    #[getter]
    fn var_xminus(&self) -> f64 {
        self.0.var_xminus
    }
    #[getter]
    fn var_yplus(&self) -> f64 {
        self.0.var_yplus
    }
    #[getter]
    fn n_samples(&self) -> u64 {
        self.0.n_samples
    }

    /// `[var_xa, var_ya, var_xb, var_yb, var_xminus, var_yplus]` as stored.
    fn variances(&self) -> [f64; 6] {
        let r = self.0;
        [r.var_xa, r.var_ya, r.var_xb, r.var_yb, r.var_xminus, r.var_yplus]
    }

    fn extract(&self) -> PyResult<PyStandardForm> {
        gdiscord::extract_standard_form(&self.0).map(PyStandardForm).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("VarianceRecord(rf_hz={}, n_samples={})", self.0.rf_hz, self.0.n_samples)
    }
}

#[pyfunction]
fn entropy_h(x: f64) -> PyResult<f64> {
    gdiscord::entropy_h(x).map_err(to_py)
}

/// Closed-form minimal conditional determinant and the branch used.
#[pyfunction]
fn e_min(state: &PyStandardForm) -> PyResult<(f64, &'static str)> {
    let sd = gdiscord::symplectic_data(&state.0).map_err(to_py)?;
    let (v, b) = metrics::e_min(&sd).map_err(to_py)?;
    Ok((v, branch_name(b)))
}

#[pyfunction]
#[pyo3(signature = (state, squeeze_max = 8.0, n_squeeze = 64, n_angle = 64))]
fn brute_force_e_min(state: &PyStandardForm, squeeze_max: f64, n_squeeze: usize, n_angle: usize) -> PyResult<f64> {
    let grid = OracleGrid { squeeze_max, n_squeeze, n_angle };
    gdiscord::brute_force_e_min(&state.0, &grid).map_err(to_py)
}

fn sweep_dicts<'py>(py: Python<'py>, rows: &[gdiscord::io::SweepRow]) -> PyResult<Vec<Bound<'py, PyDict>>> {
    rows.iter()
        .map(|r| {
            let d = PyDict::new_bound(py);
            d.set_item("eta_or_rf", r.eta_or_rf)?;
            d.set_item("discord_ab", r.discord_ab)?;
            d.set_item("discord_ba", r.discord_ba)?;
            d.set_item("mutual_info", r.mutual_info)?;
            d.set_item("classical_J", r.classical_j)?;
            d.set_item("inseparability", r.inseparability)?;
            d.set_item("squeezing_snl", r.squeezing_snl)?;
            d.set_item("physical", r.physical)?;
            Ok(d)
        })
        .collect()
}

/// Symmetric-loss sweep; one dict per transmission.
#[pyfunction]
fn attenuation_sweep<'py>(
    py: Python<'py>,
    state: &PyStandardForm,
    etas: Vec<f64>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let sweep = gdiscord::run_attenuation_sweep(&state.0, &etas).map_err(to_py)?;
    sweep_dicts(py, &gdiscord::io::attenuation_rows(&sweep))
}

/// Spectrum sweep over records; returns `(rows, skipped_indices)`.
#[pyfunction]
fn spectrum_sweep<'py>(
    py: Python<'py>,
    records: Vec<PyVarianceRecord>,
) -> PyResult<(Vec<Bound<'py, PyDict>>, Vec<usize>)> {
    let recs: Vec<_> = records.iter().map(|r| r.0).collect();
    let sweep = gdiscord::run_spectrum_sweep(&recs).map_err(to_py)?;
    let skipped = sweep.skipped.iter().map(|s| s.index).collect();
    Ok((sweep_dicts(py, &gdiscord::io::spectrum_rows(&sweep))?, skipped))
}

/// Minimum of a 2π phase scan of a joint variance.
#[pyfunction]
fn scan_minimum(phases: Vec<f64>, variances: Vec<f64>) -> PyResult<f64> {
    let trace = homodyne::ScanTrace::new(phases, variances, JointSignal::Difference).map_err(to_py)?;
    gdiscord::scan_minimum(&trace).map_err(to_py)
}

/// Monte Carlo dual-homodyne scan. Returns a dict with the record and both traces.
#[pyfunction]
#[pyo3(signature = (state, n_samples, phases = 64, seed = 0))]
fn simulate_dual_homodyne<'py>(
    py: Python<'py>,
    state: &PyStandardForm,
    n_samples: usize,
    phases: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = homodyne::uniform_phases(phases);
    let scan = py
        .allow_threads(|| gdiscord::simulate_dual_homodyne(&state.0, n_samples, &grid, seed))
        .map_err(to_py)?;
    let d = PyDict::new_bound(py);
    d.set_item("record", PyVarianceRecord(scan.record).into_py(py))?;
    d.set_item("phases", scan.sum.phase.clone())?;
    d.set_item("sum", scan.sum.variance.clone())?;
    d.set_item("difference", scan.difference.variance.clone())?;
    Ok(d)
}

/// Subchannel additivity: discord of `state` against the summed discord of
/// two subchannel pairs (e.g. "II-III", "I-IV") at the given mode overlap.
#[pyfunction]
fn classify_additivity<'py>(
    py: Python<'py>,
    state: &PyStandardForm,
    overlap: f64,
    pair_a: &str,
    pair_b: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let set = gdiscord::build_subchannels(&state.0, overlap).map_err(to_py)?;
    let a: gdiscord::SubchannelPair = pair_a.parse().map_err(to_py)?;
    let b: gdiscord::SubchannelPair = pair_b.parse().map_err(to_py)?;
    let v = gdiscord::classify_additivity(&set, a, b).map_err(to_py)?;
    let d = PyDict::new_bound(py);
    d.set_item("total_discord", v.total_discord)?;
    d.set_item("sub_sum", v.sub_sum)?;
    d.set_item("classification", v.classification.to_string())?;
    Ok(d)
}

#[pymodule]
fn gdiscord_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("UnphysicalError", m.py().get_type_bound::<UnphysicalError>())?;
    m.add_class::<PyStandardForm>()?;
    m.add_class::<PyCorrelationReport>()?;
    m.add_class::<PyVarianceRecord>()?;
    m.add_function(wrap_pyfunction!(entropy_h, m)?)?;
    m.add_function(wrap_pyfunction!(e_min, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_e_min, m)?)?;
    m.add_function(wrap_pyfunction!(attenuation_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(scan_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_dual_homodyne, m)?)?;
    m.add_function(wrap_pyfunction!(classify_additivity, m)?)?;
    Ok(())
}
