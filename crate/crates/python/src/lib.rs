//! Python module `magicrank`.
//!
//! Structured results (certificates, sweep reports, search results) cross
//! the boundary as plain Python dicts decoded from their JSON artifacts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;

use magicrank_core::anneal::{AnnealConfig, CatalogScope};
use magicrank_core::asymptotics;
use magicrank_core::certify::{self, Certificate as CoreCertificate, ShardSpec, AUDIT_SAMPLES};
use magicrank_core::clifford::group::{orbit_closure, standard_generators};
use magicrank_core::decomposition::{self, fixtures};
use magicrank_core::gadget;
use magicrank_core::stabilizer::{
    CatalogMode, MagicId, MagicTarget as CoreTarget, StabilizerCatalog,
};
use magicrank_core::WITNESS_TOL;
use num_complex::Complex64;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (s,))
}

fn magic(id: &str) -> PyResult<MagicId> {
    id.parse().map_err(err)
}

fn mode(s: &str) -> PyResult<CatalogMode> {
    s.parse().map_err(err)
}

/// `id^{⊗m}` for a magic state id (S, N, H3, T3, H, T).
#[pyclass(module = "magicrank", frozen)]
struct MagicTarget {
    inner: CoreTarget,
}

#[pymethods]
impl MagicTarget {
    #[new]
    fn new(id: &str, m: usize) -> PyResult<Self> {
        Ok(Self {
            inner: CoreTarget::new(magic(id)?, m).map_err(err)?,
        })
    }

    #[getter]
    fn id(&self) -> &'static str {
        self.inner.id.name()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn p(&self) -> u8 {
        self.inner.p()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn vector(&self) -> Vec<Complex64> {
        self.inner.vector_complex()
    }

    fn content_hash(&self) -> String {
        self.inner.content_hash()
    }

    fn __repr__(&self) -> String {
        format!("MagicTarget('{}', {})", self.inner.id.name(), self.inner.m)
    }
}

/// Stabilizer states of `n` qudits of prime dimension `p`.
#[pyclass(module = "magicrank", frozen)]
struct Catalog {
    inner: StabilizerCatalog,
}

#[pymethods]
impl Catalog {
    #[new]
    #[pyo3(signature = (p, n, mode = "raw"))]
    fn new(py: Python<'_>, p: u8, n: usize, mode: &str) -> PyResult<Self> {
        let m = self::mode(mode)?;
        let inner = py
            .detach(|| StabilizerCatalog::build(p, n, m))
            .map_err(err)?;
        Ok(Self { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len() as usize
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn content_hash(&self) -> String {
        self.inner.content_hash().to_string()
    }

    fn vector(&self, i: u64) -> PyResult<Vec<Complex64>> {
        if i >= self.inner.len() {
            return Err(err(format!("index {i} out of range")));
        }
        let mut v = vec![Complex64::new(0.0, 0.0); self.inner.dim()];
        self.inner.fill_vector(i, &mut v);
        Ok(v)
    }
}

/// An exact stabilizer decomposition.
#[pyclass(module = "magicrank", frozen)]
struct Decomposition {
    inner: decomposition::Decomposition,
}

#[pymethods]
impl Decomposition {
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        Ok(Self {
            inner: fixtures::load(name).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: serde_json::from_str(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(err)
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn target(&self) -> String {
        self.inner.target.to_string()
    }

    fn coefficients(&self) -> Vec<Complex64> {
        self.inner.coefficients_complex()
    }

    fn verify_numeric(&self) -> PyResult<f64> {
        self.inner.verify_numeric().map_err(err)
    }

    fn verify_exact(&self) -> PyResult<bool> {
        Ok(self.inner.verify_exact().map_err(err)?.ok)
    }
}

/// A rank certificate over a shard of tuples.
#[pyclass(module = "magicrank", frozen)]
struct Certificate {
    inner: CoreCertificate,
}

#[pymethods]
impl Certificate {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: CoreCertificate::from_json(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(err)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    #[getter]
    fn rules_out(&self) -> bool {
        self.inner.rules_out
    }

    #[getter]
    fn complete(&self) -> bool {
        self.inner.complete
    }

    #[getter]
    fn tuples_tested(&self) -> u64 {
        self.inner.tuples_tested
    }

    #[getter]
    fn total_tuples(&self) -> u64 {
        self.inner.total_tuples
    }

    #[getter]
    fn witnesses(&self) -> Vec<Vec<u64>> {
        self.inner
            .witnesses
            .iter()
            .map(|w| w.tuple.clone())
            .collect()
    }

    #[getter]
    fn min_nonwitness_residual(&self) -> Option<f64> {
        self.inner.min_nonwitness_residual
    }

    /// Audit against a freshly built catalog; returns the report as a dict.
    #[pyo3(signature = (samples = AUDIT_SAMPLES))]
    fn audit<'py>(&self, py: Python<'py>, samples: usize) -> PyResult<Bound<'py, PyAny>> {
        let c = &self.inner;
        let rep = py
            .detach(|| -> magicrank_core::Result<_> {
                let t = CoreTarget::new(c.target, c.m)?;
                let cat = StabilizerCatalog::build(c.p, c.m, c.catalog_mode)?;
                Ok(certify::audit(c, &cat, &t, samples))
            })
            .map_err(err)?;
        to_py(py, &rep)
    }
}

/// Test every rank-`r` tuple in shard `shard_index / shard_count`.
#[pyfunction]
#[pyo3(signature = (target, m, r, shard_index = 0, shard_count = 1, mode = "raw", tol = WITNESS_TOL))]
fn certify_rank(
    py: Python<'_>,
    target: &str,
    m: usize,
    r: usize,
    shard_index: u64,
    shard_count: u64,
    mode: &str,
    tol: f64,
) -> PyResult<Certificate> {
    let (id, mode) = (magic(target)?, self::mode(mode)?);
    let inner = py
        .detach(|| -> magicrank_core::Result<_> {
            let t = CoreTarget::new(id, m)?;
            let cat = certify::catalog_for(&t, mode)?;
            let spec = ShardSpec::new(
                shard_index,
                shard_count,
                certify::total_tuples(cat.len(), r)?,
            )?;
            certify::certify_rank(&t, r, &cat, spec, tol)
        })
        .map_err(err)?;
    Ok(Certificate { inner })
}

#[pyfunction]
fn merge_certificates(certs: Vec<PyRef<'_, Certificate>>) -> PyResult<Certificate> {
    let v: Vec<CoreCertificate> = certs.iter().map(|c| c.inner.clone()).collect();
    Ok(Certificate {
        inner: certify::merge_certificates(&v).map_err(err)?,
    })
}

/// Simulated-annealing search. Returns the result dict; `decomposition`
/// is set when a witness snapped to exact coefficients.
#[pyfunction]
#[pyo3(signature = (target, m, r, seed = 1, chains = None, steps = None, scope = None))]
fn search<'py>(
    py: Python<'py>,
    target: &str,
    m: usize,
    r: usize,
    seed: u64,
    chains: Option<usize>,
    steps: Option<u64>,
    scope: Option<&str>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = AnnealConfig::new(CoreTarget::new(magic(target)?, m).map_err(err)?, r, seed);
    if let Some(c) = chains {
        cfg.chains = c;
    }
    if let Some(s) = steps {
        cfg.steps = s;
    }
    if let Some(s) = scope {
        cfg.scope = s.parse::<CatalogScope>().map_err(err)?;
    }
    let res = py.detach(|| cfg.run()).map_err(err)?;
    to_py(py, &res)
}

/// Two-copy protocol sweep over all of Sp(4, F3).
#[pyfunction]
fn sweep_two_copy<'py>(py: Python<'py>, state: &str) -> PyResult<Bound<'py, PyAny>> {
    let id = magic(state)?;
    let rep = py
        .detach(|| gadget::sp4_unitaries().and_then(|us| gadget::sweep_two_copy(id, &us)))
        .map_err(err)?;
    to_py(py, &rep)
}

/// Deterministic injection gadget sweep over all of Sp(4, F3).
#[pyfunction]
fn sweep_injection<'py>(py: Python<'py>, state: &str) -> PyResult<Bound<'py, PyAny>> {
    let id = magic(state)?;
    let rep = py
        .detach(|| gadget::sp4_unitaries().and_then(|us| gadget::sweep_injection(id, &us)))
        .map_err(err)?;
    to_py(py, &rep)
}

/// Replay a gate word on two copies of `state` and project the ancilla on `k`.
#[pyfunction]
fn replay_protocol<'py>(
    py: Python<'py>,
    word: &str,
    state: &str,
    k: u8,
) -> PyResult<Bound<'py, PyAny>> {
    let rep = gadget::replay_protocol(word, magic(state)?, k).map_err(err)?;
    to_py(py, &rep)
}

/// Projective Clifford orbit of a single-qutrit magic state.
#[pyfunction]
fn orbit(state: &str) -> PyResult<Vec<Vec<Complex64>>> {
    let id = magic(state)?;
    if id.p() != 3 {
        return Err(err("orbits are computed for qutrit states"));
    }
    Ok(orbit_closure(&id.amplitudes(), &standard_generators()).elements)
}

/// `(i_a, i_b, ratio)` for the largest modulus ratio ≥ 2, else `None`.
#[pyfunction]
fn find_ratio_witness(state: Vec<Complex64>) -> Option<(usize, usize, f64)> {
    asymptotics::find_ratio_witness(&state).map(|w| (w.i_a, w.i_b, w.ratio))
}

#[pyfunction]
fn moulton_bound(m: u32) -> PyResult<f64> {
    asymptotics::moulton_bound(m).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (r, m, p = 3))]
fn exponent_from_bound(r: u64, m: u32, p: u32) -> PyResult<f64> {
    if r == 0 || m == 0 || p < 2 {
        return Err(err("need r >= 1, m >= 1, p >= 2"));
    }
    Ok(decomposition::exponent_from_bound(r, m, p))
}

#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    fixtures::FIXTURE_NAMES.to_vec()
}

#[pymodule]
fn magicrank(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<MagicTarget>()?;
    m.add_class::<Catalog>()?;
    m.add_class::<Decomposition>()?;
    m.add_class::<Certificate>()?;
    m.add_function(wrap_pyfunction!(certify_rank, m)?)?;
    m.add_function(wrap_pyfunction!(merge_certificates, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_two_copy, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_injection, m)?)?;
    m.add_function(wrap_pyfunction!(replay_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(orbit, m)?)?;
    m.add_function(wrap_pyfunction!(find_ratio_witness, m)?)?;
    m.add_function(wrap_pyfunction!(moulton_bound, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_from_bound, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add("VERIFY_TOL", magicrank_core::VERIFY_TOL)?;
    m.add("WITNESS_TOL", WITNESS_TOL)?;
    Ok(())
}
