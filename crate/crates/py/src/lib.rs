//! Python bindings: load a store, filter it with keyword criteria, and get
//! cards and analytics back as plain Python values.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use dpe_core::analytics::{
    self, agreement_matrix, breakdown, diversity_report, error_rates, license_distribution,
    representation_scores, use_category_counts, Axis, CountryLanguageTable, Denominator, Estimator,
    LanguageFamilies,
};
use dpe_core::card::{generate_card, render_markdown};
use dpe_core::filter::{apply_filter, FilterCriteria};
use dpe_core::ingest::{load_store, parse_records, Store};
use dpe_core::license::{LicenseRegistry, Policy, RightsProfile, UseCategory};
use dpe_core::schema::Aggregator;
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyString};
use serde::Serialize;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Converts through JSON so results are plain dicts, lists and numbers.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn registry_from(path: Option<PathBuf>) -> PyResult<Arc<LicenseRegistry>> {
    Ok(Arc::new(match path {
        Some(p) => LicenseRegistry::load(&p).map_err(value_error)?,
        None => LicenseRegistry::builtin(),
    }))
}

/// Keyword criteria to `key=value` pairs: booleans become `true`/`false`,
/// strings pass through, other iterables repeat the key.
fn criteria_from(kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<FilterCriteria> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    if let Some(kwargs) = kwargs {
        for (k, v) in kwargs.iter() {
            let key: String = k.extract()?;
            if v.is_instance_of::<PyBool>() {
                pairs.push((key, v.extract::<bool>()?.to_string()));
            } else if v.is_instance_of::<PyString>() {
                pairs.push((key, v.extract()?));
            } else if let Ok(items) = v.try_iter() {
                for item in items {
                    pairs.push((key.clone(), item?.str()?.to_string()));
                }
            } else {
                pairs.push((key, v.str()?.to_string()));
            }
        }
    }
    FilterCriteria::from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str()))).map_err(value_error)
}

/// A categorized, indexed set of dataset records.
#[pyclass(name = "Store", module = "dpe", frozen)]
struct PyStore {
    inner: Arc<Store>,
}

#[pymethods]
impl PyStore {
    /// Loads `.jsonl` files or directories of them.
    #[staticmethod]
    #[pyo3(signature = (paths, registry=None))]
    fn load(paths: Vec<PathBuf>, registry: Option<PathBuf>) -> PyResult<Self> {
        let store = load_store(&paths, registry_from(registry)?, Policy::default()).map_err(value_error)?;
        Ok(PyStore { inner: Arc::new(store) })
    }

    /// Builds a store from JSON Lines text.
    #[staticmethod]
    #[pyo3(signature = (text, registry=None))]
    fn from_jsonl(text: &str, registry: Option<PathBuf>) -> PyResult<Self> {
        let records = parse_records(text, Path::new("<string>")).map_err(value_error)?;
        let store = Store::from_records(records, registry_from(registry)?, Policy::default()).map_err(value_error)?;
        Ok(PyStore { inner: Arc::new(store) })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Store({} records)", self.inner.len())
    }

    #[getter]
    fn version(&self) -> String {
        self.inner.content_fingerprint()
    }

    fn ids(&self) -> Vec<String> {
        self.inner.ids().map(str::to_string).collect()
    }

    /// The record and its rights profile.
    fn get<'py>(&self, py: Python<'py>, id: &str) -> PyResult<Bound<'py, PyAny>> {
        let sr = self.inner.get(id).ok_or_else(|| PyKeyError::new_err(id.to_string()))?;
        to_py(py, &serde_json::json!({ "record": sr.record, "rights": sr.rights }))
    }

    /// Applies keyword criteria such as `allow_use="commercial"` or
    /// `forbid_share_alike=True`.
    #[pyo3(signature = (**criteria))]
    fn filter(&self, criteria: Option<&Bound<'_, PyDict>>) -> PyResult<PySelection> {
        let c = criteria_from(criteria)?;
        Ok(PySelection { inner: apply_filter(&self.inner, &c) })
    }

    fn to_jsonl(&self) -> String {
        self.inner.to_jsonl()
    }
}

/// The records that passed a filter.
#[pyclass(name = "Selection", module = "dpe", frozen)]
struct PySelection {
    inner: dpe_core::filter::Selection,
}

#[pymethods]
impl PySelection {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Selection({} of {} records)", self.inner.len(), self.inner.store().len())
    }

    fn ids(&self) -> Vec<String> {
        self.inner.included_ids().into_iter().map(str::to_string).collect()
    }

    /// `(id, failed clauses)` for every excluded record.
    fn excluded(&self) -> Vec<(String, Vec<String>)> {
        self.inner
            .excluded()
            .iter()
            .map(|(id, reasons)| (id.clone(), reasons.iter().map(|r| r.to_string()).collect()))
            .collect()
    }

    fn card_markdown(&self) -> String {
        render_markdown(&generate_card(&self.inner))
    }

    fn card_json(&self) -> String {
        generate_card(&self.inner).to_json()
    }

    fn use_category_counts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let c = use_category_counts(&self.inner);
        let by_name: Vec<(&str, usize)> = c.rows.iter().map(|r| (r.category.as_str(), r.count)).collect();
        to_py(py, &by_name.into_iter().collect::<std::collections::BTreeMap<_, _>>())
    }

    /// 4x4 counts, rows verified category, columns the platform's label,
    /// both in permissiveness order.
    fn agreement_matrix(&self, aggregator: &str) -> PyResult<Vec<[u64; 4]>> {
        let agg: Aggregator = aggregator.parse().map_err(value_error)?;
        let m = agreement_matrix(&self.inner, agg);
        Ok(UseCategory::ALL.iter().map(|c| m.row(*c)).collect())
    }

    fn error_rates<'py>(&self, py: Python<'py>, aggregator: &str) -> PyResult<Bound<'py, PyAny>> {
        let agg: Aggregator = aggregator.parse().map_err(value_error)?;
        to_py(py, &error_rates(&agreement_matrix(&self.inner, agg)))
    }

    #[pyo3(signature = (denominator="licenses"))]
    fn license_distribution<'py>(&self, py: Python<'py>, denominator: &str) -> PyResult<Bound<'py, PyAny>> {
        let d: Denominator = denominator.parse().map_err(value_error)?;
        to_py(py, &license_distribution(&self.inner, d))
    }

    #[pyo3(signature = (estimator="knn", k=3, bins=None))]
    fn diversity<'py>(
        &self,
        py: Python<'py>,
        estimator: &str,
        k: usize,
        bins: Option<usize>,
    ) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &diversity_report(&self.inner, estimator_from(estimator, k, bins)?))
    }

    #[pyo3(signature = (axis="year", families=None))]
    fn breakdown<'py>(&self, py: Python<'py>, axis: &str, families: Option<PathBuf>) -> PyResult<Bound<'py, PyAny>> {
        let axis: Axis = axis.parse().map_err(value_error)?;
        let families = match families {
            Some(p) => LanguageFamilies::load(&p).map_err(value_error)?,
            None => LanguageFamilies::builtin(),
        };
        to_py(py, &breakdown(&self.inner, axis, &families))
    }

    /// Country to score; `table` is a `country,language,fraction` CSV path.
    #[pyo3(signature = (table=None))]
    fn representation(&self, table: Option<PathBuf>) -> PyResult<std::collections::BTreeMap<String, f64>> {
        let table = match table {
            Some(p) => CountryLanguageTable::load(&p).map_err(value_error)?,
            None => CountryLanguageTable::builtin(),
        };
        Ok(representation_scores(&self.inner, &table))
    }
}

fn estimator_from(name: &str, k: usize, bins: Option<usize>) -> PyResult<Estimator> {
    match name {
        "knn" => Ok(Estimator::Knn { k }),
        "histogram" => Ok(Estimator::Histogram { bins }),
        other => Err(PyValueError::new_err(format!("unknown estimator `{other}` (expected knn or histogram)"))),
    }
}

/// Canonical id for a raw license name, or None.
#[pyfunction]
fn normalize_license(raw: &str) -> Option<String> {
    LicenseRegistry::builtin().normalize(raw).canonical_id().map(str::to_string)
}

/// Joins `(use, attribution, share_alike)` triples, strictest wins.
#[pyfunction]
fn compose(profiles: Vec<(String, bool, bool)>) -> PyResult<(String, bool, bool)> {
    let parsed = profiles
        .iter()
        .map(|(u, a, s)| Ok(RightsProfile::new(u.parse::<UseCategory>().map_err(value_error)?, *a, *s)))
        .collect::<PyResult<Vec<_>>>()?;
    let p = dpe_core::license::compose(&parsed).map_err(value_error)?;
    Ok((p.use_category.as_str().to_string(), p.attribution_required, p.share_alike_required))
}

/// Shannon entropy of `counts` divided by log(k).
#[pyfunction]
fn normalized_entropy(counts: Vec<u64>, k: usize) -> PyResult<f64> {
    analytics::normalized_shannon_entropy(&counts, k).map_err(value_error)
}

/// Differential entropy in nats.
#[pyfunction]
#[pyo3(signature = (samples, estimator="knn", k=3, bins=None))]
fn differential_entropy(samples: Vec<f64>, estimator: &str, k: usize, bins: Option<usize>) -> PyResult<f64> {
    analytics::differential_entropy(&samples, estimator_from(estimator, k, bins)?).map_err(value_error)
}

#[pymodule]
fn dpe(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStore>()?;
    m.add_class::<PySelection>()?;
    m.add_function(wrap_pyfunction!(normalize_license, m)?)?;
    m.add_function(wrap_pyfunction!(compose, m)?)?;
    m.add_function(wrap_pyfunction!(normalized_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(differential_entropy, m)?)?;
    m.add("USE_CATEGORIES", UseCategory::ALL.map(|c| c.as_str()).to_vec())?;
    Ok(())
}
