//! Python bindings: record parsing, validation and RDF output, linkage, and
//! the file-backed registry.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use syriaca_works::linkage::{self, LinkageConfig, MatchCandidate, MatchDecision, WorkStub};
use syriaca_works::model::{EntityKind, ValidationReport};
use syriaca_works::rdf::GraphFormat;
use syriaca_works::registry;
use syriaca_works::{taxonomy, EntityUri, NamespaceTable};

create_exception!(syriaca_py, SyriacaError, PyValueError);

fn err(code: &str, message: impl std::fmt::Display) -> PyErr {
    SyriacaError::new_err(format!("{code}: {message}"))
}

fn graph_format(format: &str) -> PyResult<GraphFormat> {
    match format {
        "nt" => Ok(GraphFormat::NTriples),
        "ttl" => Ok(GraphFormat::Turtle),
        other => Err(PyValueError::new_err(format!("unknown format {other:?}; use nt or ttl"))),
    }
}

type Item = (String, String, String, String);

fn report_items(report: &ValidationReport) -> Vec<Item> {
    report
        .items
        .iter()
        .map(|i| {
            let severity = match i.severity {
                syriaca_works::model::Severity::Error => "error",
                syriaca_works::model::Severity::Warning => "warning",
            };
            (severity.to_string(), i.code.clone(), i.path.clone(), i.message.clone())
        })
        .collect()
}

/// A parsed work record.
#[pyclass(frozen, module = "syriaca_py")]
struct WorkRecord {
    inner: syriaca_works::WorkRecord,
}

#[pymethods]
impl WorkRecord {
    #[staticmethod]
    fn from_tei(xml: &str) -> PyResult<Self> {
        syriaca_works::parse_work_record(xml).map(|inner| WorkRecord { inner }).map_err(|e| err(e.code(), e))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(|inner| WorkRecord { inner }).map_err(|e| err("JSON_INVALID", e))
    }

    #[getter]
    fn uri(&self) -> String {
        self.inner.uri.to_string()
    }

    #[getter]
    fn id(&self) -> u64 {
        self.inner.uri.id
    }

    /// `(lang, text)` for every title in document order.
    #[getter]
    fn titles(&self) -> Vec<(String, String)> {
        self.inner.titles.iter().map(|t| (t.lang.clone(), t.text())).collect()
    }

    #[getter]
    fn idnos(&self) -> Vec<(String, String)> {
        self.inner.idnos.iter().map(|i| (i.scheme.clone(), i.value.clone())).collect()
    }

    fn headword(&self, lang: &str) -> Option<String> {
        self.inner.canonical_headword(lang).map(|t| t.text())
    }

    fn idno(&self, scheme: &str) -> Option<String> {
        self.inner.idno(scheme).map(str::to_string)
    }

    /// `(severity, code, path, message)` tuples; empty when clean.
    fn validate(&self) -> Vec<Item> {
        let mut report = syriaca_works::validate_record(&self.inner);
        report.merge(taxonomy::validate_subject_codes(&self.inner));
        report_items(&report)
    }

    fn is_valid(&self) -> bool {
        syriaca_works::validate_record(&self.inner).is_valid()
    }

    fn to_tei(&self) -> PyResult<String> {
        syriaca_works::serialize_work_record(&self.inner).map_err(|e| err(e.code(), e))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("records serialize")
    }

    #[pyo3(signature = (format = "nt"))]
    fn to_rdf(&self, format: &str) -> PyResult<String> {
        let ns = NamespaceTable::default();
        let triples = syriaca_works::record_to_triples(&self.inner, &ns).map_err(|e| err(e.code(), e))?;
        Ok(syriaca_works::serialize_graph(&triples, graph_format(format)?, &ns))
    }

    /// This record as a linkage stub, JSON-encoded.
    fn to_stub_json(&self) -> String {
        serde_json::to_string(&WorkStub::from_record(&self.inner)).expect("stubs serialize")
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("WorkRecord({:?})", self.inner.uri.to_string())
    }
}

/// Validation items for a TEI document; parse failures become one error item.
#[pyfunction]
fn validate_tei(xml: &str) -> Vec<Item> {
    match syriaca_works::parse_work_record(xml) {
        Ok(inner) => WorkRecord { inner }.validate(),
        Err(e) => vec![("error".into(), e.code().into(), String::new(), e.to_string())],
    }
}

#[pyfunction]
#[pyo3(signature = (xml, format = "nt"))]
fn tei_to_rdf(xml: &str, format: &str) -> PyResult<String> {
    WorkRecord::from_tei(xml)?.to_rdf(format)
}

/// Normalized tag and whether `syc` was replaced.
#[pyfunction]
fn normalize_lang(tag: &str) -> PyResult<(String, bool)> {
    syriaca_works::normalize_lang(tag).map_err(|e| err("LANG_INVALID", e))
}

/// `(code, label, parent, children)` for a subject code.
#[pyfunction]
fn lookup_subject(code: &str) -> PyResult<(String, String, Option<String>, Vec<String>)> {
    let n = taxonomy::lookup_subject(code).map_err(|e| err("NOT_FOUND", e))?;
    Ok((n.code.clone(), n.label.clone(), n.parent.clone(), n.children.clone()))
}

#[pyfunction]
fn normalize_title(text: &str) -> Vec<String> {
    linkage::normalize_title(text, "")
}

/// Scores stubs (JSON lines) and returns candidates as JSON lines.
#[pyfunction]
#[pyo3(signature = (stubs_jsonl, config_toml = None))]
fn generate_candidates(py: Python<'_>, stubs_jsonl: &str, config_toml: Option<&str>) -> PyResult<String> {
    let stubs: Vec<WorkStub> =
        linkage::read_jsonl(stubs_jsonl).map_err(|(line, e)| err("JSON_INVALID", format!("line {line}: {e}")))?;
    let config = match config_toml {
        Some(text) => LinkageConfig::from_toml_str(text).map_err(|e| err(e.code(), e))?,
        None => LinkageConfig::default(),
    };
    let candidates = py.detach(|| linkage::generate_candidates(&stubs, &config)).map_err(|e| err(e.code(), e))?;
    Ok(linkage::write_jsonl(&candidates))
}

/// Cluster member lists under the given decisions.
#[pyfunction]
fn apply_decisions(items: Vec<String>, candidates_jsonl: &str, decisions_jsonl: &str) -> PyResult<Vec<Vec<String>>> {
    let candidates: Vec<MatchCandidate> =
        linkage::read_jsonl(candidates_jsonl).map_err(|(line, e)| err("JSON_INVALID", format!("line {line}: {e}")))?;
    let decisions: Vec<MatchDecision> =
        linkage::read_jsonl(decisions_jsonl).map_err(|(line, e)| err("JSON_INVALID", format!("line {line}: {e}")))?;
    let clusters = linkage::apply_decisions(&items, &candidates, &decisions).map_err(|e| err(e.code(), e))?;
    Ok(clusters.into_iter().map(|c| c.members).collect())
}

fn reg_err(e: registry::RegistryError) -> PyErr {
    err(e.code(), e)
}

/// A registry directory holding `work/{id}.xml` files.
#[pyclass(frozen, module = "syriaca_py")]
struct Registry {
    inner: registry::Registry,
}

#[pymethods]
impl Registry {
    #[new]
    #[pyo3(signature = (path, read_only = false))]
    fn new(path: std::path::PathBuf, read_only: bool) -> PyResult<Self> {
        let inner = if read_only { registry::Registry::open_read_only(path) } else { registry::Registry::open(path) };
        inner.map(|inner| Registry { inner }).map_err(reg_err)
    }

    #[pyo3(signature = (kind = "work"))]
    fn mint(&self, kind: &str) -> PyResult<String> {
        let kind: EntityKind = kind.parse().map_err(|e| err("KIND_INVALID", e))?;
        self.inner.mint_uri(kind).map(|u| u.to_string()).map_err(reg_err)
    }

    /// Stores a record; returns True when its URI was new.
    fn put(&self, record: &WorkRecord) -> PyResult<bool> {
        self.inner.put_record(&record.inner).map_err(reg_err)
    }

    fn get(&self, id: u64) -> PyResult<WorkRecord> {
        self.inner.get_record(&EntityUri::work(id)).map(|inner| WorkRecord { inner }).map_err(reg_err)
    }

    fn get_tei(&self, id: u64) -> PyResult<String> {
        self.inner.get_tei(&EntityUri::work(id)).map_err(reg_err)
    }

    fn delete(&self, id: u64) -> PyResult<()> {
        self.inner.delete_record(&EntityUri::work(id)).map_err(reg_err)
    }

    fn lookup_idno(&self, scheme: &str, value: &str) -> Option<String> {
        self.inner.lookup_idno(scheme, value).map(|u| u.to_string())
    }

    /// `(uri, headword, score)` best first.
    #[pyo3(signature = (title, lang = None))]
    fn search(&self, title: &str, lang: Option<&str>) -> Vec<(String, Option<String>, f64)> {
        self.inner.search_titles(title, lang).into_iter().map(|h| (h.uri.to_string(), h.headword, h.score)).collect()
    }

    fn uris(&self) -> Vec<String> {
        self.inner.uris().iter().map(ToString::to_string).collect()
    }

    /// `(kind, work a, work b, predicate)` for each directionality violation.
    fn lint_directionality(&self) -> PyResult<Vec<(String, String, String, String)>> {
        let found = self.inner.lint_directionality(&NamespaceTable::default()).map_err(reg_err)?;
        Ok(found
            .into_iter()
            .map(|v| {
                let kind = match v.kind {
                    registry::ViolationKind::MutualRelation => "MUTUAL_RELATION",
                    registry::ViolationKind::ParentSide => "PARENT_SIDE",
                };
                (kind.to_string(), v.works.0.to_string(), v.works.1.to_string(), v.predicate)
            })
            .collect())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pymodule]
fn syriaca_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SyriacaError", m.py().get_type::<SyriacaError>())?;
    m.add_class::<WorkRecord>()?;
    m.add_class::<Registry>()?;
    m.add_function(wrap_pyfunction!(validate_tei, m)?)?;
    m.add_function(wrap_pyfunction!(tei_to_rdf, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_lang, m)?)?;
    m.add_function(wrap_pyfunction!(lookup_subject, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_title, m)?)?;
    m.add_function(wrap_pyfunction!(generate_candidates, m)?)?;
    m.add_function(wrap_pyfunction!(apply_decisions, m)?)?;
    Ok(())
}
