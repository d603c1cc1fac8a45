//! Authority records for literary works.
//!
//! Work records are stored as one TEI-XML document per work, validated
//! against the record invariants in [`model`], crosswalked to RDF in
//! [`rdf`], linked and merged from catalogue stubs in [`linkage`], and
//! served from a file-backed [`registry`].

pub mod linkage;
pub mod model;
pub mod rdf;
pub mod registry;
pub mod taxonomy;
pub mod tei;

pub use model::{
    canonical_headword, normalize_lang, uri_kind, validate_record, EntityKind, EntityUri, ValidationReport, WorkRecord,
};
pub use rdf::{expand_curie, record_to_triples, relations_to_triples, serialize_graph, NamespaceTable};
pub use tei::{parse_work_record, resolve_pointer, serialize_work_record};
