//! TEI to RDF crosswalk and graph serialization.

mod crosswalk;
mod expand;
mod serialize;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use crosswalk::{record_to_triples, relations_to_triples};
pub use expand::{expand_embodied_relation, expand_embodied_relation_at, ExpandError};
pub use serialize::{serialize_graph, GraphFormat};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("UNBOUND_PREFIX: prefix {0:?} is not bound")]
    UnboundPrefix(String),
    #[error("{0:?} is not a CURIE")]
    NotCurie(String),
    #[error("unresolvable local pointer {pointer} in relations[{relation}]")]
    UnresolvedPointer { relation: usize, pointer: String },
    #[error(transparent)]
    Pointer(#[from] crate::tei::PointerError),
    #[error("namespace config line {line}: {message}")]
    Config { line: usize, message: String },
}

impl RdfError {
    pub fn code(&self) -> &'static str {
        match self {
            RdfError::UnboundPrefix(_) => "UNBOUND_PREFIX",
            RdfError::NotCurie(_) => "NOT_CURIE",
            RdfError::UnresolvedPointer { .. } | RdfError::Pointer(_) => "POINTER_UNRESOLVED",
            RdfError::Config { .. } => "NS_CONFIG",
        }
    }
}

/// Prefix to IRI-base bindings used for CURIE expansion and Turtle output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamespaceTable {
    bindings: BTreeMap<String, String>,
}

const DEFAULT_BINDINGS: &[(&str, &str)] = &[
    ("bf", "http://bibframe.org/vocab/"),
    ("dct", "http://purl.org/dc/terms/"),
    ("frbr", "http://purl.org/vocab/frbr/core#"),
    ("lawd", "http://lawd.info/ontology/"),
    ("rdac", "http://rdaregistry.info/Elements/c/"),
    ("rdam", "http://www.rdaregistry.info/Elements/m/"),
    ("rdaw", "http://rdaregistry.info/Elements/w/"),
    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
    ("rdrel", "http://RDVocab.info/RDARelationshipsWEMI/"),
    ("schema", "http://schema.org/"),
    ("syriaca", "http://syriaca.org/schema#"),
];

impl Default for NamespaceTable {
    fn default() -> Self {
        NamespaceTable { bindings: DEFAULT_BINDINGS.iter().map(|(p, i)| (p.to_string(), i.to_string())).collect() }
    }
}

impl NamespaceTable {
    pub fn empty() -> Self {
        NamespaceTable { bindings: BTreeMap::new() }
    }

    pub fn get(&self, prefix: &str) -> Option<&str> {
        self.bindings.get(prefix).map(String::as_str)
    }

    pub fn bind(&mut self, prefix: impl Into<String>, iri: impl Into<String>) {
        self.bindings.insert(prefix.into(), iri.into());
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.bindings.iter().map(|(p, i)| (p.as_str(), i.as_str()))
    }

    /// Defaults overlaid with `prefix = iri` lines; lines starting with `#` are comments.
    pub fn from_config_str(text: &str) -> Result<Self, RdfError> {
        let mut table = NamespaceTable::default();
        for (n, line) in text.lines().enumerate() {
            // IRIs may contain '#', so comments are whole lines only.
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (prefix, iri) = line
                .split_once('=')
                .ok_or_else(|| RdfError::Config { line: n + 1, message: "expected prefix = iri".into() })?;
            let (prefix, iri) = (prefix.trim(), iri.trim());
            if prefix.is_empty() || crate::model::check_absolute_iri(iri).is_err() {
                return Err(RdfError::Config { line: n + 1, message: format!("bad binding {prefix:?} = {iri:?}") });
            }
            table.bind(prefix, iri);
        }
        Ok(table)
    }

    pub fn to_config_string(&self) -> String {
        self.iter().map(|(p, i)| format!("{p} = {i}\n")).collect()
    }

    /// The (prefix, local) split that abbreviates `iri`, preferring the longest base.
    pub fn compact(&self, iri: &str) -> Option<(&str, String)> {
        self.iter()
            .filter(|(_, base)| iri.starts_with(base))
            .max_by_key(|(_, base)| base.len())
            .map(|(p, base)| (p, iri[base.len()..].to_string()))
    }
}

/// Expands `prefix:local` against the table.
pub fn expand_curie(curie: &str, ns: &NamespaceTable) -> Result<String, RdfError> {
    let (prefix, local) = curie
        .split_once(':')
        .filter(|(p, l)| !p.is_empty() && !l.starts_with("//"))
        .ok_or_else(|| RdfError::NotCurie(curie.to_string()))?;
    let base = ns.get(prefix).ok_or_else(|| RdfError::UnboundPrefix(prefix.to_string()))?;
    Ok(format!("{base}{local}"))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Literal { lexical: String, lang: Option<String> },
}

impl Term {
    pub fn iri(s: impl Into<String>) -> Self {
        Term::Iri(s.into())
    }

    pub fn lang_literal(lexical: impl Into<String>, lang: impl Into<String>) -> Self {
        Term::Literal { lexical: lexical.into(), lang: Some(lang.into()) }
    }

    pub fn literal(lexical: impl Into<String>) -> Self {
        Term::Literal { lexical: lexical.into(), lang: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<String>, predicate: impl Into<String>, object: Term) -> Self {
        Triple { subject: subject.into(), predicate: predicate.into(), object }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize::ntriples_line(self))
    }
}
