//! TEI-XML work records: one document per work.

mod parse;
mod write;

use thiserror::Error;

use crate::model::{EntityKind, EntityUri, Inline, ValidationReport};

pub use parse::{parse_work_record, split_list};
pub use write::{serialize_work_record, serialize_work_record_unchecked};

pub const TEI_NS: &str = "http://www.tei-c.org/ns/1.0";
pub const XML_NS: &str = "http://www.w3.org/XML/1998/namespace";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TeiError {
    #[error("XML not well-formed at {line}:{column}: {message}")]
    Xml { line: u32, column: u32, message: String },
    #[error("MODEL_NO_URI: work bibl has no idno of type URI")]
    NoUri,
    #[error("MODEL_CARDINALITY: {0}")]
    Cardinality(String),
    #[error("MODEL_ID_MISMATCH: {0}")]
    IdMismatch(String),
    #[error("{element}: {message}")]
    Structure { element: String, message: String },
    #[error("record is invalid ({} errors)", .0.errors().count())]
    Invalid(ValidationReport),
}

impl TeiError {
    pub fn code(&self) -> &'static str {
        match self {
            TeiError::Xml { .. } => "XML_NOT_WELL_FORMED",
            TeiError::NoUri => "MODEL_NO_URI",
            TeiError::Cardinality(_) => "MODEL_CARDINALITY",
            TeiError::IdMismatch(_) => "MODEL_ID_MISMATCH",
            TeiError::Structure { .. } => "MODEL_STRUCTURE",
            TeiError::Invalid(_) => "RECORD_INVALID",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PointerError {
    #[error("empty pointer target in {0:?}")]
    EmptyTarget(String),
    #[error("{0:?} is not a local pointer")]
    NotLocal(String),
    #[error("base {0} already has a fragment")]
    BaseHasFragment(EntityUri),
    #[error("base {0} is not a work URI")]
    BaseNotWork(EntityUri),
}

/// Grounds a `#id` pointer in the record's URI.
pub fn resolve_pointer(base: &EntityUri, ptr: &str) -> Result<String, PointerError> {
    if base.fragment.is_some() {
        return Err(PointerError::BaseHasFragment(base.clone()));
    }
    if base.kind != EntityKind::Work {
        return Err(PointerError::BaseNotWork(base.clone()));
    }
    let target = ptr.strip_prefix('#').ok_or_else(|| PointerError::NotLocal(ptr.to_string()))?;
    if target.is_empty() {
        return Err(PointerError::EmptyTarget(ptr.to_string()));
    }
    if target.contains('#') || target.chars().any(char::is_whitespace) {
        return Err(PointerError::NotLocal(ptr.to_string()));
    }
    Ok(format!("{base}#{target}"))
}

/// Collapses whitespace runs across an inline sequence and trims its ends,
/// merging adjacent text runs and dropping empty ones.
pub fn normalize_inline(content: Vec<Inline>) -> Vec<Inline> {
    let mut merged: Vec<Inline> = Vec::new();
    for item in content {
        match (merged.last_mut(), item) {
            (Some(Inline::Text(prev)), Inline::Text(t)) => prev.push_str(&t),
            (_, item) => merged.push(item),
        }
    }
    let mut out: Vec<Inline> = merged
        .into_iter()
        .map(|i| match i {
            Inline::Text(t) => Inline::Text(collapse_runs(&t)),
            Inline::Foreign { lang, text } => Inline::Foreign { lang, text: collapse_ws(&text) },
        })
        .collect();
    if let Some(Inline::Text(t)) = out.first_mut() {
        *t = t.trim_start().to_string();
    }
    if let Some(Inline::Text(t)) = out.last_mut() {
        *t = t.trim_end().to_string();
    }
    out.retain(|i| !matches!(i, Inline::Text(t) if t.is_empty()));
    out
}

/// Collapses whitespace runs to one space and trims both ends.
pub(crate) fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Collapses whitespace runs to one space, keeping a single leading/trailing space.
fn collapse_runs(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_ws = false;
    for c in s.chars() {
        if c.is_whitespace() {
            if !in_ws {
                out.push(' ');
            }
            in_ws = true;
        } else {
            out.push(c);
            in_ws = false;
        }
    }
    out
}
