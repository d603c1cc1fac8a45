//! Record linkage: catalogue stubs in, candidate pairs and clusters out.

mod cluster;
mod ingest;
mod merge;
mod score;

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EntityUri, IdnoEntry, Locus, ValidationReport, WorkRecord};

pub use cluster::{apply_decisions, effective_edges, Cluster};
pub use ingest::{ingest_catalogue_entries, IngestOutcome, IngestWarning};
pub use merge::{merge_cluster, merge_into};
pub use score::{
    candidate_pairs, classify_candidate, combine_features, generate_candidates, normalize_title, score_candidates,
    score_pair, CandidatePair,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinkageError {
    #[error("NO_FEATURES: no comparable feature between {0} and {1}")]
    NoFeatures(String, String),
    #[error("invalid linkage configuration: {0}")]
    Config(String),
    #[error("unknown candidate ids: {}", .0.join(", "))]
    UnknownCandidates(Vec<String>),
    #[error("MERGE_CONFLICT: idno {scheme} has values {}", .values.join(" / "))]
    MergeConflict { scheme: String, values: Vec<String> },
    #[error("cannot merge into {0}: not a bare work URI")]
    NotWorkUri(EntityUri),
    #[error("catalogue document: {0}")]
    Catalogue(String),
    #[error("merged record is invalid")]
    Invalid(ValidationReport),
}

impl LinkageError {
    pub fn code(&self) -> &'static str {
        match self {
            LinkageError::NoFeatures(..) => "NO_FEATURES",
            LinkageError::Config(_) => "CONFIG_INVALID",
            LinkageError::UnknownCandidates(_) => "UNKNOWN_CANDIDATE",
            LinkageError::MergeConflict { .. } => "MERGE_CONFLICT",
            LinkageError::NotWorkUri(_) => "URI_NOT_WORK",
            LinkageError::Catalogue(_) => "CATALOGUE_INVALID",
            LinkageError::Invalid(_) => "RECORD_INVALID",
        }
    }
}

/// A manuscript location a stub was read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceMs {
    pub manuscript: EntityUri,
    pub locus: Locus,
}

/// A work as described by one catalogue entry, or a summary of an
/// existing record (see [`WorkStub::from_record`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkStub {
    pub stub_id: String,
    /// `(lang, text)` pairs.
    #[serde(default)]
    pub titles: Vec<(String, String)>,
    pub author_uri: Option<EntityUri>,
    pub author_name: Option<String>,
    pub incipit: Option<(String, String)>,
    pub source_ms: Option<SourceMs>,
    #[serde(default)]
    pub idnos: Vec<IdnoEntry>,
    pub provenance: String,
}

impl WorkStub {
    /// Linkage view of a stored record, identified by its URI.
    pub fn from_record(record: &WorkRecord) -> Self {
        let author = record.authors.first();
        WorkStub {
            stub_id: record.uri.to_string(),
            titles: record.titles.iter().map(|t| (t.lang.clone(), t.text())).collect(),
            author_uri: author.map(|a| a.person.clone()),
            author_name: author.map(|a| a.name.display()).filter(|n| !n.is_empty()),
            incipit: record.incipit().map(|s| (s.lang.clone().unwrap_or_default(), s.text.clone())),
            source_ms: None,
            idnos: record.idnos.iter().filter(|i| !i.is_uri()).cloned().collect(),
            provenance: record.uri.to_string(),
        }
    }

    pub fn has_content(&self) -> bool {
        !self.titles.is_empty() || self.incipit.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Auto,
    Review,
    Reject,
}

impl Band {
    pub fn as_str(self) -> &'static str {
        match self {
            Band::Auto => "auto",
            Band::Review => "review",
            Band::Reject => "reject",
        }
    }
}

impl std::str::FromStr for Band {
    type Err = LinkageError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Band::Auto),
            "review" => Ok(Band::Review),
            "reject" => Ok(Band::Reject),
            other => Err(LinkageError::Config(format!("unknown band {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Features {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title_sim: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author_match: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incipit_sim: Option<f64>,
}

/// One line of the candidates file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchCandidate {
    pub candidate_id: String,
    pub left: String,
    pub right: String,
    pub score: f64,
    pub features: Features,
    pub band: Band,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

/// One line of the decisions file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchDecision {
    pub candidate_id: String,
    pub verdict: Verdict,
    pub editor: String,
    pub timestamp: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Weights {
    pub title: f64,
    pub author: f64,
    pub incipit: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { title: 0.5, author: 0.3, incipit: 0.2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub auto: f64,
    pub review: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { auto: 0.85, review: 0.55 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Blocking {
    /// Shared title tokens shorter than this do not form a block.
    pub min_title_token_len: usize,
    pub incipit_prefix_tokens: usize,
}

impl Default for Blocking {
    fn default() -> Self {
        Blocking { min_title_token_len: 4, incipit_prefix_tokens: 5 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkageConfig {
    pub weights: Weights,
    pub thresholds: Thresholds,
    pub blocking: Blocking,
}

impl LinkageConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, LinkageError> {
        let cfg: LinkageConfig = toml::from_str(text).map_err(|e| LinkageError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn validate(&self) -> Result<(), LinkageError> {
        let w = self.weights;
        for (name, v) in [("title", w.title), ("author", w.author), ("incipit", w.incipit)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(LinkageError::Config(format!("weight {name} must be positive, got {v}")));
            }
        }
        let t = self.thresholds;
        if !(0.0..=1.0).contains(&t.auto) || !(0.0..=1.0).contains(&t.review) {
            return Err(LinkageError::Config("thresholds must lie in [0, 1]".into()));
        }
        if t.auto <= t.review {
            return Err(LinkageError::Config(format!(
                "auto threshold {} must exceed review threshold {}",
                t.auto, t.review
            )));
        }
        if self.blocking.incipit_prefix_tokens == 0 {
            return Err(LinkageError::Config("incipit_prefix_tokens must be at least 1".into()));
        }
        Ok(())
    }
}

/// Parses JSON-lines text, skipping blank lines.
pub fn read_jsonl<T: serde::de::DeserializeOwned>(text: &str) -> Result<Vec<T>, (usize, serde_json::Error)> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| (i + 1, e)))
        .collect()
}

pub fn write_jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("linkage types serialize"));
        out.push('\n');
    }
    out
}

/// Candidate id for an unordered pair.
pub fn candidate_id(a: &str, b: &str) -> String {
    let (l, r) = if a <= b { (a, b) } else { (b, a) };
    format!("{l}|{r}")
}

/// Stubs keyed by id, for lookups after clustering.
pub fn index_stubs(stubs: &[WorkStub]) -> BTreeMap<&str, &WorkStub> {
    stubs.iter().map(|s| (s.stub_id.as_str(), s)).collect()
}
