use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::Serialize;
use thiserror::Error;

use super::Registry;
use crate::linkage::{
    apply_decisions, read_jsonl, Band, Cluster, LinkageError, MatchCandidate, MatchDecision, SourceMs, Verdict,
    WorkStub,
};
use crate::model::EntityUri;

pub const CANDIDATES_FILE: &str = "candidates.jsonl";
pub const STUBS_FILE: &str = "stubs.jsonl";
pub const DECISIONS_FILE: &str = "decisions.jsonl";

#[derive(Debug, Error)]
pub enum ReviewError {
    #[error("unknown candidate {0}")]
    UnknownCandidate(String),
    #[error("{editor} already recorded {existing:?} for {candidate_id}")]
    Conflict { candidate_id: String, editor: String, existing: Verdict },
    #[error("{0}")]
    BadRequest(String),
    #[error("review data is read-only")]
    ReadOnly,
    #[error("{path} line {line}: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Linkage(#[from] LinkageError),
}

impl ReviewError {
    pub fn code(&self) -> &'static str {
        match self {
            ReviewError::UnknownCandidate(_) => "UNKNOWN_CANDIDATE",
            ReviewError::Conflict { .. } => "DECISION_CONFLICT",
            ReviewError::BadRequest(_) => "BAD_REQUEST",
            ReviewError::ReadOnly => "READ_ONLY",
            ReviewError::Corrupt { .. } => "REVIEW_CORRUPT",
            ReviewError::Io { .. } => "IO_ERROR",
            ReviewError::Linkage(e) => e.code(),
        }
    }
}

/// What an editor sees of one side of a candidate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideContext {
    pub id: String,
    /// `stub`, `work`, or `missing` when neither file nor registry knows the id.
    pub source: &'static str,
    pub titles: Vec<(String, String)>,
    pub author_uri: Option<EntityUri>,
    pub author_name: Option<String>,
    pub incipit: Option<(String, String)>,
    pub source_ms: Option<SourceMs>,
}

impl SideContext {
    fn from_stub(stub: &WorkStub, source: &'static str) -> Self {
        SideContext {
            id: stub.stub_id.clone(),
            source,
            titles: stub.titles.clone(),
            author_uri: stub.author_uri.clone(),
            author_name: stub.author_name.clone(),
            incipit: stub.incipit.clone(),
            source_ms: stub.source_ms.clone(),
        }
    }

    fn missing(id: &str) -> Self {
        SideContext {
            id: id.to_string(),
            source: "missing",
            titles: Vec::new(),
            author_uri: None,
            author_name: None,
            incipit: None,
            source_ms: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReviewStatus {
    Pending,
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueueItem {
    #[serde(flatten)]
    pub candidate: MatchCandidate,
    pub status: ReviewStatus,
    pub left_context: SideContext,
    pub right_context: SideContext,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecideOutcome {
    Recorded(MatchDecision),
    /// The editor's latest decision already had this verdict.
    Unchanged(MatchDecision),
}

/// Candidates, stubs and the append-only decision log under one directory.
#[derive(Debug)]
pub struct ReviewStore {
    dir: PathBuf,
    read_only: bool,
    candidates: Vec<MatchCandidate>,
    by_id: HashMap<String, usize>,
    stubs: BTreeMap<String, WorkStub>,
    decisions: Mutex<Vec<MatchDecision>>,
}

fn load_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, ReviewError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(source) => return Err(ReviewError::Io { path: path.to_path_buf(), source }),
    };
    read_jsonl(&text).map_err(|(line, e)| ReviewError::Corrupt {
        path: path.to_path_buf(),
        line,
        message: e.to_string(),
    })
}

/// Each editor's latest decision for one candidate; later entries win ties.
fn latest_by_editor<'a>(decisions: &'a [MatchDecision], candidate_id: &str) -> BTreeMap<&'a str, &'a MatchDecision> {
    let mut latest: BTreeMap<&str, &MatchDecision> = BTreeMap::new();
    for d in decisions.iter().filter(|d| d.candidate_id == candidate_id) {
        match latest.get(d.editor.as_str()) {
            Some(prev) if prev.timestamp > d.timestamp => {}
            _ => {
                latest.insert(&d.editor, d);
            }
        }
    }
    latest
}

impl ReviewStore {
    /// Loads `candidates.jsonl`, `stubs.jsonl` and `decisions.jsonl` from
    /// `dir`; missing files count as empty.
    pub fn load(dir: impl AsRef<Path>, read_only: bool) -> Result<Self, ReviewError> {
        let dir = dir.as_ref().to_path_buf();
        let candidates: Vec<MatchCandidate> = load_file(&dir.join(CANDIDATES_FILE))?;
        let stubs: Vec<WorkStub> = load_file(&dir.join(STUBS_FILE))?;
        let decisions: Vec<MatchDecision> = load_file(&dir.join(DECISIONS_FILE))?;
        let by_id = candidates.iter().enumerate().map(|(i, c)| (c.candidate_id.clone(), i)).collect();
        Ok(ReviewStore {
            dir,
            read_only,
            candidates,
            by_id,
            stubs: stubs.into_iter().map(|s| (s.stub_id.clone(), s)).collect(),
            decisions: Mutex::new(decisions),
        })
    }

    pub fn candidates(&self) -> &[MatchCandidate] {
        &self.candidates
    }

    pub fn decisions(&self) -> Vec<MatchDecision> {
        self.lock().clone()
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Vec<MatchDecision>> {
        self.decisions.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn status(decisions: &[MatchDecision], candidate_id: &str) -> ReviewStatus {
        let latest = latest_by_editor(decisions, candidate_id);
        if latest.values().any(|d| d.verdict == Verdict::Reject) {
            ReviewStatus::Rejected
        } else if latest.is_empty() {
            ReviewStatus::Pending
        } else {
            ReviewStatus::Accepted
        }
    }

    /// Resolves an id against the stub file, then the registry.
    pub fn side(&self, id: &str, registry: &Registry) -> SideContext {
        if let Some(stub) = self.stubs.get(id) {
            return SideContext::from_stub(stub, "stub");
        }
        EntityUri::parse(id)
            .ok()
            .and_then(|uri| registry.get_record(&uri).ok())
            .map(|r| SideContext::from_stub(&WorkStub::from_record(&r), "work"))
            .unwrap_or_else(|| SideContext::missing(id))
    }

    /// Candidates in `band`, highest score first, ties by id.
    pub fn queue(&self, band: Band, registry: &Registry) -> Vec<QueueItem> {
        let decisions = self.lock().clone();
        let mut items: Vec<&MatchCandidate> = self.candidates.iter().filter(|c| c.band == band).collect();
        items.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.candidate_id.cmp(&b.candidate_id)));
        items
            .into_iter()
            .map(|c| QueueItem {
                candidate: c.clone(),
                status: Self::status(&decisions, &c.candidate_id),
                left_context: self.side(&c.left, registry),
                right_context: self.side(&c.right, registry),
            })
            .collect()
    }

    /// Records a verdict. Repeating the editor's current verdict is a no-op;
    /// changing it requires `override_previous`.
    pub fn decide(
        &self,
        candidate_id: &str,
        verdict: Verdict,
        editor: &str,
        override_previous: bool,
        now: DateTime<Utc>,
    ) -> Result<DecideOutcome, ReviewError> {
        if editor.trim().is_empty() {
            return Err(ReviewError::BadRequest("editor must not be empty".into()));
        }
        if !self.by_id.contains_key(candidate_id) {
            return Err(ReviewError::UnknownCandidate(candidate_id.to_string()));
        }
        if self.read_only {
            return Err(ReviewError::ReadOnly);
        }
        let mut decisions = self.lock();
        if let Some(prev) = latest_by_editor(&decisions, candidate_id).get(editor) {
            if prev.verdict == verdict {
                return Ok(DecideOutcome::Unchanged((*prev).clone()));
            }
            if !override_previous {
                return Err(ReviewError::Conflict {
                    candidate_id: candidate_id.to_string(),
                    editor: editor.to_string(),
                    existing: prev.verdict,
                });
            }
        }
        // keep the log ordered so that the new entry is the latest
        let timestamp = decisions
            .iter()
            .filter(|d| d.candidate_id == candidate_id && d.editor == editor)
            .map(|d| d.timestamp)
            .max()
            .map_or(now, |t| t.max(now));
        let decision =
            MatchDecision { candidate_id: candidate_id.to_string(), verdict, editor: editor.to_string(), timestamp };
        let path = self.dir.join(DECISIONS_FILE);
        let io = |source| ReviewError::Io { path: path.clone(), source };
        fs::create_dir_all(&self.dir).map_err(io)?;
        let mut line = serde_json::to_string(&decision).expect("decision serializes");
        line.push('\n');
        let mut f = fs::OpenOptions::new().create(true).append(true).open(&path).map_err(io)?;
        f.write_all(line.as_bytes()).map_err(io)?;
        f.sync_data().map_err(io)?;
        decisions.push(decision.clone());
        Ok(DecideOutcome::Recorded(decision))
    }

    /// Clusters with more than one member under the current decisions.
    pub fn clusters(&self) -> Result<Vec<Cluster>, ReviewError> {
        let decisions = self.lock().clone();
        let items: Vec<String> = self.stubs.keys().cloned().collect();
        let clusters = apply_decisions(&items, &self.candidates, &decisions)?;
        Ok(clusters.into_iter().filter(|c| c.members.len() > 1).collect())
    }

    pub fn stub_ids(&self) -> BTreeSet<&str> {
        self.stubs.keys().map(String::as_str).collect()
    }
}
