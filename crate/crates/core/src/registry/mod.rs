//! File-backed work registry: one `work/{id}.xml` per record, derived
//! in-memory indexes, and a sequential URI allocator persisted in `ids.json`.

pub mod http;
mod index;
mod lint;
mod review;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use thiserror::Error;

use crate::model::{validate_record, EntityKind, EntityUri, ValidationReport, WorkRecord};
use crate::rdf::NamespaceTable;
use crate::tei::{parse_work_record, serialize_work_record, TeiError};

pub use index::{Index, IndexEntry, SearchHit};
pub use lint::{inverse_predicate, lint_corpus_directionality, DirectionalityViolation, ViolationKind};
pub use review::{
    DecideOutcome, QueueItem, ReviewError, ReviewStatus, ReviewStore, SideContext, CANDIDATES_FILE, DECISIONS_FILE,
    STUBS_FILE,
};

const IDS_FILE: &str = "ids.json";

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("NOT_FOUND: {0}")]
    NotFound(String),
    #[error("registry is read-only")]
    ReadOnly,
    #[error("record is invalid")]
    Invalid(ValidationReport),
    #[error("idno {scheme} {value:?} already belongs to {owner}")]
    IdnoConflict { scheme: String, value: String, owner: EntityUri },
    #[error("{path}: {message}")]
    Corrupt { path: PathBuf, message: String },
    #[error("{0} is not a bare work URI")]
    NotWorkUri(EntityUri),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RegistryError {
    pub fn code(&self) -> &'static str {
        match self {
            RegistryError::NotFound(_) => "NOT_FOUND",
            RegistryError::ReadOnly => "READ_ONLY",
            RegistryError::Invalid(_) => "RECORD_INVALID",
            RegistryError::IdnoConflict { .. } => "IDNO_CONFLICT",
            RegistryError::Corrupt { .. } => "REGISTRY_CORRUPT",
            RegistryError::NotWorkUri(_) => "URI_NOT_WORK",
            RegistryError::Io { .. } => "IO_ERROR",
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RegistryError + '_ {
    move |source| RegistryError::Io { path: path.to_path_buf(), source }
}

/// Writes `bytes` to a sibling temp file, syncs it, and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RegistryError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io_err(path))
}

#[derive(Debug)]
struct State {
    index: Index,
    next_ids: BTreeMap<EntityKind, u64>,
}

#[derive(Debug)]
pub struct Registry {
    root: PathBuf,
    read_only: bool,
    state: RwLock<State>,
}

impl Registry {
    /// Opens (creating if needed) a writable registry rooted at `root`.
    pub fn open(root: impl AsRef<Path>) -> Result<Self, RegistryError> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(root.join("work")).map_err(io_err(&root))?;
        Self::load(root, false)
    }

    pub fn open_read_only(root: impl AsRef<Path>) -> Result<Self, RegistryError> {
        let root = root.as_ref().to_path_buf();
        if !root.is_dir() {
            return Err(RegistryError::NotFound(root.display().to_string()));
        }
        Self::load(root, true)
    }

    fn load(root: PathBuf, read_only: bool) -> Result<Self, RegistryError> {
        let index = Self::scan(&root)?;
        let ids_path = root.join(IDS_FILE);
        let mut next_ids: BTreeMap<EntityKind, u64> = match fs::read_to_string(&ids_path) {
            Ok(text) => serde_json::from_str(&text)
                .map_err(|e| RegistryError::Corrupt { path: ids_path.clone(), message: e.to_string() })?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(io_err(&ids_path)(e)),
        };
        for kind in EntityKind::ALL {
            next_ids.entry(kind).or_insert(1);
        }
        if let Some(max) = index.entries.keys().next_back() {
            let next = next_ids.get_mut(&EntityKind::Work).expect("seeded above");
            *next = (*next).max(max + 1);
        }
        Ok(Registry { root, read_only, state: RwLock::new(State { index, next_ids }) })
    }

    /// Builds an index from the files under `root/work`.
    pub fn scan(root: &Path) -> Result<Index, RegistryError> {
        let dir = root.join("work");
        let mut index = Index::default();
        let entries = match fs::read_dir(&dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(index),
            Err(e) => return Err(io_err(&dir)(e)),
        };
        let mut paths: Vec<PathBuf> =
            entries.map(|e| e.map(|e| e.path()).map_err(io_err(&dir))).collect::<Result<_, _>>()?;
        paths.sort();
        for path in paths {
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
            if name.starts_with('.') || !name.ends_with(".xml") {
                continue;
            }
            let corrupt = |message: String| RegistryError::Corrupt { path: path.clone(), message };
            let id: u64 =
                name.trim_end_matches(".xml").parse().map_err(|_| corrupt("file name is not {id}.xml".into()))?;
            let text = fs::read_to_string(&path).map_err(io_err(&path))?;
            let record = parse_work_record(&text).map_err(|e| corrupt(e.to_string()))?;
            if record.uri.id != id {
                return Err(corrupt(format!("file holds {}", record.uri)));
            }
            if index.entries.contains_key(&id) {
                return Err(corrupt(format!("duplicate record for {}", record.uri)));
            }
            if let Some(owner) = index.idno_conflict(&record) {
                return Err(corrupt(format!("idno already used by {owner}")));
            }
            index.insert(&record, name.to_string());
        }
        Ok(index)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn is_read_only(&self) -> bool {
        self.read_only
    }

    fn record_path(&self, id: u64) -> PathBuf {
        self.root.join("work").join(format!("{id}.xml"))
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, State> {
        self.state.read().unwrap_or_else(|p| p.into_inner())
    }

    fn write(&self) -> std::sync::RwLockWriteGuard<'_, State> {
        self.state.write().unwrap_or_else(|p| p.into_inner())
    }

    fn persist_ids(&self, next_ids: &BTreeMap<EntityKind, u64>) -> Result<(), RegistryError> {
        let text = serde_json::to_string_pretty(next_ids).expect("id table serializes");
        write_atomic(&self.root.join(IDS_FILE), text.as_bytes())
    }

    /// Allocates the next id of `kind`. Ids are never handed out twice.
    pub fn mint_uri(&self, kind: EntityKind) -> Result<EntityUri, RegistryError> {
        if self.read_only {
            return Err(RegistryError::ReadOnly);
        }
        let mut state = self.write();
        let id = state.next_ids[&kind];
        let mut next = state.next_ids.clone();
        next.insert(kind, id + 1);
        self.persist_ids(&next)?;
        state.next_ids = next;
        Ok(EntityUri::new(kind, id))
    }

    pub fn next_id(&self, kind: EntityKind) -> u64 {
        self.read().next_ids[&kind]
    }

    /// Validates and stores a record, replacing any earlier version.
    /// Returns `true` when the URI was new.
    pub fn put_record(&self, record: &WorkRecord) -> Result<bool, RegistryError> {
        if self.read_only {
            return Err(RegistryError::ReadOnly);
        }
        let report = validate_record(record);
        if !report.is_valid() {
            return Err(RegistryError::Invalid(report));
        }
        let xml = serialize_work_record(record).map_err(|e| match e {
            TeiError::Invalid(r) => RegistryError::Invalid(r),
            other => RegistryError::Corrupt { path: self.record_path(record.uri.id), message: other.to_string() },
        })?;

        let mut state = self.write();
        if let Some(owner) = state.index.idno_conflict(record) {
            let (scheme, value) = state.index.conflicting_idno(record).expect("conflict found above");
            return Err(RegistryError::IdnoConflict { scheme, value, owner });
        }
        let id = record.uri.id;
        write_atomic(&self.record_path(id), xml.as_bytes())?;
        let created = !state.index.entries.contains_key(&id);
        state.index.remove(id);
        state.index.insert(record, format!("{id}.xml"));
        if id >= state.next_ids[&EntityKind::Work] {
            let mut next = state.next_ids.clone();
            next.insert(EntityKind::Work, id + 1);
            self.persist_ids(&next)?;
            state.next_ids = next;
        }
        Ok(created)
    }

    pub fn get_record(&self, uri: &EntityUri) -> Result<WorkRecord, RegistryError> {
        if uri.kind != EntityKind::Work || uri.fragment.is_some() {
            return Err(RegistryError::NotWorkUri(uri.clone()));
        }
        let state = self.read();
        if !state.index.entries.contains_key(&uri.id) {
            return Err(RegistryError::NotFound(uri.to_string()));
        }
        let path = self.record_path(uri.id);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        parse_work_record(&text).map_err(|e| RegistryError::Corrupt { path, message: e.to_string() })
    }

    /// Canonical TEI text of a stored record.
    pub fn get_tei(&self, uri: &EntityUri) -> Result<String, RegistryError> {
        let state = self.read();
        if uri.kind != EntityKind::Work || !state.index.entries.contains_key(&uri.id) {
            return Err(RegistryError::NotFound(uri.to_string()));
        }
        let path = self.record_path(uri.id);
        fs::read_to_string(&path).map_err(io_err(&path))
    }

    /// Removes a record. Its id stays retired.
    pub fn delete_record(&self, uri: &EntityUri) -> Result<(), RegistryError> {
        if self.read_only {
            return Err(RegistryError::ReadOnly);
        }
        let mut state = self.write();
        if uri.kind != EntityKind::Work || !state.index.entries.contains_key(&uri.id) {
            return Err(RegistryError::NotFound(uri.to_string()));
        }
        let path = self.record_path(uri.id);
        fs::remove_file(&path).map_err(io_err(&path))?;
        state.index.remove(uri.id);
        Ok(())
    }

    pub fn lookup_idno(&self, scheme: &str, value: &str) -> Option<EntityUri> {
        self.read().index.idnos.get(&(scheme.to_string(), value.to_string())).cloned()
    }

    pub fn search_titles(&self, query: &str, lang: Option<&str>) -> Vec<SearchHit> {
        self.read().index.search(query, lang)
    }

    pub fn uris(&self) -> Vec<EntityUri> {
        self.read().index.entries.keys().map(|&id| EntityUri::work(id)).collect()
    }

    pub fn len(&self) -> usize {
        self.read().index.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index_snapshot(&self) -> Index {
        self.read().index.clone()
    }

    /// Re-reads every file and returns the resulting index.
    pub fn rebuild_index(&self) -> Result<Index, RegistryError> {
        let _guard = self.read();
        Self::scan(&self.root)
    }

    pub fn records(&self) -> Result<Vec<WorkRecord>, RegistryError> {
        self.uris().iter().map(|u| self.get_record(u)).collect()
    }

    pub fn lint_directionality(&self, ns: &NamespaceTable) -> Result<Vec<DirectionalityViolation>, RegistryError> {
        Ok(lint_corpus_directionality(&self.records()?, ns))
    }
}
