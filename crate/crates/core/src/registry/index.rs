use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::linkage::normalize_title;
use crate::model::{EntityUri, WorkRecord};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexEntry {
    pub file: String,
    pub display_title: Option<String>,
    /// `(lang, normalized tokens)` per title.
    pub titles: Vec<(String, BTreeSet<String>)>,
}

/// Derived lookup tables; rebuildable from the record files alone.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Index {
    pub entries: BTreeMap<u64, IndexEntry>,
    pub tokens: BTreeMap<String, BTreeSet<u64>>,
    pub idnos: BTreeMap<(String, String), EntityUri>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchHit {
    pub uri: EntityUri,
    pub headword: Option<String>,
    pub score: f64,
}

fn query_tokens(query: &str) -> BTreeSet<String> {
    normalize_title(query, "").into_iter().filter(|t| t.chars().count() >= 2).collect()
}

fn lang_matches(title_lang: &str, wanted: &str) -> bool {
    title_lang == wanted || title_lang.strip_prefix(wanted).is_some_and(|rest| rest.starts_with('-'))
}

impl Index {
    pub(crate) fn insert(&mut self, record: &WorkRecord, file: String) {
        let id = record.uri.id;
        let titles: Vec<(String, BTreeSet<String>)> = record
            .titles
            .iter()
            .map(|t| (t.lang.clone(), normalize_title(&t.text(), &t.lang).into_iter().collect()))
            .collect();
        for (_, toks) in &titles {
            for tok in toks {
                self.tokens.entry(tok.clone()).or_default().insert(id);
            }
        }
        for i in &record.idnos {
            self.idnos.insert((i.scheme.clone(), i.value.clone()), record.uri.clone());
        }
        self.entries.insert(id, IndexEntry { file, display_title: record.display_title(), titles });
    }

    pub(crate) fn remove(&mut self, id: u64) {
        if self.entries.remove(&id).is_none() {
            return;
        }
        self.tokens.retain(|_, ids| {
            ids.remove(&id);
            !ids.is_empty()
        });
        self.idnos.retain(|_, uri| uri.id != id);
    }

    /// Another record already holding one of this record's idnos.
    pub(crate) fn idno_conflict(&self, record: &WorkRecord) -> Option<EntityUri> {
        self.conflicting_idno(record).map(|k| self.idnos[&k].clone())
    }

    pub(crate) fn conflicting_idno(&self, record: &WorkRecord) -> Option<(String, String)> {
        record
            .idnos
            .iter()
            .map(|i| (i.scheme.clone(), i.value.clone()))
            .find(|k| self.idnos.get(k).is_some_and(|owner| *owner != record.uri))
    }

    /// Ranks records by the best fraction of query tokens found in one title.
    /// Tokens shorter than two characters are ignored.
    pub fn search(&self, query: &str, lang: Option<&str>) -> Vec<SearchHit> {
        let q = query_tokens(query);
        if q.is_empty() {
            return Vec::new();
        }
        let candidates: BTreeSet<u64> = q.iter().filter_map(|t| self.tokens.get(t)).flatten().copied().collect();
        let mut hits: Vec<SearchHit> = candidates
            .into_iter()
            .filter_map(|id| {
                let entry = &self.entries[&id];
                let best = entry
                    .titles
                    .iter()
                    .filter(|(l, _)| lang.is_none_or(|want| lang_matches(l, want)))
                    .map(|(_, toks)| q.intersection(toks).count())
                    .max()
                    .unwrap_or(0);
                (best > 0).then(|| SearchHit {
                    uri: EntityUri::work(id),
                    headword: entry.display_title.clone(),
                    score: best as f64 / q.len() as f64,
                })
            })
            .collect();
        hits.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.uri.id.cmp(&b.uri.id)));
        hits
    }
}
