use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::lang::is_syc;
use super::{normalize_lang, EntityKind, EntityUri, LocalPointer, RelRef, TitleTag, WorkRecord};
use crate::rdf::NamespaceTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ValidationItem {
    pub severity: Severity,
    pub code: String,
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub items: Vec<ValidationItem>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        !self.items.iter().any(|i| i.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &ValidationItem> {
        self.items.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.items.iter().any(|i| i.code == code)
    }

    pub fn push(&mut self, severity: Severity, code: &str, path: impl Into<String>, message: impl Into<String>) {
        self.items.push(ValidationItem {
            severity,
            code: code.to_string(),
            path: path.into(),
            message: message.into(),
        });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.items.extend(other.items);
        self.sort();
    }

    pub(crate) fn sort(&mut self) {
        self.items.sort_by(|a, b| {
            (&a.path, &a.code, &a.message, a.severity).cmp(&(&b.path, &b.code, &b.message, b.severity))
        });
    }
}

/// Checks every record-level invariant against the default namespace table.
pub fn validate_record(record: &WorkRecord) -> ValidationReport {
    validate_record_with(record, &NamespaceTable::default())
}

pub fn validate_record_with(record: &WorkRecord, ns: &NamespaceTable) -> ValidationReport {
    let mut v = Validator {
        record,
        ns,
        witness_ids: record.witnesses.iter().map(|w| w.local_id.as_str()).collect(),
        report: ValidationReport::default(),
    };
    v.run();
    v.report.sort();
    v.report
}

struct Validator<'a> {
    record: &'a WorkRecord,
    ns: &'a NamespaceTable,
    witness_ids: HashSet<&'a str>,
    report: ValidationReport,
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn int_pair(from: &str, to: &str) -> Option<(u64, u64)> {
    Some((from.parse().ok()?, to.parse().ok()?))
}

impl<'a> Validator<'a> {
    fn error(&mut self, code: &str, path: impl Into<String>, message: impl Into<String>) {
        self.report.push(Severity::Error, code, path, message);
    }

    fn warn(&mut self, code: &str, path: impl Into<String>, message: impl Into<String>) {
        self.report.push(Severity::Warning, code, path, message);
    }

    fn run(&mut self) {
        let r = self.record;
        if r.uri.kind != EntityKind::Work || r.uri.fragment.is_some() {
            self.error("URI_NOT_WORK", "uri", format!("{} is not a work URI", r.uri));
        }
        self.check_idnos();
        self.check_titles();
        self.check_authors();
        if let Some(tl) = &r.text_lang {
            self.lang("text_lang.main_lang", &tl.main_lang);
            self.sources("text_lang", &tl.sources);
        }
        self.check_notes();
        self.check_witnesses();
        self.check_relations();
        self.check_xml_ids();
    }

    fn lang(&mut self, path: &str, tag: &str) {
        match normalize_lang(tag) {
            Err(e) => self.error("LANG_INVALID", path, e.to_string()),
            Ok(_) if is_syc(tag) => self.warn(
                "LANG_SYC",
                path,
                format!("language tag {tag:?} should use the Syriac macrolanguage code \"syr\""),
            ),
            Ok(_) => {}
        }
    }

    fn sources(&mut self, path: &str, sources: &[LocalPointer]) {
        for (i, p) in sources.iter().enumerate() {
            if !self.witness_ids.contains(p.target_id()) {
                self.error(
                    "SOURCE_UNRESOLVED",
                    format!("{path}.sources[{i}]"),
                    format!("{p} does not match any witness"),
                );
            }
        }
    }

    fn check_idnos(&mut self) {
        let r = self.record;
        let uri_idnos: Vec<_> = r.idnos.iter().enumerate().filter(|(_, i)| i.is_uri()).collect();
        match uri_idnos.len() {
            0 => self.error("MODEL_NO_URI", "idnos", "no idno of type URI"),
            1 => {}
            n => self.error("IDNO_URI_DUP", "idnos", format!("{n} idnos of type URI")),
        }
        for (i, idno) in uri_idnos {
            match EntityUri::parse(&idno.value) {
                Ok(u) if u.kind == EntityKind::Work && u.fragment.is_none() => {
                    if u != r.uri {
                        self.error(
                            "IDNO_URI_MISMATCH",
                            format!("idnos[{i}]"),
                            format!("{} differs from record URI {}", u, r.uri),
                        );
                    }
                }
                _ => {
                    self.error("IDNO_URI_INVALID", format!("idnos[{i}]"), format!("{:?} is not a work URI", idno.value))
                }
            }
        }
        for (i, idno) in r.idnos.iter().enumerate() {
            if idno.scheme.trim().is_empty() || idno.value.trim().is_empty() {
                self.error("IDNO_EMPTY", format!("idnos[{i}]"), "idno with empty type or value");
            }
        }
    }

    fn check_titles(&mut self) {
        let mut headwords: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, t) in self.record.titles.iter().enumerate() {
            let path = format!("titles[{i}]");
            if t.lang.is_empty() {
                self.error("TITLE_NO_LANG", &path, "title without xml:lang");
            } else {
                self.lang(&format!("{path}.lang"), &t.lang);
            }
            for (j, inline) in t.content.iter().enumerate() {
                if let super::Inline::Foreign { lang, .. } = inline {
                    self.lang(&format!("{path}.content[{j}].lang"), lang);
                }
            }
            if collapse_ws(&t.text()).is_empty() {
                self.error("TITLE_EMPTY", &path, "title text is empty");
            }
            for tag in &t.tags {
                if let TitleTag::Other(tok) = tag {
                    self.warn("TAG_UNKNOWN", &path, format!("unrecognised syriaca-tags token {tok:?}"));
                }
            }
            if t.is_headword() {
                *headwords.entry(t.lang.as_str()).or_default() += 1;
            }
            self.sources(&path, &t.sources);
        }
        for (lang, n) in headwords {
            if n > 1 {
                self.error("HEADWORD_DUP", "titles", format!("{n} headword titles for language {lang:?}"));
            }
        }
    }

    fn check_authors(&mut self) {
        for (i, a) in self.record.authors.iter().enumerate() {
            let path = format!("authors[{i}]");
            if a.person.kind != EntityKind::Person {
                self.error("AUTHOR_NOT_PERSON", &path, format!("{} is not a person URI", a.person));
            }
            self.sources(&path, &a.sources);
        }
    }

    fn check_notes(&mut self) {
        for (i, n) in self.record.notes.iter().enumerate() {
            let path = format!("notes[{i}]");
            if n.note_type.is_excerpt() && !n.quoted {
                self.error(
                    "NOTE_UNQUOTED",
                    &path,
                    format!("{} note must wrap its excerpt in a quotation", n.note_type.as_str()),
                );
            }
            if n.segments.is_empty() || n.segments.iter().any(|s| collapse_ws(&s.text).is_empty()) {
                self.error("NOTE_EMPTY", &path, "note with empty text");
            }
            if n.segments.len() > 1 && n.segments.iter().any(|s| s.lang.is_none()) {
                self.error("NOTE_SEG_NO_LANG", &path, "multilingual note segment without xml:lang");
            }
            for (j, s) in n.segments.iter().enumerate() {
                if let Some(l) = &s.lang {
                    self.lang(&format!("{path}.segments[{j}].lang"), l);
                }
            }
            self.sources(&path, &n.sources);
        }
    }

    fn check_witnesses(&mut self) {
        let mut seen = HashSet::new();
        for (i, w) in self.record.witnesses.iter().enumerate() {
            let path = format!("witnesses[{i}]");
            if w.local_id.is_empty() {
                self.error("WITNESS_NO_ID", &path, "witness without xml:id");
            } else if !seen.insert(w.local_id.as_str()) {
                self.error("WITNESS_ID_DUP", &path, format!("duplicate witness id {:?}", w.local_id));
            }
            match w.witness_class.split_once(':') {
                Some((prefix, local)) if !prefix.is_empty() && !local.is_empty() => {
                    if self.ns.get(prefix).is_none() {
                        self.error("WITNESS_CLASS_UNBOUND", &path, format!("class prefix {prefix:?} is not bound"));
                    }
                }
                _ => self.error(
                    "WITNESS_CLASS_INVALID",
                    &path,
                    format!("witness class {:?} is not a CURIE", w.witness_class),
                ),
            }
            if let Some(ptr) = &w.record_ptr {
                if !matches!(ptr.kind, EntityKind::Bibl | EntityKind::Manuscript) {
                    self.error("WITNESS_PTR_KIND", &path, format!("{ptr} is not a bibl or manuscript URI"));
                }
            }
            if let Some(t) = &w.title {
                if let Some(l) = &t.lang {
                    self.lang(&format!("{path}.title.lang"), l);
                }
            }
            if let Some(l) = &w.text_lang {
                self.lang(&format!("{path}.text_lang"), l);
            }
            for (j, cr) in w.cited_ranges.iter().enumerate() {
                if let Some((from, to)) = int_pair(&cr.from, &cr.to) {
                    if from > to {
                        self.error(
                            "RANGE_REVERSED",
                            format!("{path}.cited_ranges[{j}]"),
                            format!("from {from} exceeds to {to}"),
                        );
                    }
                }
            }
            if let Some(ms) = &w.ms_identifier {
                if ms.uri.kind != EntityKind::Manuscript {
                    self.error("MS_URI_KIND", &path, format!("{} is not a manuscript URI", ms.uri));
                }
                if let Some(Some(l)) = ms.collection.as_ref().map(|c| &c.lang) {
                    self.lang(&format!("{path}.ms_identifier.collection.lang"), l);
                }
            }
            if let Some(locus) = &w.locus {
                if let Some((from, to)) = int_pair(&locus.from, &locus.to) {
                    if from > to {
                        self.error("RANGE_REVERSED", format!("{path}.locus"), format!("from {from} exceeds to {to}"));
                    }
                }
                if let Some(part) = &locus.part_uri {
                    if part.kind != EntityKind::Manuscript {
                        self.error("MS_URI_KIND", format!("{path}.locus"), format!("{part} is not a manuscript URI"));
                    }
                }
            }
            if w.is_manuscript() {
                if w.locus.is_none() {
                    self.error("MS_NO_LOCUS", &path, "manuscript witness without a locus");
                }
            } else if w.cited_ranges.is_empty() {
                self.warn("PUB_NO_RANGE", &path, "publication witness without citedRange");
            }
        }
    }

    fn check_relations(&mut self) {
        for (i, rel) in self.record.relations.iter().enumerate() {
            let path = format!("relations[{i}]");
            if rel.subjects.is_empty() || rel.objects.is_empty() {
                self.error("REL_EMPTY", &path, "relation needs at least one active and one passive reference");
            }
            match rel.predicate.split_once(':') {
                Some((prefix, local)) if !prefix.is_empty() && !local.is_empty() && !local.starts_with("//") => {
                    if self.ns.get(prefix).is_none() {
                        self.error("PREDICATE_UNBOUND", &path, format!("predicate prefix {prefix:?} is not bound"));
                    }
                }
                _ => self.error("PREDICATE_INVALID", &path, format!("predicate {:?} is not a CURIE", rel.predicate)),
            }
            let locals = rel.subjects.iter().chain(&rel.objects).filter_map(RelRef::as_local);
            let unresolved: BTreeSet<String> =
                locals.filter(|p| !self.witness_ids.contains(p.target_id())).map(ToString::to_string).collect();
            for p in unresolved {
                self.error("REL_POINTER_UNRESOLVED", &path, format!("{p} does not match any witness"));
            }
            self.sources(&path, &rel.sources);
        }
    }

    fn check_xml_ids(&mut self) {
        let r = self.record;
        let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
        let ids = r
            .titles
            .iter()
            .map(|t| t.local_id.as_str())
            .chain(r.witnesses.iter().map(|w| w.local_id.as_str()))
            .chain(r.relations.iter().filter_map(|rel| rel.local_id.as_deref()))
            .filter(|id| !id.is_empty());
        for id in ids {
            *seen.entry(id).or_default() += 1;
        }
        let work_id = format!("work-{}", r.uri.id);
        if let Some(n) = seen.get_mut(work_id.as_str()) {
            *n += 1;
        }
        for (id, n) in seen {
            if n > 1 {
                self.error("XMLID_DUP", "record", format!("xml:id {id:?} used {n} times"));
            }
        }
    }
}
