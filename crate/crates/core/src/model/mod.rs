//! Domain types for work records and their witnesses and relations.

mod lang;
mod uri;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use lang::{normalize_lang, LangError};
pub use uri::{check_absolute_iri, uri_kind, EntityKind, EntityUri, UriError, UriKind, AUTHORITY};
pub use validate::{validate_record, validate_record_with, Severity, ValidationItem, ValidationReport};

/// A `#id` reference to an element inside the same record.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalPointer(String);

impl LocalPointer {
    /// Parses `#target`. The target must be non-empty and free of whitespace.
    pub fn parse(s: &str) -> Option<Self> {
        let target = s.strip_prefix('#')?;
        Self::new(target)
    }

    pub fn new(target: &str) -> Option<Self> {
        if target.is_empty() || target.contains('#') || target.chars().any(char::is_whitespace) {
            None
        } else {
            Some(LocalPointer(target.to_string()))
        }
    }

    pub fn target_id(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LocalPointer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl Serialize for LocalPointer {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LocalPointer {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        LocalPointer::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad local pointer {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TitleTag {
    Headword,
    Anglicized,
    /// Unrecognised token, kept verbatim (including any leading `#`).
    Other(String),
}

impl TitleTag {
    pub fn from_token(token: &str) -> Self {
        match token {
            "#syriaca-headword" => TitleTag::Headword,
            "#syriaca-anglicized" => TitleTag::Anglicized,
            other => TitleTag::Other(other.to_string()),
        }
    }

    pub fn token(&self) -> &str {
        match self {
            TitleTag::Headword => "#syriaca-headword",
            TitleTag::Anglicized => "#syriaca-anglicized",
            TitleTag::Other(s) => s,
        }
    }
}

impl Serialize for TitleTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.token())
    }
}

impl<'de> Deserialize<'de> for TitleTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(TitleTag::from_token(&String::deserialize(deserializer)?))
    }
}

/// A run of title text, optionally marked as a foreign-language span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inline {
    Text(String),
    Foreign { lang: String, text: String },
}

impl Inline {
    pub fn text(&self) -> &str {
        match self {
            Inline::Text(t) => t,
            Inline::Foreign { text, .. } => text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TitleEntry {
    pub local_id: String,
    pub lang: String,
    pub content: Vec<Inline>,
    #[serde(default)]
    pub sources: Vec<LocalPointer>,
    #[serde(default)]
    pub tags: BTreeSet<TitleTag>,
}

impl TitleEntry {
    pub fn plain(local_id: impl Into<String>, lang: impl Into<String>, text: impl Into<String>) -> Self {
        TitleEntry {
            local_id: local_id.into(),
            lang: lang.into(),
            content: vec![Inline::Text(text.into())],
            sources: Vec::new(),
            tags: BTreeSet::new(),
        }
    }

    pub fn text(&self) -> String {
        self.content.iter().map(Inline::text).collect()
    }

    pub fn is_headword(&self) -> bool {
        self.tags.contains(&TitleTag::Headword)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PersonName {
    pub forename: Option<String>,
    pub surname: Option<String>,
}

impl PersonName {
    pub fn display(&self) -> String {
        [self.forename.as_deref(), self.surname.as_deref()].into_iter().flatten().collect::<Vec<_>>().join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorRef {
    pub person: EntityUri,
    pub name: PersonName,
    #[serde(default)]
    pub sources: Vec<LocalPointer>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextLang {
    pub main_lang: String,
    pub label: Option<String>,
    #[serde(default)]
    pub sources: Vec<LocalPointer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoteType {
    Abstract,
    Prologue,
    Incipit,
    Explicit,
    Disambiguation,
}

impl NoteType {
    pub const ALL: [NoteType; 5] =
        [NoteType::Abstract, NoteType::Prologue, NoteType::Incipit, NoteType::Explicit, NoteType::Disambiguation];

    pub fn as_str(self) -> &'static str {
        match self {
            NoteType::Abstract => "abstract",
            NoteType::Prologue => "prologue",
            NoteType::Incipit => "incipit",
            NoteType::Explicit => "explicit",
            NoteType::Disambiguation => "disambiguation",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }

    /// Excerpt notes must wrap their text in a quotation.
    pub fn is_excerpt(self) -> bool {
        matches!(self, NoteType::Prologue | NoteType::Incipit | NoteType::Explicit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoteSegment {
    pub lang: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotePart {
    pub note_type: NoteType,
    pub segments: Vec<NoteSegment>,
    #[serde(default)]
    pub sources: Vec<LocalPointer>,
    pub quoted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IdnoEntry {
    pub scheme: String,
    pub value: String,
}

impl IdnoEntry {
    pub fn new(scheme: impl Into<String>, value: impl Into<String>) -> Self {
        IdnoEntry { scheme: scheme.into(), value: value.into() }
    }

    pub fn uri(uri: &EntityUri) -> Self {
        IdnoEntry::new("URI", uri.to_string())
    }

    pub fn is_uri(&self) -> bool {
        self.scheme == "URI"
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessTitle {
    pub level: Option<String>,
    pub lang: Option<String>,
    pub text: String,
}

/// A page/volume span within a publication.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CitedRange {
    pub unit: String,
    pub from: String,
    pub to: String,
    pub display: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Collection {
    pub lang: Option<String>,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MsIdentifier {
    pub country: Option<String>,
    pub settlement: Option<String>,
    pub collection: Option<Collection>,
    pub uri: EntityUri,
    #[serde(default)]
    pub alt_idnos: Vec<IdnoEntry>,
}

impl MsIdentifier {
    pub fn bare(uri: EntityUri) -> Self {
        MsIdentifier { country: None, settlement: None, collection: None, uri, alt_idnos: Vec::new() }
    }
}

/// The folio span of a manuscript where a work appears.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Locus {
    pub from: String,
    pub to: String,
    pub display: String,
    pub part_uri: Option<EntityUri>,
}

pub const CLASS_WRITTEN_WORK: &str = "lawd:WrittenWork";
pub const CLASS_EDITION: &str = "lawd:Edition";

/// A manuscript or publication embodying the work.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiblWitness {
    pub local_id: String,
    pub witness_class: String,
    #[serde(default)]
    pub creators: Vec<PersonName>,
    pub title: Option<WitnessTitle>,
    pub record_ptr: Option<EntityUri>,
    #[serde(default)]
    pub cited_ranges: Vec<CitedRange>,
    pub ms_identifier: Option<MsIdentifier>,
    pub locus: Option<Locus>,
    pub text_lang: Option<String>,
    /// Unrecognised children, as canonical XML fragments.
    #[serde(default)]
    pub extensions: Vec<String>,
}

impl BiblWitness {
    pub fn new(local_id: impl Into<String>, witness_class: impl Into<String>) -> Self {
        BiblWitness {
            local_id: local_id.into(),
            witness_class: witness_class.into(),
            creators: Vec::new(),
            title: None,
            record_ptr: None,
            cited_ranges: Vec::new(),
            ms_identifier: None,
            locus: None,
            text_lang: None,
            extensions: Vec::new(),
        }
    }

    pub fn is_manuscript(&self) -> bool {
        self.witness_class == CLASS_WRITTEN_WORK && self.ms_identifier.is_some()
    }
}

/// Subject or object of a relation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelRef {
    Local(LocalPointer),
    Entity(EntityUri),
    /// Absolute IRI outside the authority.
    External(String),
}

impl RelRef {
    pub fn parse(token: &str) -> Result<Self, UriError> {
        if token.starts_with('#') {
            return LocalPointer::parse(token).map(RelRef::Local).ok_or_else(|| UriError::Malformed(token.to_string()));
        }
        match uri_kind(token)? {
            UriKind::Entity(_) => EntityUri::parse(token).map(RelRef::Entity),
            UriKind::Foreign => Ok(RelRef::External(token.to_string())),
        }
    }

    pub fn as_local(&self) -> Option<&LocalPointer> {
        match self {
            RelRef::Local(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for RelRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelRef::Local(p) => p.fmt(f),
            RelRef::Entity(u) => u.fmt(f),
            RelRef::External(s) => f.write_str(s),
        }
    }
}

impl Serialize for RelRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RelRef {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        RelRef::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// `active` / `ref` / `passive` assertion from a `listRelation`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationTriple {
    pub local_id: Option<String>,
    pub rel_type: Option<String>,
    pub subjects: Vec<RelRef>,
    pub predicate: String,
    pub objects: Vec<RelRef>,
    #[serde(default)]
    pub sources: Vec<LocalPointer>,
}

impl RelationTriple {
    pub fn new(subjects: Vec<RelRef>, predicate: impl Into<String>, objects: Vec<RelRef>) -> Self {
        RelationTriple {
            local_id: None,
            rel_type: None,
            subjects,
            predicate: predicate.into(),
            objects,
            sources: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeEntry {
    pub who: String,
    pub when: Option<String>,
    pub what: String,
}

/// The abstract work entity, one TEI document each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkRecord {
    pub uri: EntityUri,
    #[serde(default)]
    pub authors: Vec<AuthorRef>,
    #[serde(default)]
    pub titles: Vec<TitleEntry>,
    pub text_lang: Option<TextLang>,
    #[serde(default)]
    pub notes: Vec<NotePart>,
    #[serde(default)]
    pub idnos: Vec<IdnoEntry>,
    #[serde(default)]
    pub witnesses: Vec<BiblWitness>,
    #[serde(default)]
    pub relations: Vec<RelationTriple>,
    #[serde(default)]
    pub subjects: Vec<String>,
    #[serde(default)]
    pub editors: Vec<String>,
    #[serde(default)]
    pub change_log: Vec<ChangeEntry>,
    /// Unrecognised children of the work `<bibl>`, as canonical XML fragments.
    #[serde(default)]
    pub extensions: Vec<String>,
}

impl WorkRecord {
    /// An empty record whose only content is its URI idno.
    pub fn new(uri: EntityUri) -> Self {
        WorkRecord {
            idnos: vec![IdnoEntry::uri(&uri)],
            uri,
            authors: Vec::new(),
            titles: Vec::new(),
            text_lang: None,
            notes: Vec::new(),
            witnesses: Vec::new(),
            relations: Vec::new(),
            subjects: Vec::new(),
            editors: Vec::new(),
            change_log: Vec::new(),
            extensions: Vec::new(),
        }
    }

    pub fn witness(&self, local_id: &str) -> Option<&BiblWitness> {
        self.witnesses.iter().find(|w| w.local_id == local_id)
    }

    pub fn idno(&self, scheme: &str) -> Option<&str> {
        self.idnos.iter().find(|i| i.scheme == scheme).map(|i| i.value.as_str())
    }

    /// Headword title for `lang`, or `None` when none (or more than one) is tagged.
    pub fn canonical_headword(&self, lang: &str) -> Option<&TitleEntry> {
        let mut hits = self.titles.iter().filter(|t| t.lang == lang && t.is_headword());
        let first = hits.next()?;
        hits.next().is_none().then_some(first)
    }

    /// English headword, else the first headword, else the first title.
    pub fn display_title(&self) -> Option<String> {
        self.canonical_headword("en")
            .or_else(|| self.titles.iter().find(|t| t.is_headword()))
            .or_else(|| self.titles.first())
            .map(TitleEntry::text)
    }

    pub fn incipit(&self) -> Option<&NoteSegment> {
        self.notes.iter().find(|n| n.note_type == NoteType::Incipit).and_then(|n| n.segments.first())
    }
}

/// Free function form of [`WorkRecord::canonical_headword`].
pub fn canonical_headword<'a>(record: &'a WorkRecord, lang: &str) -> Option<&'a TitleEntry> {
    record.canonical_headword(lang)
}
