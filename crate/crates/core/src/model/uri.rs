use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Authority under which every entity URI is minted.
pub const AUTHORITY: &str = "http://syriaca.org/";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Work,
    Manuscript,
    Bibl,
    Person,
    Place,
}

impl EntityKind {
    pub const ALL: [EntityKind; 5] =
        [EntityKind::Work, EntityKind::Manuscript, EntityKind::Bibl, EntityKind::Person, EntityKind::Place];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Work => "work",
            EntityKind::Manuscript => "manuscript",
            EntityKind::Bibl => "bibl",
            EntityKind::Person => "person",
            EntityKind::Place => "place",
        }
    }
}

impl FromStr for EntityKind {
    type Err = UriError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| UriError::UnknownKind(s.to_string()))
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of [`uri_kind`]: an entity kind under the authority, or anything else.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UriKind {
    Entity(EntityKind),
    Foreign,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UriError {
    #[error("malformed URI {0:?}")]
    Malformed(String),
    #[error("not an entity URI under {AUTHORITY}: {0:?}")]
    NotEntity(String),
    #[error("unknown entity kind {0:?}")]
    UnknownKind(String),
    #[error("invalid entity id in {0:?}")]
    BadId(String),
    #[error("invalid fragment in {0:?}")]
    BadFragment(String),
}

/// Stable identifier of a work, manuscript, publication, person or place.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityUri {
    pub kind: EntityKind,
    pub id: u64,
    pub fragment: Option<String>,
}

impl EntityUri {
    pub fn new(kind: EntityKind, id: u64) -> Self {
        EntityUri { kind, id, fragment: None }
    }

    pub fn work(id: u64) -> Self {
        Self::new(EntityKind::Work, id)
    }

    pub fn with_fragment(mut self, fragment: impl Into<String>) -> Result<Self, UriError> {
        let fragment = fragment.into();
        if !is_valid_fragment(&fragment) {
            return Err(UriError::BadFragment(fragment));
        }
        self.fragment = Some(fragment);
        Ok(self)
    }

    /// The same entity without any fragment.
    pub fn base(&self) -> EntityUri {
        EntityUri::new(self.kind, self.id)
    }

    pub fn parse(s: &str) -> Result<Self, UriError> {
        check_absolute_iri(s)?;
        let rest = s.strip_prefix(AUTHORITY).ok_or_else(|| UriError::NotEntity(s.to_string()))?;
        let (path, fragment) = match rest.split_once('#') {
            Some((p, f)) => (p, Some(f)),
            None => (rest, None),
        };
        let (kind, id) = path.split_once('/').ok_or_else(|| UriError::NotEntity(s.to_string()))?;
        let kind: EntityKind = kind.parse()?;
        if id.is_empty() || !id.bytes().all(|b| b.is_ascii_digit()) {
            return Err(UriError::BadId(s.to_string()));
        }
        let id = id.parse().map_err(|_| UriError::BadId(s.to_string()))?;
        let uri = EntityUri::new(kind, id);
        match fragment {
            Some(f) => uri.with_fragment(f).map_err(|_| UriError::BadFragment(s.to_string())),
            None => Ok(uri),
        }
    }
}

impl fmt::Display for EntityUri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{AUTHORITY}{}/{}", self.kind, self.id)?;
        if let Some(frag) = &self.fragment {
            write!(f, "#{frag}")?;
        }
        Ok(())
    }
}

impl FromStr for EntityUri {
    type Err = UriError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityUri::parse(s)
    }
}

impl Serialize for EntityUri {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EntityUri {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        EntityUri::parse(&s).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn is_valid_fragment(f: &str) -> bool {
    !f.is_empty() && !f.contains('#') && !f.chars().any(|c| c.is_whitespace() || is_iri_forbidden(c))
}

fn is_iri_forbidden(c: char) -> bool {
    matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '\\' | '^' | '`') || c.is_control()
}

/// Rejects anything that is not `scheme:rest` with IRI-safe characters.
pub fn check_absolute_iri(s: &str) -> Result<(), UriError> {
    let malformed = || UriError::Malformed(s.to_string());
    let (scheme, rest) = s.split_once(':').ok_or_else(malformed)?;
    let mut chars = scheme.chars();
    let scheme_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    if !scheme_ok || rest.is_empty() {
        return Err(malformed());
    }
    if s.chars().any(|c| c.is_whitespace() || is_iri_forbidden(c)) {
        return Err(malformed());
    }
    Ok(())
}

/// Classifies a URI string by its path segment under the authority.
///
/// A URI under the authority whose first segment names an entity kind must
/// also carry a numeric id, otherwise it is reported as malformed.
pub fn uri_kind(uri: &str) -> Result<UriKind, UriError> {
    check_absolute_iri(uri)?;
    let Some(rest) = uri.strip_prefix(AUTHORITY) else {
        return Ok(UriKind::Foreign);
    };
    let segment = rest.split(['/', '#']).next().unwrap_or_default();
    match segment.parse::<EntityKind>() {
        Ok(_) => EntityUri::parse(uri).map(|u| UriKind::Entity(u.kind)),
        Err(_) => Ok(UriKind::Foreign),
    }
}
