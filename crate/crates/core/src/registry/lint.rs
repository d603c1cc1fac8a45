use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::model::{EntityKind, EntityUri, RelRef, WorkRecord};
use crate::rdf::{expand_curie, NamespaceTable};

/// Declared inverse pairs. The right-hand side points from the derived
/// work back to its parent.
const INVERSES: &[(&str, &str)] = &[
    ("bf:translation", "bf:translationOf"),
    ("syriaca:hasVersion", "syriaca:isVersionOf"),
    ("syriaca:hasRecension", "syriaca:isRecensionOf"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    /// Both works' records assert the relationship.
    MutualRelation,
    /// A derived-from relationship stored in the parent's record.
    ParentSide,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DirectionalityViolation {
    pub kind: ViolationKind,
    /// Mutual: the pair in ascending order. Parent side: (derived, parent).
    pub works: (EntityUri, EntityUri),
    /// Expanded predicate IRI; for mutual violations the smaller of the
    /// predicate and its inverse.
    pub predicate: String,
}

fn expand(p: &str, ns: &NamespaceTable) -> String {
    expand_curie(p, ns).unwrap_or_else(|_| p.to_string())
}

/// Inverse of an expanded predicate IRI, if one is declared.
pub fn inverse_predicate(iri: &str, ns: &NamespaceTable) -> Option<String> {
    INVERSES.iter().find_map(|(a, b)| {
        let (a, b) = (expand(a, ns), expand(b, ns));
        if iri == a {
            Some(b)
        } else if iri == b {
            Some(a)
        } else {
            None
        }
    })
}

fn bare_work(r: &RelRef) -> Option<&EntityUri> {
    match r {
        RelRef::Entity(u) if u.kind == EntityKind::Work && u.fragment.is_none() => Some(u),
        _ => None,
    }
}

/// `(subject, predicate IRI, object)` for every work-to-work relationship.
fn work_relationships(record: &WorkRecord, ns: &NamespaceTable) -> Vec<(EntityUri, String, EntityUri)> {
    let mut out = Vec::new();
    for rel in &record.relations {
        let p = expand(&rel.predicate, ns);
        for s in rel.subjects.iter().filter_map(bare_work) {
            for o in rel.objects.iter().filter_map(bare_work) {
                if s != o {
                    out.push((s.clone(), p.clone(), o.clone()));
                }
            }
        }
    }
    out
}

/// Flags relationships recorded on both sides and derived-from
/// relationships kept on the parent. Sorted and free of duplicates.
pub fn lint_corpus_directionality(records: &[WorkRecord], ns: &NamespaceTable) -> Vec<DirectionalityViolation> {
    let derived_from: BTreeSet<String> = INVERSES.iter().map(|(_, b)| expand(b, ns)).collect();
    let present: BTreeSet<&EntityUri> = records.iter().map(|r| &r.uri).collect();

    let mut asserted_by: BTreeMap<((EntityUri, EntityUri), String), BTreeSet<EntityUri>> = BTreeMap::new();
    let mut out = BTreeSet::new();
    for record in records {
        for (s, p, o) in work_relationships(record, ns) {
            if derived_from.contains(&p) && o == record.uri {
                out.insert(DirectionalityViolation {
                    kind: ViolationKind::ParentSide,
                    works: (s.clone(), o.clone()),
                    predicate: p.clone(),
                });
            }
            let family = match inverse_predicate(&p, ns) {
                Some(inv) if inv < p => inv,
                _ => p,
            };
            let pair = if s < o { (s, o) } else { (o, s) };
            asserted_by.entry((pair, family)).or_default().insert(record.uri.clone());
        }
    }
    for (((a, b), family), by) in asserted_by {
        if by.contains(&a) && by.contains(&b) && present.contains(&a) && present.contains(&b) {
            out.insert(DirectionalityViolation {
                kind: ViolationKind::MutualRelation,
                works: (a, b),
                predicate: family,
            });
        }
    }
    out.into_iter().collect()
}
