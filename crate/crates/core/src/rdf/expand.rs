use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{EntityKind, EntityUri, IdnoEntry, RelRef, RelationTriple, WorkRecord};

const EMBODIED_TO_WORK: &[(&str, &str)] =
    &[("syriaca:hasEmbodiedVersion", "syriaca:hasVersion"), ("syriaca:hasEmbodiedRecension", "syriaca:hasRecension")];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("no relation with id {0:?}")]
    NoSuchRelation(String),
    #[error("predicate {0:?} is not an embodied-version or embodied-recension predicate")]
    NotEmbodied(String),
    #[error("{0} is not a bare work URI")]
    NotWorkUri(EntityUri),
    #[error("{0} collides with an existing record")]
    UriTaken(EntityUri),
}

/// Replaces an embodied-version (or recension) relation by an intermediate work.
///
/// `relation_id` is the relation's `xml:id`. `taken` reports URIs already in use.
/// The original record points at `new_uri` through `syriaca:hasVersion` (resp.
/// `hasRecension`); the new record carries the witnesses and declares that they
/// embody it.
pub fn expand_embodied_relation(
    record: &WorkRecord,
    relation_id: &str,
    new_uri: &EntityUri,
    taken: impl Fn(&EntityUri) -> bool,
) -> Result<(WorkRecord, WorkRecord), ExpandError> {
    let index = record
        .relations
        .iter()
        .position(|r| r.local_id.as_deref() == Some(relation_id))
        .ok_or_else(|| ExpandError::NoSuchRelation(relation_id.to_string()))?;
    expand_embodied_relation_at(record, index, new_uri, taken)
}

/// As [`expand_embodied_relation`], selecting the relation by position.
pub fn expand_embodied_relation_at(
    record: &WorkRecord,
    index: usize,
    new_uri: &EntityUri,
    taken: impl Fn(&EntityUri) -> bool,
) -> Result<(WorkRecord, WorkRecord), ExpandError> {
    let rel = record.relations.get(index).ok_or_else(|| ExpandError::NoSuchRelation(format!("#{index}")))?;
    let work_predicate = EMBODIED_TO_WORK
        .iter()
        .find(|(embodied, _)| *embodied == rel.predicate)
        .map(|(_, p)| *p)
        .ok_or_else(|| ExpandError::NotEmbodied(rel.predicate.clone()))?;
    if new_uri.kind != EntityKind::Work || new_uri.fragment.is_some() {
        return Err(ExpandError::NotWorkUri(new_uri.clone()));
    }
    if *new_uri == record.uri || taken(new_uri) {
        return Err(ExpandError::UriTaken(new_uri.clone()));
    }

    let moved: BTreeSet<&str> = rel.objects.iter().filter_map(RelRef::as_local).map(|p| p.target_id()).collect();
    let carried: BTreeSet<&str> = moved.iter().copied().chain(rel.sources.iter().map(|p| p.target_id())).collect();

    let mut derived = WorkRecord::new(new_uri.clone());
    derived.witnesses = record.witnesses.iter().filter(|w| carried.contains(w.local_id.as_str())).cloned().collect();
    derived.relations.push(RelationTriple {
        local_id: None,
        rel_type: rel.rel_type.clone(),
        subjects: rel.objects.clone(),
        predicate: "lawd:embodies".to_string(),
        objects: vec![RelRef::Entity(new_uri.clone())],
        sources: rel.sources.clone(),
    });

    let mut updated = record.clone();
    updated.relations[index] = RelationTriple {
        local_id: rel.local_id.clone(),
        rel_type: rel.rel_type.clone(),
        subjects: rel.subjects.clone(),
        predicate: work_predicate.to_string(),
        objects: vec![RelRef::Entity(new_uri.clone())],
        sources: rel.sources.clone(),
    };
    let still_used = referenced_ids(&updated);
    updated.witnesses.retain(|w| !moved.contains(w.local_id.as_str()) || still_used.contains(&w.local_id));

    debug_assert!(derived.idnos == vec![IdnoEntry::uri(new_uri)]);
    Ok((updated, derived))
}

/// Witness ids referenced anywhere in the record.
fn referenced_ids(record: &WorkRecord) -> BTreeSet<String> {
    let mut ids = BTreeSet::new();
    let mut add = |ps: &[crate::model::LocalPointer]| {
        ids.extend(ps.iter().map(|p| p.target_id().to_string()));
    };
    for a in &record.authors {
        add(&a.sources);
    }
    for t in &record.titles {
        add(&t.sources);
    }
    if let Some(tl) = &record.text_lang {
        add(&tl.sources);
    }
    for n in &record.notes {
        add(&n.sources);
    }
    for r in &record.relations {
        add(&r.sources);
        let locals: Vec<_> = r.subjects.iter().chain(&r.objects).filter_map(RelRef::as_local).cloned().collect();
        add(&locals);
    }
    ids
}
