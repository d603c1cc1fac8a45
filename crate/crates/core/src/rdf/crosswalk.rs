use super::{expand_curie, NamespaceTable, RdfError, Term, Triple};
use crate::model::{RelRef, WorkRecord};
use crate::tei::resolve_pointer;

fn ref_iri(record: &WorkRecord, relation: usize, r: &RelRef) -> Result<String, RdfError> {
    match r {
        RelRef::Local(ptr) => {
            if record.witness(ptr.target_id()).is_none() {
                return Err(RdfError::UnresolvedPointer { relation, pointer: ptr.to_string() });
            }
            Ok(resolve_pointer(&record.uri, &ptr.to_string())?)
        }
        RelRef::Entity(u) => Ok(u.to_string()),
        RelRef::External(s) => Ok(s.clone()),
    }
}

/// Expands every relation into the cross product of its subjects and objects,
/// in document order with subjects as the outer loop.
pub fn relations_to_triples(record: &WorkRecord, ns: &NamespaceTable) -> Result<Vec<Triple>, RdfError> {
    let mut out = Vec::new();
    for (i, rel) in record.relations.iter().enumerate() {
        let predicate = expand_curie(&rel.predicate, ns)?;
        let objects = rel.objects.iter().map(|o| ref_iri(record, i, o)).collect::<Result<Vec<_>, _>>()?;
        for s in &rel.subjects {
            let subject = ref_iri(record, i, s)?;
            for o in &objects {
                out.push(Triple::new(subject.clone(), predicate.clone(), Term::iri(o.clone())));
            }
        }
    }
    Ok(out)
}

/// Work-level triples followed by the relation expansion.
///
/// Emits, in order: the `lawd:ConceptualWork` type, one `dct:title` per title,
/// one `dct:creator` per author, one `syriaca:headword` per headword title,
/// and one `syriaca:idno-{scheme}` per non-URI idno.
pub fn record_to_triples(record: &WorkRecord, ns: &NamespaceTable) -> Result<Vec<Triple>, RdfError> {
    let work = record.uri.to_string();
    let mut out =
        vec![Triple::new(&work, expand_curie("rdf:type", ns)?, Term::iri(expand_curie("lawd:ConceptualWork", ns)?))];

    let title = expand_curie("dct:title", ns)?;
    for t in &record.titles {
        out.push(Triple::new(&work, &title, Term::lang_literal(t.text(), &t.lang)));
    }
    let creator = expand_curie("dct:creator", ns)?;
    for a in &record.authors {
        out.push(Triple::new(&work, &creator, Term::iri(a.person.to_string())));
    }
    let headword = expand_curie("syriaca:headword", ns)?;
    for t in record.titles.iter().filter(|t| t.is_headword()) {
        out.push(Triple::new(&work, &headword, Term::lang_literal(t.text(), &t.lang)));
    }
    for idno in record.idnos.iter().filter(|i| !i.is_uri()) {
        let p = expand_curie(&format!("syriaca:idno-{}", idno.scheme), ns)?;
        out.push(Triple::new(&work, p, Term::literal(&idno.value)));
    }
    out.extend(relations_to_triples(record, ns)?);
    Ok(out)
}
