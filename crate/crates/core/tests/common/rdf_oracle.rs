use std::collections::BTreeSet;

use rand::Rng;
use syriaca_works::model::{LocalPointer, RelRef, RelationTriple};
use syriaca_works::rdf::{Term, Triple};
use syriaca_works::WorkRecord;

pub type Key = (String, String, String, Option<String>);

pub fn key(t: &Triple) -> Key {
    match &t.object {
        Term::Iri(i) => (t.subject.clone(), t.predicate.clone(), i.clone(), None),
        Term::Literal { lexical, lang } => (
            t.subject.clone(),
            t.predicate.clone(),
            format!("\"{lexical}"),
            lang.as_ref().map(|l| l.to_ascii_lowercase()),
        ),
    }
}

pub fn key_set(ts: &[Triple]) -> BTreeSet<Key> {
    ts.iter().map(key).collect()
}

/// Reads `listRelation` straight from the XML and multiplies out the
/// whitespace-separated `active` and `passive` lists.
pub fn brute_force_relation_triples(xml: &str, base: &str) -> Vec<(String, String, String)> {
    let prefixes = [
        ("lawd:", "http://lawd.info/ontology/"),
        ("dct:", "http://purl.org/dc/terms/"),
        ("syriaca:", "http://syriaca.org/schema#"),
    ];
    let expand = |c: &str| {
        let (p, iri) = prefixes.iter().find(|(p, _)| c.starts_with(p)).unwrap();
        format!("{iri}{}", &c[p.len()..])
    };
    let resolve = |r: &str| if let Some(id) = r.strip_prefix('#') { format!("{base}#{id}") } else { r.to_string() };
    let doc = roxmltree::Document::parse(xml).unwrap();
    let mut out = Vec::new();
    for rel in doc.descendants().filter(|n| n.has_tag_name("relation")) {
        let pred = expand(rel.attribute("ref").unwrap());
        for s in rel.attribute("active").unwrap().split_whitespace() {
            for o in rel.attribute("passive").unwrap().split_whitespace() {
                out.push((resolve(s), pred.clone(), resolve(o)));
            }
        }
    }
    out
}

/// Folds an expanded pair back into one triple set: IRIs under the new
/// work's fragment space move to the original base, each
/// `S hasVersion N` + `W embodies N` pair becomes `S hasEmbodiedVersion W`,
/// and the new work's own type triple disappears.
pub fn contract(
    original_uri: &str,
    new_uri: &str,
    updated: &[Triple],
    derived: &[Triple],
    work_pred: &str,
    embodied_pred: &str,
) -> BTreeSet<Key> {
    let embodies = "http://lawd.info/ontology/embodies";
    let rdf_type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    let rebase = |iri: &str| match iri.strip_prefix(&format!("{new_uri}#")) {
        Some(frag) => format!("{original_uri}#{frag}"),
        None => iri.to_string(),
    };
    let mut out = BTreeSet::new();
    let mut heads = Vec::new();
    let mut tails = Vec::new();
    for t in updated {
        match &t.object {
            Term::Iri(o) if t.predicate == work_pred && o == new_uri => heads.push(t.subject.clone()),
            _ => {
                out.insert(key(t));
            }
        }
    }
    for t in derived {
        match &t.object {
            Term::Iri(o) if t.predicate == embodies && o == new_uri => tails.push(rebase(&t.subject)),
            _ if t.subject == new_uri && t.predicate == rdf_type => {}
            Term::Iri(o) => {
                out.insert((rebase(&t.subject), t.predicate.clone(), rebase(o), None));
            }
            Term::Literal { .. } => {
                let (s, p, o, l) = key(t);
                out.insert((rebase(&s), p, o, l));
            }
        }
    }
    for h in &heads {
        for w in &tails {
            out.insert((h.clone(), embodied_pred.to_string(), w.clone(), None));
        }
    }
    out
}

pub fn embodied_record(rng: &mut impl Rng, id: u64, recension: bool) -> (WorkRecord, usize) {
    let mut r = super::random_record(rng, id);
    let ids: Vec<String> = r.witnesses.iter().map(|w| w.local_id.clone()).collect();
    let pred = if recension { "syriaca:hasEmbodiedRecension" } else { "syriaca:hasEmbodiedVersion" };
    let mut rel: RelationTriple = super::relation(rng, &ids, &r.uri, pred);
    // the embodied relation points from this work to its witnesses
    rel.subjects = vec![RelRef::Entity(r.uri.clone())];
    if !ids.is_empty() {
        rel.objects = ids.iter().take(2).map(|i| RelRef::Local(LocalPointer::new(i).unwrap())).collect();
    }
    let at = rng.random_range(0..=r.relations.len());
    r.relations.insert(at, rel);
    (r, at)
}
