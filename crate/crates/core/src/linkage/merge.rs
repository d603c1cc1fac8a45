use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{normalize_title, LinkageError, WorkStub};
use crate::model::{
    validate_record, AuthorRef, BiblWitness, ChangeEntry, EntityKind, EntityUri, Inline, LocalPointer, MsIdentifier,
    NotePart, NoteSegment, NoteType, PersonName, RelRef, RelationTriple, TitleEntry, WorkRecord, CLASS_WRITTEN_WORK,
};

/// Builds a new record under `minted` from a cluster of stubs.
pub fn merge_cluster(members: &[WorkStub], minted: &EntityUri) -> Result<WorkRecord, LinkageError> {
    if minted.kind != EntityKind::Work || minted.fragment.is_some() {
        return Err(LinkageError::NotWorkUri(minted.clone()));
    }
    merge_into(&WorkRecord::new(minted.clone()), members)
}

fn fresh_id(taken: &mut HashSet<String>, prefix: &str) -> String {
    let id = (1..).map(|n| format!("{prefix}{n}")).find(|id| !taken.contains(id)).expect("unbounded range");
    taken.insert(id.clone());
    id
}

fn local(id: &str) -> LocalPointer {
    LocalPointer::new(id).expect("generated ids are valid pointers")
}

/// Adds the stubs' titles, manuscript witnesses, authors, incipits and
/// idnos to an existing record.
///
/// Titles are deduplicated by language and normalized text, witnesses by
/// manuscript and locus. Each new witness gets a `lawd:embodies` relation of
/// type `mss`. No headword is assigned.
pub fn merge_into(record: &WorkRecord, stubs: &[WorkStub]) -> Result<WorkRecord, LinkageError> {
    let mut out = record.clone();
    let id = out.uri.id;

    let mut idnos: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for i in record.idnos.iter().chain(stubs.iter().flat_map(|s| &s.idnos)).filter(|i| !i.is_uri()) {
        idnos.entry(&i.scheme).or_default().insert(&i.value);
    }
    if let Some((scheme, values)) = idnos.iter().find(|(_, v)| v.len() > 1) {
        return Err(LinkageError::MergeConflict {
            scheme: scheme.to_string(),
            values: values.iter().map(|v| v.to_string()).collect(),
        });
    }

    let mut taken: HashSet<String> = out
        .titles
        .iter()
        .map(|t| t.local_id.clone())
        .chain(out.witnesses.iter().map(|w| w.local_id.clone()))
        .chain(out.relations.iter().filter_map(|r| r.local_id.clone()))
        .collect();
    let mut seen_titles: HashSet<(String, Vec<String>)> =
        out.titles.iter().map(|t| (t.lang.clone(), normalize_title(&t.text(), &t.lang))).collect();
    let mut seen_witnesses: BTreeMap<(EntityUri, String), String> = out
        .witnesses
        .iter()
        .filter_map(|w| {
            let ms = w.ms_identifier.as_ref()?;
            Some(((ms.uri.clone(), w.locus.as_ref()?.display.clone()), w.local_id.clone()))
        })
        .collect();
    let mut seen_incipits: HashSet<(String, Vec<String>)> = out
        .notes
        .iter()
        .filter(|n| n.note_type == NoteType::Incipit)
        .flat_map(|n| &n.segments)
        .map(|s| {
            let lang = s.lang.clone().unwrap_or_default();
            let norm = normalize_title(&s.text, &lang);
            (lang, norm)
        })
        .collect();

    for stub in stubs {
        let witness = match &stub.source_ms {
            Some(src) => {
                let key = (src.manuscript.clone(), src.locus.display.clone());
                Some(match seen_witnesses.get(&key) {
                    Some(wid) => wid.clone(),
                    None => {
                        let wid = fresh_id(&mut taken, &format!("bib{id}-"));
                        let mut w = BiblWitness::new(&wid, CLASS_WRITTEN_WORK);
                        w.ms_identifier = Some(MsIdentifier::bare(src.manuscript.clone()));
                        w.locus = Some(src.locus.clone());
                        out.witnesses.push(w);
                        let mut rel = RelationTriple::new(
                            vec![RelRef::Local(local(&wid))],
                            "lawd:embodies",
                            vec![RelRef::Entity(out.uri.clone())],
                        );
                        rel.rel_type = Some("mss".into());
                        out.relations.push(rel);
                        seen_witnesses.insert(key, wid.clone());
                        wid
                    }
                })
            }
            None => None,
        };
        let sources: Vec<LocalPointer> = witness.iter().map(|w| local(w)).collect();

        for (lang, text) in &stub.titles {
            let key = (lang.clone(), normalize_title(text, lang));
            if key.1.is_empty() || !seen_titles.insert(key) {
                continue;
            }
            let tid = fresh_id(&mut taken, &format!("name{id}-"));
            out.titles.push(TitleEntry {
                local_id: tid,
                lang: lang.clone(),
                content: vec![Inline::Text(text.clone())],
                sources: sources.clone(),
                tags: Default::default(),
            });
        }

        if let Some(person) = &stub.author_uri {
            match out.authors.iter_mut().find(|a| &a.person == person) {
                Some(a) => {
                    for s in &sources {
                        if !a.sources.contains(s) {
                            a.sources.push(s.clone());
                        }
                    }
                }
                None => out.authors.push(AuthorRef {
                    person: person.clone(),
                    name: PersonName { forename: stub.author_name.clone(), surname: None },
                    sources: sources.clone(),
                }),
            }
        }

        if let Some((lang, text)) = &stub.incipit {
            if seen_incipits.insert((lang.clone(), normalize_title(text, lang))) {
                out.notes.push(NotePart {
                    note_type: NoteType::Incipit,
                    segments: vec![NoteSegment { lang: Some(lang.clone()), text: text.clone() }],
                    sources: sources.clone(),
                    quoted: true,
                });
            }
        }
    }

    for (scheme, values) in idnos {
        let value = values.into_iter().next().expect("non-empty");
        if out.idno(scheme).is_none() {
            out.idnos.push(crate::model::IdnoEntry::new(scheme, value));
        }
    }

    if !stubs.is_empty() {
        let mut provenance: Vec<&str> = stubs.iter().map(|s| s.provenance.as_str()).collect();
        provenance.dedup();
        out.change_log.push(ChangeEntry {
            who: "linkage".into(),
            when: None,
            what: format!(
                "Merged catalogue entries {} ({})",
                stubs.iter().map(|s| s.stub_id.as_str()).collect::<Vec<_>>().join(", "),
                provenance.join("; ")
            ),
        });
    }

    let report = validate_record(&out);
    if !report.is_valid() {
        return Err(LinkageError::Invalid(report));
    }
    Ok(out)
}
