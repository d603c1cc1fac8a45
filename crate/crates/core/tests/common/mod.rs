#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::Rng;
use syriaca_works::model::{
    AuthorRef, BiblWitness, ChangeEntry, CitedRange, Collection, EntityKind, EntityUri, IdnoEntry, Inline,
    LocalPointer, Locus, MsIdentifier, NotePart, NoteSegment, NoteType, PersonName, RelRef, RelationTriple, TextLang,
    TitleEntry, TitleTag, WitnessTitle, CLASS_EDITION, CLASS_WRITTEN_WORK,
};
use syriaca_works::WorkRecord;

pub mod rdf_oracle;

pub fn fixture(rel: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

const WORDS: &[&str] = &[
    "Homily",
    "on",
    "the",
    "Angel",
    "Mary",
    "Martyrdom",
    "of",
    "Saint",
    "Mar",
    "Qardagh",
    "Sogitha",
    "&",
    "<b>",
    "\"quoted\"",
    "Élie",
    "ܡܐܡܪܐ",
    "ܥܠ",
    "ܡܠܐܟܐ",
    "ܡܪܝܡ",
    "Narsai",
    "Ephrem",
    "Jacob",
    "Serugh",
    "Hymn",
    "Letter",
    "Life",
    "a'b",
    "x>y",
];

const LANGS: &[&str] = &["en", "syr", "de", "fr", "ar", "la", "syr-Syrj", "syr-Syrn", "en-x-gedsh"];

const PREDICATES: &[&str] = &[
    "lawd:embodies",
    "dct:source",
    "dct:isPartOf",
    "syriaca:commemorates",
    "syriaca:hasEmbodiedVersion",
    "syriaca:hasVersion",
    "bf:translationOf",
];

pub fn phrase(rng: &mut impl Rng, max_words: usize) -> String {
    let n = rng.random_range(1..=max_words);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

fn lang(rng: &mut impl Rng) -> String {
    LANGS.choose(rng).unwrap().to_string()
}

fn title_content(rng: &mut impl Rng) -> Vec<Inline> {
    if rng.random_bool(0.75) {
        return vec![Inline::Text(phrase(rng, 6))];
    }
    let mut out = Vec::new();
    let pieces = rng.random_range(2..=4);
    let mut foreign = rng.random_bool(0.5);
    for i in 0..pieces {
        if foreign {
            out.push(Inline::Foreign { lang: "syr".into(), text: phrase(rng, 2) });
        } else {
            let mut t = phrase(rng, 3);
            if i > 0 {
                t.insert(0, ' ');
            }
            if i + 1 < pieces {
                t.push(' ');
            }
            out.push(Inline::Text(t));
        }
        foreign = !foreign;
    }
    out
}

fn pointers(rng: &mut impl Rng, ids: &[String], max: usize) -> Vec<LocalPointer> {
    if ids.is_empty() {
        return vec![];
    }
    let n = rng.random_range(0..=max.min(ids.len()));
    ids.choose_multiple(rng, n).map(|id| LocalPointer::new(id).unwrap()).collect()
}

fn witness(rng: &mut impl Rng, id: String, ms_id: u64) -> BiblWitness {
    let manuscript = rng.random_bool(0.35);
    let mut w = BiblWitness::new(id, if manuscript { CLASS_WRITTEN_WORK } else { CLASS_EDITION });
    if manuscript {
        let mut ms = MsIdentifier::bare(EntityUri::new(EntityKind::Manuscript, ms_id));
        if rng.random_bool(0.5) {
            ms.country = Some("Germany".into());
            ms.settlement = Some("Berlin".into());
            ms.collection = Some(Collection { lang: Some("de".into()), name: "Königliche Bibliothek".into() });
        }
        if rng.random_bool(0.4) {
            ms.alt_idnos.push(IdnoEntry::new("BL-Shelfmark", format!("Add. {}", rng.random_range(100..20000))));
        }
        w.ms_identifier = Some(ms);
        let from = rng.random_range(1..200u32);
        let to = from + rng.random_range(0..30u32);
        w.locus = Some(Locus {
            from: format!("{from}r"),
            to: format!("{to}v"),
            display: format!("{from}r-{to}v"),
            part_uri: rng.random_bool(0.5).then(|| {
                EntityUri::new(EntityKind::Manuscript, ms_id)
                    .with_fragment(format!("a{}", rng.random_range(1..9)))
                    .unwrap()
            }),
        });
    } else {
        w.record_ptr = Some(EntityUri::new(EntityKind::Bibl, rng.random_range(1..99999)));
        if rng.random_bool(0.5) {
            w.creators.push(PersonName { forename: Some("Paul".into()), surname: Some("Bedjan".into()) });
        }
        if rng.random_bool(0.5) {
            w.title = Some(WitnessTitle { level: Some("m".into()), lang: Some("la".into()), text: phrase(rng, 4) });
        }
        for unit in ["volume", "pp"] {
            if unit == "volume" && rng.random_bool(0.6) {
                continue;
            }
            let from = rng.random_range(1..500u32);
            let to = from + rng.random_range(0..40u32);
            let display = if from == to { from.to_string() } else { format!("{from}-{to}") };
            w.cited_ranges.push(CitedRange { unit: unit.into(), from: from.to_string(), to: to.to_string(), display });
        }
    }
    if rng.random_bool(0.3) {
        w.text_lang = Some(lang(rng));
    }
    if rng.random_bool(0.1) {
        w.extensions.push("<note type=\"local\">shelf copy</note>".into());
    }
    w
}

fn rel_ref(rng: &mut impl Rng, witness_ids: &[String], self_uri: &EntityUri) -> RelRef {
    match rng.random_range(0..5) {
        0 | 1 if !witness_ids.is_empty() => RelRef::Local(LocalPointer::new(witness_ids.choose(rng).unwrap()).unwrap()),
        0..=2 => RelRef::Entity(self_uri.clone()),
        3 => {
            let kind = *[EntityKind::Person, EntityKind::Place, EntityKind::Work].choose(rng).unwrap();
            RelRef::Entity(EntityUri::new(kind, rng.random_range(1..5000)))
        }
        _ => RelRef::Entity(
            EntityUri::new(EntityKind::Manuscript, rng.random_range(1..5000))
                .with_fragment(format!("b{}", rng.random_range(1..5)))
                .unwrap(),
        ),
    }
}

pub fn relation(rng: &mut impl Rng, witness_ids: &[String], uri: &EntityUri, predicate: &str) -> RelationTriple {
    let ns = rng.random_range(1..=3);
    let no = rng.random_range(1..=3);
    let mut rel = RelationTriple::new(
        (0..ns).map(|_| rel_ref(rng, witness_ids, uri)).collect(),
        predicate,
        (0..no).map(|_| rel_ref(rng, witness_ids, uri)).collect(),
    );
    rel.sources = pointers(rng, witness_ids, 2);
    if rng.random_bool(0.5) {
        rel.rel_type =
            Some(["editions", "mss", "ancientVersion", "modernTranslation"].choose(rng).unwrap().to_string());
    }
    rel
}

/// A valid work record exercising most of the model.
pub fn random_record(rng: &mut impl Rng, id: u64) -> WorkRecord {
    let uri = EntityUri::work(id);
    let mut r = WorkRecord::new(uri.clone());

    let witness_ids: Vec<String> = (1..=rng.random_range(0..6)).map(|i| format!("bib{id}-{i}")).collect();
    for (i, wid) in witness_ids.iter().enumerate() {
        r.witnesses.push(witness(rng, wid.clone(), 1000 + id * 10 + i as u64));
    }

    for _ in 0..rng.random_range(0..3) {
        r.authors.push(AuthorRef {
            person: EntityUri::new(EntityKind::Person, rng.random_range(1..3000)),
            name: PersonName {
                forename: rng.random_bool(0.7).then(|| phrase(rng, 1)),
                surname: rng.random_bool(0.5).then(|| phrase(rng, 1)),
            },
            sources: pointers(rng, &witness_ids, 2),
        });
    }

    let mut headword_langs = Vec::new();
    for i in 1..=rng.random_range(0..7) {
        let lang = lang(rng);
        let mut t = TitleEntry {
            local_id: format!("name{id}-{i}"),
            lang: lang.clone(),
            content: title_content(rng),
            sources: pointers(rng, &witness_ids, 3),
            tags: Default::default(),
        };
        if !headword_langs.contains(&lang) && rng.random_bool(0.4) {
            t.tags.insert(TitleTag::Headword);
            headword_langs.push(lang.clone());
        }
        if lang.starts_with("en") && rng.random_bool(0.3) {
            t.tags.insert(TitleTag::Anglicized);
        }
        r.titles.push(t);
    }

    if rng.random_bool(0.7) {
        r.text_lang = Some(TextLang {
            main_lang: lang(rng),
            label: rng.random_bool(0.3).then(|| "Syriac".to_string()),
            sources: pointers(rng, &witness_ids, 1),
        });
    }

    for _ in 0..rng.random_range(0..4) {
        let note_type =
            *[NoteType::Abstract, NoteType::Prologue, NoteType::Incipit, NoteType::Explicit, NoteType::Disambiguation]
                .choose(rng)
                .unwrap();
        let quoted = note_type.is_excerpt();
        let n_segs = rng.random_range(1..=3);
        let segments = (0..n_segs)
            .map(|_| NoteSegment {
                lang: if n_segs == 1 && rng.random_bool(0.2) && !quoted { None } else { Some(lang(rng)) },
                text: phrase(rng, 10),
            })
            .collect();
        r.notes.push(NotePart { note_type, segments, sources: pointers(rng, &witness_ids, 2), quoted });
    }

    if rng.random_bool(0.5) {
        r.idnos.push(IdnoEntry::new("BHS", rng.random_range(1..2000).to_string()));
    }
    if rng.random_bool(0.4) {
        r.idnos.push(IdnoEntry::new("BHO", rng.random_range(1..2000).to_string()));
    }
    if rng.random_bool(0.2) {
        r.idnos.push(IdnoEntry::new("CPG", format!("{} a", rng.random_range(1..9000))));
    }

    for i in 1..=rng.random_range(0..5) {
        let p = *PREDICATES.choose(rng).unwrap();
        let mut rel = relation(rng, &witness_ids, &uri, p);
        if rng.random_bool(0.3) {
            rel.local_id = Some(format!("rel{id}-{i}"));
        }
        r.relations.push(rel);
    }

    let codes = ["1.a", "2.f", "3.d", "5.a", "8", "11.c", "14"];
    let n_subjects = rng.random_range(0..3);
    for c in codes.choose_multiple(rng, n_subjects) {
        r.subjects.push(c.to_string());
    }
    if rng.random_bool(0.3) {
        r.editors.push("Nathan P. Gibson".into());
    }
    if rng.random_bool(0.3) {
        r.change_log.push(ChangeEntry {
            who: "http://syriaca.org/documentation/editors.xml#ngibson".into(),
            when: Some("2016-03-01".into()),
            what: phrase(rng, 5),
        });
    }
    if rng.random_bool(0.15) {
        r.extensions.push("<date notBefore=\"0400\">5th c.</date>".into());
    }
    r
}

const GENRES: &[&str] = &["mēmrā", "madrāšā", "sōgītā", "tešbuḥtā"];

const SEED_VOCAB: &[&str] = &[
    "qardāgh",
    "maryam",
    "malʾakā",
    "mawtā",
    "ḥayyē",
    "yawsep",
    "šemʿōn",
    "ṣlūtā",
    "ʾeggartā",
    "taḥwītā",
    "qyāmtā",
    "yaldā",
    "ʿēdtā",
    "maʿmōdītā",
    "qurbānā",
    "dānīyēl",
    "ʾabrāhām",
    "ʾīyōb",
    "nūḥā",
    "ʾadam",
    "ḥawwā",
    "mōšē",
    "ʾēlīyā",
    "pāwlōs",
    "petrōs",
    "tawbūtā",
    "šaynā",
    "ḥubbā",
    "haymānūtā",
    "sabrā",
    "ʾūrḥā",
    "gabrā",
    "pagrā",
    "napšā",
    "rūḥā",
    "šmayyā",
    "ʾarʿā",
    "yammā",
    "nūrā",
    "nuhrā",
    "ḥeškā",
    "šenṯā",
    "ʿeddānā",
    "zabnā",
    "ʿālmā",
];

fn strip_marks(s: &str) -> String {
    use unicode_normalization::char::is_combining_mark;
    use unicode_normalization::UnicodeNormalization;
    s.nfd().filter(|c| !is_combining_mark(*c)).nfc().collect()
}

/// Catalogue stubs derived from `n_seeds` invented works by dropping tokens,
/// stripping diacritics, varying case and omitting authors. The second value
/// maps each stub to its seed.
pub fn synthetic_stubs(
    rng: &mut impl Rng,
    n_seeds: usize,
    n_stubs: usize,
) -> (Vec<syriaca_works::linkage::WorkStub>, Vec<usize>) {
    use syriaca_works::linkage::{SourceMs, WorkStub};

    struct Seed {
        title: Vec<&'static str>,
        author: u64,
        incipit: Vec<&'static str>,
    }
    let authors = (n_seeds / 3).max(1) as u64;
    let seeds: Vec<Seed> = (0..n_seeds)
        .map(|_| {
            let len = rng.random_range(3..=5);
            let mut title = vec![*GENRES.choose(rng).unwrap(), "ʿal"];
            title.extend(SEED_VOCAB.choose_multiple(rng, len).copied());
            Seed {
                title,
                author: 100 + rng.random_range(0..authors),
                incipit: (0..rng.random_range(8..=12)).map(|_| *SEED_VOCAB.choose(rng).unwrap()).collect(),
            }
        })
        .collect();

    let mut assignment: Vec<usize> =
        (0..n_seeds).chain((n_seeds..n_stubs).map(|_| rng.random_range(0..n_seeds))).collect();
    assignment.truncate(n_stubs);
    let mut stubs = Vec::with_capacity(n_stubs);
    for (i, &s) in assignment.iter().enumerate() {
        let seed = &seeds[s];
        let mut title: Vec<String> = seed.title.iter().map(|t| t.to_string()).collect();
        if rng.random_bool(0.5) {
            title.remove(rng.random_range(0..title.len()));
            if rng.random_bool(0.2) {
                title.remove(rng.random_range(0..title.len()));
            }
        }
        if rng.random_bool(0.5) {
            title = title.iter().map(|t| strip_marks(t)).collect();
        }
        if rng.random_bool(0.3) {
            title = title.iter().map(|t| t.to_uppercase()).collect();
        }
        let incipit = rng.random_bool(0.6).then(|| {
            let mut inc: Vec<String> = seed.incipit.iter().map(|t| t.to_string()).collect();
            if rng.random_bool(0.4) {
                inc.remove(rng.random_range(5..inc.len()));
            }
            if rng.random_bool(0.5) {
                inc = inc.iter().map(|t| strip_marks(t)).collect();
            }
            ("en".to_string(), inc.join(" "))
        });
        stubs.push(WorkStub {
            stub_id: format!("cat-{i:04}"),
            titles: vec![("en".to_string(), title.join(" "))],
            author_uri: rng.random_bool(0.7).then(|| EntityUri::new(EntityKind::Person, seed.author)),
            author_name: None,
            incipit,
            source_ms: Some(SourceMs {
                manuscript: EntityUri::new(EntityKind::Manuscript, 5000 + i as u64),
                locus: Locus { from: "1".into(), to: "9".into(), display: "1-9".into(), part_uri: None },
            }),
            idnos: vec![],
            provenance: "synthetic catalogue".into(),
        });
    }
    (stubs, assignment)
}

const LINT_PREDICATES: &[&str] = &[
    "bf:translation",
    "bf:translationOf",
    "http://bibframe.org/vocab/translationOf",
    "syriaca:hasVersion",
    "syriaca:isVersionOf",
    "http://syriaca.org/schema#hasVersion",
    "syriaca:hasRecension",
    "syriaca:isRecensionOf",
    "dct:relation",
    "syriaca:possiblyIdentical",
    "lawd:embodies",
];

/// Small corpora whose records relate to each other (and to works outside
/// the corpus) through directional and undirected predicates.
pub fn lint_corpus(rng: &mut impl Rng, max_records: usize) -> Vec<WorkRecord> {
    let n = rng.random_range(1..=max_records);
    let pool: Vec<u64> = (1..=(max_records as u64 + 5)).collect();
    let ids: Vec<u64> = pool.choose_multiple(rng, n).copied().collect();
    let mut records: Vec<WorkRecord> = ids
        .iter()
        .map(|&id| {
            let mut r = WorkRecord::new(EntityUri::work(id));
            let n_rel = rng.random_range(0..=4);
            for _ in 0..n_rel {
                let side = |rng: &mut _| -> Vec<RelRef> {
                    let k = if Rng::random_bool(rng, 0.8) { 1 } else { 2 };
                    (0..k).map(|_| lint_ref(rng, id, &pool)).collect()
                };
                let subjects = side(rng);
                let objects = side(rng);
                let p = *LINT_PREDICATES.choose(rng).unwrap();
                r.relations.push(RelationTriple::new(subjects, p, objects));
            }
            r
        })
        .collect();
    // restate some relationships from the other work's side
    let mut mirrored = Vec::new();
    for r in &records {
        for rel in &r.relations {
            let (Some(RelRef::Entity(s)), Some(RelRef::Entity(o))) = (rel.subjects.first(), rel.objects.first()) else {
                continue;
            };
            let other = if *s == r.uri { o } else { s };
            if other == &r.uri || !ids.contains(&other.id) || !rng.random_bool(0.4) {
                continue;
            }
            let (subj, pred, obj) = match rng.random_range(0..3) {
                0 => (s.clone(), rel.predicate.clone(), o.clone()),
                1 => (o.clone(), rel.predicate.clone(), s.clone()),
                _ => (o.clone(), (*LINT_PREDICATES.choose(rng).unwrap()).to_string(), s.clone()),
            };
            mirrored.push((other.id, RelationTriple::new(vec![RelRef::Entity(subj)], pred, vec![RelRef::Entity(obj)])));
        }
    }
    for (id, rel) in mirrored {
        records.iter_mut().find(|r| r.uri.id == id).unwrap().relations.push(rel);
    }
    records
}

fn lint_ref(rng: &mut impl Rng, own: u64, pool: &[u64]) -> RelRef {
    match rng.random_range(0..10) {
        0..=4 => RelRef::Entity(EntityUri::work(own)),
        5..=7 => RelRef::Entity(EntityUri::work(*pool.choose(rng).unwrap())),
        8 => RelRef::Entity(EntityUri::work(*pool.choose(rng).unwrap()).with_fragment("w1").unwrap()),
        _ => RelRef::Local(LocalPointer::new("bib1-1").unwrap()),
    }
}

/// `(kind, work a, work b, predicate IRI)` as reported by the lint.
pub type LintFinding = (&'static str, u64, u64, String);

/// Checks every pair of records and every predicate family directly.
pub fn brute_force_directionality(records: &[WorkRecord]) -> std::collections::BTreeSet<LintFinding> {
    use std::collections::BTreeSet;
    fn full(p: &str) -> String {
        for (prefix, base) in [
            ("bf:", "http://bibframe.org/vocab/"),
            ("syriaca:", "http://syriaca.org/schema#"),
            ("dct:", "http://purl.org/dc/terms/"),
            ("lawd:", "http://lawd.info/ontology/"),
        ] {
            if let Some(local) = p.strip_prefix(prefix) {
                return format!("{base}{local}");
            }
        }
        p.to_string()
    }
    let declared: Vec<[String; 2]> = [
        ("bf:translation", "bf:translationOf"),
        ("syriaca:hasVersion", "syriaca:isVersionOf"),
        ("syriaca:hasRecension", "syriaca:isRecensionOf"),
    ]
    .iter()
    .map(|(a, b)| [full(a), full(b)])
    .collect();
    let mut families: Vec<Vec<String>> = declared.iter().map(|f| f.to_vec()).collect();
    let all_preds: BTreeSet<String> =
        records.iter().flat_map(|r| &r.relations).map(|rel| full(&rel.predicate)).collect();
    for p in all_preds {
        if !declared.iter().any(|f| f.contains(&p)) {
            families.push(vec![p]);
        }
    }
    let bare = |r: &RelRef| match r {
        RelRef::Entity(u) if u.kind == EntityKind::Work && u.fragment.is_none() => Some(u.id),
        _ => None,
    };
    let asserts = |rec: &WorkRecord, a: u64, b: u64, family: &[String]| {
        rec.relations.iter().any(|rel| {
            family.contains(&full(&rel.predicate))
                && rel
                    .subjects
                    .iter()
                    .filter_map(bare)
                    .any(|s| rel.objects.iter().filter_map(bare).any(|o| (s == a && o == b) || (s == b && o == a)))
        })
    };

    let mut out = BTreeSet::new();
    for (i, ra) in records.iter().enumerate() {
        for rb in &records[i + 1..] {
            let (a, b) = (ra.uri.id.min(rb.uri.id), ra.uri.id.max(rb.uri.id));
            for family in &families {
                if asserts(ra, a, b, family) && asserts(rb, a, b, family) {
                    out.insert(("MUTUAL_RELATION", a, b, family.iter().min().unwrap().clone()));
                }
            }
        }
    }
    let derived: Vec<&String> = declared.iter().map(|f| &f[1]).collect();
    for r in records {
        for rel in &r.relations {
            let p = full(&rel.predicate);
            if !derived.contains(&&p) {
                continue;
            }
            for s in rel.subjects.iter().filter_map(bare) {
                for o in rel.objects.iter().filter_map(bare) {
                    if o == r.uri.id && s != o {
                        out.insert(("PARENT_SIDE", s, o, p.clone()));
                    }
                }
            }
        }
    }
    out
}

/// Lint output in the oracle's shape.
pub fn lint_findings(records: &[WorkRecord]) -> std::collections::BTreeSet<LintFinding> {
    use syriaca_works::registry::{lint_corpus_directionality, ViolationKind};
    lint_corpus_directionality(records, &syriaca_works::NamespaceTable::default())
        .into_iter()
        .map(|v| {
            let kind = match v.kind {
                ViolationKind::MutualRelation => "MUTUAL_RELATION",
                ViolationKind::ParentSide => "PARENT_SIDE",
            };
            (kind, v.works.0.id, v.works.1.id, v.predicate)
        })
        .collect()
}
