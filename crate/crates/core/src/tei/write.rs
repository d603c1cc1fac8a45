use super::{TeiError, TEI_NS};
use crate::model::{
    validate_record, BiblWitness, Inline, LocalPointer, NotePart, PersonName, RelRef, RelationTriple, TitleEntry,
    WorkRecord,
};

pub(crate) fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            c => out.push(c),
        }
    }
    out
}

pub(crate) fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

fn join_pointers(ps: &[LocalPointer]) -> Option<String> {
    (!ps.is_empty()).then(|| ps.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "))
}

fn join_refs(rs: &[RelRef]) -> String {
    rs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

type Attrs<'a> = Vec<(&'a str, Option<String>)>;

struct Writer {
    out: String,
    depth: usize,
}

impl Writer {
    fn indent(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    fn start_tag(&mut self, name: &str, attrs: &Attrs) {
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            if let Some(v) = v {
                self.out.push(' ');
                self.out.push_str(k);
                self.out.push_str("=\"");
                self.out.push_str(&escape_attr(v));
                self.out.push('"');
            }
        }
    }

    fn open(&mut self, name: &str, attrs: Attrs) {
        self.indent();
        self.start_tag(name, &attrs);
        self.out.push_str(">\n");
        self.depth += 1;
    }

    fn close(&mut self, name: &str) {
        self.depth -= 1;
        self.indent();
        self.out.push_str("</");
        self.out.push_str(name);
        self.out.push_str(">\n");
    }

    fn empty(&mut self, name: &str, attrs: Attrs) {
        self.indent();
        self.start_tag(name, &attrs);
        self.out.push_str("/>\n");
    }

    /// Element with inline content already escaped.
    fn inline(&mut self, name: &str, attrs: Attrs, content: &str) {
        self.indent();
        self.start_tag(name, &attrs);
        self.out.push('>');
        self.out.push_str(content);
        self.out.push_str("</");
        self.out.push_str(name);
        self.out.push_str(">\n");
    }

    fn leaf(&mut self, name: &str, attrs: Attrs, text: &str) {
        self.inline(name, attrs, &escape_text(text));
    }

    fn raw(&mut self, xml: &str) {
        self.indent();
        self.out.push_str(xml);
        self.out.push('\n');
    }
}

/// Serializes a valid record; invalid records are refused with their report.
pub fn serialize_work_record(record: &WorkRecord) -> Result<String, TeiError> {
    let report = validate_record(record);
    if !report.is_valid() {
        return Err(TeiError::Invalid(report));
    }
    Ok(serialize_work_record_unchecked(record))
}

/// Canonical serialization without the validity gate.
pub fn serialize_work_record_unchecked(record: &WorkRecord) -> String {
    let mut w = Writer { out: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"), depth: 0 };
    w.open("TEI", vec![("xmlns", Some(TEI_NS.into())), ("xml:lang", Some("en".into()))]);
    write_header(&mut w, record);
    w.open("text", vec![]);
    w.open("body", vec![]);
    w.open("bibl", vec![("xml:id", Some(format!("work-{}", record.uri.id)))]);

    for a in &record.authors {
        let attrs = vec![("ref", Some(a.person.to_string())), ("source", join_pointers(&a.sources))];
        write_name(&mut w, "author", attrs, &a.name);
    }
    for t in &record.titles {
        write_title(&mut w, t);
    }
    if let Some(tl) = &record.text_lang {
        let attrs = vec![("mainLang", Some(tl.main_lang.clone())), ("source", join_pointers(&tl.sources))];
        match &tl.label {
            Some(label) => w.leaf("textLang", attrs, label),
            None => w.empty("textLang", attrs),
        }
    }
    for n in &record.notes {
        write_note(&mut w, n);
    }
    for i in &record.idnos {
        w.leaf("idno", vec![("type", Some(i.scheme.clone()))], &i.value);
    }
    for b in &record.witnesses {
        write_witness(&mut w, b);
    }
    if !record.relations.is_empty() {
        w.open("listRelation", vec![]);
        for r in &record.relations {
            write_relation(&mut w, r);
        }
        w.close("listRelation");
    }
    for s in &record.subjects {
        w.empty("term", vec![("type", Some("subject".into())), ("key", Some(s.clone()))]);
    }
    for x in &record.extensions {
        w.raw(x);
    }

    w.close("bibl");
    w.close("body");
    w.close("text");
    w.close("TEI");
    w.out
}

fn write_header(w: &mut Writer, record: &WorkRecord) {
    w.open("teiHeader", vec![]);
    w.open("fileDesc", vec![]);
    w.open("titleStmt", vec![]);
    let title = record.display_title().unwrap_or_else(|| record.uri.to_string());
    w.leaf("title", vec![], &title);
    for e in &record.editors {
        w.leaf("editor", vec![], e);
    }
    w.close("titleStmt");
    w.open("publicationStmt", vec![]);
    w.leaf("authority", vec![], "Syriaca.org");
    w.leaf("idno", vec![("type", Some("URI".into()))], &format!("{}/tei", record.uri));
    w.close("publicationStmt");
    w.open("sourceDesc", vec![]);
    w.leaf("p", vec![], "Born digital.");
    w.close("sourceDesc");
    w.close("fileDesc");
    if !record.change_log.is_empty() {
        w.open("revisionDesc", vec![]);
        for c in &record.change_log {
            w.leaf("change", vec![("who", Some(c.who.clone())), ("when", c.when.clone())], &c.what);
        }
        w.close("revisionDesc");
    }
    w.close("teiHeader");
}

fn write_name(w: &mut Writer, element: &str, attrs: Attrs, name: &PersonName) {
    w.open(element, attrs);
    if let Some(f) = &name.forename {
        w.leaf("forename", vec![], f);
    }
    if let Some(s) = &name.surname {
        w.leaf("surname", vec![], s);
    }
    w.close(element);
}

fn write_title(w: &mut Writer, t: &TitleEntry) {
    let tags = (!t.tags.is_empty()).then(|| t.tags.iter().map(|t| t.token()).collect::<Vec<_>>().join(" "));
    let attrs = vec![
        ("xml:id", (!t.local_id.is_empty()).then(|| t.local_id.clone())),
        ("xml:lang", Some(t.lang.clone())),
        ("source", join_pointers(&t.sources)),
        ("syriaca-tags", tags),
    ];
    let mut content = String::new();
    for piece in &t.content {
        match piece {
            Inline::Text(s) => content.push_str(&escape_text(s)),
            Inline::Foreign { lang, text } => {
                content.push_str(&format!(
                    "<foreign xml:lang=\"{}\">{}</foreign>",
                    escape_attr(lang),
                    escape_text(text)
                ));
            }
        }
    }
    w.inline("title", attrs, &content);
}

fn write_note(w: &mut Writer, n: &NotePart) {
    let mut attrs = vec![("type", Some(n.note_type.as_str().to_string()))];
    match n.segments.as_slice() {
        [seg] if !n.quoted => {
            attrs.push(("xml:lang", seg.lang.clone()));
            attrs.push(("source", join_pointers(&n.sources)));
            w.leaf("note", attrs, &seg.text);
        }
        [seg] => {
            attrs.push(("source", join_pointers(&n.sources)));
            w.open("note", attrs);
            w.leaf("quote", vec![("xml:lang", seg.lang.clone())], &seg.text);
            w.close("note");
        }
        segs => {
            attrs.push(("source", join_pointers(&n.sources)));
            w.open("note", attrs);
            for seg in segs {
                let seg_attrs = vec![("xml:lang", seg.lang.clone())];
                if n.quoted {
                    let quote = format!("<quote>{}</quote>", escape_text(&seg.text));
                    w.inline("seg", seg_attrs, &quote);
                } else {
                    w.leaf("seg", seg_attrs, &seg.text);
                }
            }
            w.close("note");
        }
    }
}

fn write_witness(w: &mut Writer, b: &BiblWitness) {
    w.open("bibl", vec![("type", Some(b.witness_class.clone())), ("xml:id", Some(b.local_id.clone()))]);
    for c in &b.creators {
        write_name(w, "author", vec![], c);
    }
    if let Some(t) = &b.title {
        w.leaf("title", vec![("level", t.level.clone()), ("xml:lang", t.lang.clone())], &t.text);
    }
    if let Some(p) = &b.record_ptr {
        w.empty("ptr", vec![("target", Some(p.to_string()))]);
    }
    for cr in &b.cited_ranges {
        w.leaf(
            "citedRange",
            vec![("unit", Some(cr.unit.clone())), ("from", Some(cr.from.clone())), ("to", Some(cr.to.clone()))],
            &cr.display,
        );
    }
    if let Some(ms) = &b.ms_identifier {
        w.open("msIdentifier", vec![]);
        if let Some(c) = &ms.country {
            w.leaf("country", vec![], c);
        }
        if let Some(s) = &ms.settlement {
            w.leaf("settlement", vec![], s);
        }
        if let Some(c) = &ms.collection {
            w.leaf("collection", vec![("xml:lang", c.lang.clone())], &c.name);
        }
        w.leaf("idno", vec![("type", Some("URI".into()))], &ms.uri.to_string());
        if !ms.alt_idnos.is_empty() {
            w.open("altIdentifier", vec![]);
            for i in &ms.alt_idnos {
                w.leaf("idno", vec![("type", Some(i.scheme.clone()))], &i.value);
            }
            w.close("altIdentifier");
        }
        w.close("msIdentifier");
    }
    if let Some(l) = &b.locus {
        w.open("biblScope", vec![]);
        w.leaf("locus", vec![("from", Some(l.from.clone())), ("to", Some(l.to.clone()))], &l.display);
        if let Some(p) = &l.part_uri {
            w.leaf("idno", vec![("type", Some("URI".into()))], &p.to_string());
        }
        w.close("biblScope");
    }
    if let Some(l) = &b.text_lang {
        w.empty("textLang", vec![("mainLang", Some(l.clone()))]);
    }
    for x in &b.extensions {
        w.raw(x);
    }
    w.close("bibl");
}

fn write_relation(w: &mut Writer, r: &RelationTriple) {
    w.empty(
        "relation",
        vec![
            ("xml:id", r.local_id.clone()),
            ("type", r.rel_type.clone()),
            ("active", Some(join_refs(&r.subjects))),
            ("ref", Some(r.predicate.clone())),
            ("passive", Some(join_refs(&r.objects))),
            ("source", join_pointers(&r.sources)),
        ],
    );
}
