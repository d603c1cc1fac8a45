use std::collections::BTreeSet;

use roxmltree::{Document, Node};

use super::{collapse_ws, normalize_inline, TeiError, TEI_NS, XML_NS};
use crate::model::{
    AuthorRef, BiblWitness, ChangeEntry, CitedRange, Collection, EntityUri, IdnoEntry, Inline, LocalPointer, Locus,
    MsIdentifier, NotePart, NoteSegment, NoteType, PersonName, RelRef, RelationTriple, TextLang, TitleEntry, TitleTag,
    WitnessTitle, WorkRecord,
};

/// Splits a space-separated multi-valued attribute.
pub fn split_list(value: &str) -> Vec<&str> {
    value.split_whitespace().collect()
}

fn structure(element: &str, message: impl Into<String>) -> TeiError {
    TeiError::Structure { element: element.to_string(), message: message.into() }
}

fn is(node: &Node, name: &str) -> bool {
    node.is_element() && node.tag_name().name() == name
}

fn children<'a, 'input>(node: Node<'a, 'input>, name: &'a str) -> impl Iterator<Item = Node<'a, 'input>> + 'a {
    node.children().filter(move |c| is(c, name))
}

fn child<'a, 'input>(node: Node<'a, 'input>, name: &str) -> Option<Node<'a, 'input>> {
    node.children().find(|c| is(c, name))
}

fn xml_attr<'a>(node: Node<'a, '_>, local: &str) -> Option<&'a str> {
    node.attribute((XML_NS, local))
}

fn attr_string(node: Node, name: &str) -> Option<String> {
    node.attribute(name).map(str::to_string)
}

/// Whitespace-collapsed concatenation of all descendant text.
fn text(node: Node) -> String {
    let raw: String = node.descendants().filter(|n| n.is_text()).filter_map(|n| n.text()).collect();
    collapse_ws(&raw)
}

fn opt_text(node: Option<Node>) -> Option<String> {
    node.map(text)
}

fn pointers(node: Node, attr: &str) -> Result<Vec<LocalPointer>, TeiError> {
    let Some(value) = node.attribute(attr) else {
        return Ok(Vec::new());
    };
    split_list(value)
        .into_iter()
        .map(|tok| {
            LocalPointer::parse(tok).ok_or_else(|| {
                structure(node.tag_name().name(), format!("{attr} token {tok:?} is not a local pointer"))
            })
        })
        .collect()
}

fn entity_uri(element: &str, value: &str) -> Result<EntityUri, TeiError> {
    EntityUri::parse(value.trim()).map_err(|e| structure(element, e.to_string()))
}

/// Parses a TEI document holding exactly one work `<bibl>` in its body.
pub fn parse_work_record(doc: &str) -> Result<WorkRecord, TeiError> {
    let doc = Document::parse(doc).map_err(|e| {
        let pos = e.pos();
        TeiError::Xml { line: pos.row, column: pos.col, message: e.to_string() }
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "TEI" {
        return Err(structure("TEI", format!("root element is <{}>", root.tag_name().name())));
    }
    let body = child(root, "text")
        .and_then(|t| child(t, "body"))
        .ok_or_else(|| TeiError::Cardinality("no /TEI/text/body".into()))?;
    let bibls: Vec<_> = children(body, "bibl").collect();
    let work = match bibls.as_slice() {
        [one] => *one,
        [] => return Err(TeiError::Cardinality("no work bibl in body".into())),
        many => return Err(TeiError::Cardinality(format!("{} work bibl elements in body", many.len()))),
    };

    let mut record = parse_work_bibl(work)?;
    check_bibl_id(work, &record.uri)?;

    if let Some(header) = child(root, "teiHeader") {
        if let Some(ts) = child(header, "fileDesc").and_then(|f| child(f, "titleStmt")) {
            record.editors = children(ts, "editor").map(text).collect();
        }
        if let Some(rev) = child(header, "revisionDesc") {
            record.change_log = children(rev, "change")
                .map(|c| ChangeEntry {
                    who: c.attribute("who").unwrap_or_default().to_string(),
                    when: attr_string(c, "when"),
                    what: text(c),
                })
                .collect();
        }
    }
    Ok(record)
}

fn check_bibl_id(work: Node, uri: &EntityUri) -> Result<(), TeiError> {
    let id = xml_attr(work, "id").ok_or_else(|| TeiError::IdMismatch("work bibl has no xml:id".into()))?;
    let suffix = id
        .strip_prefix("work-")
        .filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
        .ok_or_else(|| TeiError::IdMismatch(format!("work bibl xml:id {id:?} is not work-NNN")))?;
    match suffix.parse::<u64>() {
        Ok(n) if n == uri.id => Ok(()),
        _ => Err(TeiError::IdMismatch(format!("xml:id {id:?} does not match {uri}"))),
    }
}

fn parse_work_bibl(work: Node) -> Result<WorkRecord, TeiError> {
    let uri_idno = children(work, "idno").find(|i| i.attribute("type") == Some("URI")).ok_or(TeiError::NoUri)?;
    let uri = entity_uri("idno", &text(uri_idno))?;
    let mut record = WorkRecord::new(uri);
    record.idnos.clear();

    for node in work.children().filter(Node::is_element) {
        match node.tag_name().name() {
            "author" => record.authors.push(parse_author(node)?),
            "title" => record.titles.push(parse_title(node)?),
            "textLang" => {
                if record.text_lang.is_some() {
                    return Err(TeiError::Cardinality("more than one textLang in work bibl".into()));
                }
                let label = text(node);
                record.text_lang = Some(TextLang {
                    main_lang: node.attribute("mainLang").unwrap_or_default().to_string(),
                    label: (!label.is_empty()).then_some(label),
                    sources: pointers(node, "source")?,
                });
            }
            "note" if node.attribute("type").and_then(NoteType::from_name).is_some() => {
                record.notes.push(parse_note(node)?)
            }
            "idno" => record.idnos.push(IdnoEntry::new(node.attribute("type").unwrap_or_default(), text(node))),
            "bibl" => record.witnesses.push(parse_witness(node)?),
            "listRelation" => {
                for rel in node.children().filter(Node::is_element) {
                    if is(&rel, "relation") {
                        record.relations.push(parse_relation(rel)?);
                    } else {
                        return Err(structure("listRelation", format!("unexpected <{}>", rel.tag_name().name())));
                    }
                }
            }
            "term" if node.attribute("type") == Some("subject") => {
                let key = node.attribute("key").ok_or_else(|| structure("term", "subject term without key"))?;
                record.subjects.push(key.to_string());
            }
            _ => record.extensions.push(canonical_xml(node)),
        }
    }
    Ok(record)
}

fn parse_person_name(node: Node) -> PersonName {
    let forename = opt_text(child(node, "forename"));
    let surname = opt_text(child(node, "surname"));
    if forename.is_none() && surname.is_none() {
        let t = text(node);
        return PersonName { forename: (!t.is_empty()).then_some(t), surname: None };
    }
    PersonName { forename, surname }
}

fn parse_author(node: Node) -> Result<AuthorRef, TeiError> {
    let r = node.attribute("ref").ok_or_else(|| structure("author", "work author without ref"))?;
    Ok(AuthorRef {
        person: entity_uri("author", r)?,
        name: parse_person_name(node),
        sources: pointers(node, "source")?,
    })
}

fn parse_title(node: Node) -> Result<TitleEntry, TeiError> {
    let mut content = Vec::new();
    for c in node.children() {
        if c.is_text() {
            content.push(Inline::Text(c.text().unwrap_or_default().to_string()));
        } else if is(&c, "foreign") {
            content.push(Inline::Foreign { lang: xml_attr(c, "lang").unwrap_or_default().to_string(), text: text(c) });
        } else if c.is_element() {
            content.push(Inline::Text(text(c)));
        }
    }
    let tags: BTreeSet<TitleTag> = node
        .attribute("syriaca-tags")
        .map(|v| split_list(v).into_iter().map(TitleTag::from_token).collect())
        .unwrap_or_default();
    Ok(TitleEntry {
        local_id: xml_attr(node, "id").unwrap_or_default().to_string(),
        lang: xml_attr(node, "lang").unwrap_or_default().to_string(),
        content: normalize_inline(content),
        sources: pointers(node, "source")?,
        tags,
    })
}

fn parse_note(node: Node) -> Result<NotePart, TeiError> {
    let note_type = node.attribute("type").and_then(NoteType::from_name).expect("caller checked note type");
    let note_lang = xml_attr(node, "lang").map(str::to_string);
    let segs: Vec<_> = children(node, "seg").collect();
    let mut quoted = false;
    let segments = if segs.is_empty() {
        let (lang, body) = match child(node, "quote") {
            Some(q) => {
                quoted = true;
                (xml_attr(q, "lang").map(str::to_string).or(note_lang), text(q))
            }
            None => (note_lang, text(node)),
        };
        vec![NoteSegment { lang, text: body }]
    } else {
        segs.into_iter()
            .map(|s| {
                quoted |= child(s, "quote").is_some();
                NoteSegment { lang: xml_attr(s, "lang").map(str::to_string), text: text(s) }
            })
            .collect()
    };
    Ok(NotePart { note_type, segments, sources: pointers(node, "source")?, quoted })
}

fn parse_witness(node: Node) -> Result<BiblWitness, TeiError> {
    let mut w = BiblWitness::new(xml_attr(node, "id").unwrap_or_default(), node.attribute("type").unwrap_or_default());
    for c in node.children().filter(Node::is_element) {
        match c.tag_name().name() {
            "author" => w.creators.push(parse_person_name(c)),
            "title" => {
                w.title = Some(WitnessTitle {
                    level: attr_string(c, "level"),
                    lang: xml_attr(c, "lang").map(str::to_string),
                    text: text(c),
                })
            }
            "ptr" => {
                let target = c.attribute("target").ok_or_else(|| structure("ptr", "ptr without target"))?;
                w.record_ptr = Some(entity_uri("ptr", target)?);
            }
            "citedRange" => w.cited_ranges.push(CitedRange {
                unit: c.attribute("unit").unwrap_or_default().to_string(),
                from: c.attribute("from").unwrap_or_default().to_string(),
                to: c.attribute("to").unwrap_or_default().to_string(),
                display: text(c),
            }),
            "msIdentifier" => w.ms_identifier = Some(parse_ms_identifier(c)?),
            "biblScope" => {
                let locus = child(c, "locus").ok_or_else(|| structure("biblScope", "biblScope without locus"))?;
                let part_uri = children(c, "idno")
                    .find(|i| i.attribute("type") == Some("URI"))
                    .map(|i| entity_uri("idno", &text(i)))
                    .transpose()?;
                w.locus = Some(Locus {
                    from: locus.attribute("from").unwrap_or_default().to_string(),
                    to: locus.attribute("to").unwrap_or_default().to_string(),
                    display: text(locus),
                    part_uri,
                });
            }
            "textLang" => w.text_lang = attr_string(c, "mainLang"),
            _ => w.extensions.push(canonical_xml(c)),
        }
    }
    Ok(w)
}

fn parse_ms_identifier(node: Node) -> Result<MsIdentifier, TeiError> {
    let uri = children(node, "idno")
        .find(|i| i.attribute("type") == Some("URI"))
        .ok_or_else(|| structure("msIdentifier", "msIdentifier without URI idno"))?;
    let alt_idnos = children(node, "altIdentifier")
        .flat_map(|a| children(a, "idno"))
        .map(|i| IdnoEntry::new(i.attribute("type").unwrap_or_default(), text(i)))
        .collect();
    Ok(MsIdentifier {
        country: opt_text(child(node, "country")),
        settlement: opt_text(child(node, "settlement")),
        collection: child(node, "collection")
            .map(|c| Collection { lang: xml_attr(c, "lang").map(str::to_string), name: text(c) }),
        uri: entity_uri("idno", &text(uri))?,
        alt_idnos,
    })
}

fn rel_refs(node: Node, attr: &str) -> Result<Vec<RelRef>, TeiError> {
    split_list(node.attribute(attr).unwrap_or_default())
        .into_iter()
        .map(|tok| RelRef::parse(tok).map_err(|e| structure("relation", format!("@{attr}: {e}"))))
        .collect()
}

fn parse_relation(node: Node) -> Result<RelationTriple, TeiError> {
    // Mutual relations use @mutual in TEI; treat them as both sides active.
    let subjects = if node.has_attribute("mutual") { rel_refs(node, "mutual")? } else { rel_refs(node, "active")? };
    let objects = if node.has_attribute("mutual") { subjects.clone() } else { rel_refs(node, "passive")? };
    Ok(RelationTriple {
        local_id: xml_attr(node, "id").map(str::to_string),
        rel_type: attr_string(node, "type"),
        subjects,
        predicate: node.attribute("ref").unwrap_or_default().to_string(),
        objects,
        sources: pointers(node, "source")?,
    })
}

/// Canonical XML for an element subtree: attributes sorted by name, namespace
/// declared only where it departs from the TEI default.
pub(crate) fn canonical_xml(node: Node) -> String {
    let mut out = String::new();
    write_canonical(node, Some(TEI_NS), &mut out);
    out
}

fn write_canonical(node: Node, parent_ns: Option<&str>, out: &mut String) {
    if node.is_text() {
        out.push_str(&super::write::escape_text(node.text().unwrap_or_default()));
        return;
    }
    if !node.is_element() {
        return;
    }
    let name = node.tag_name().name();
    let ns = node.tag_name().namespace().or(Some(TEI_NS));
    let mut attrs: Vec<(String, &str)> = node
        .attributes()
        .filter_map(|a| match a.namespace() {
            None => Some((a.name().to_string(), a.value())),
            Some(XML_NS) => Some((format!("xml:{}", a.name()), a.value())),
            Some(_) => None,
        })
        .collect();
    attrs.sort();
    out.push('<');
    out.push_str(name);
    if ns != parent_ns {
        out.push_str(&format!(" xmlns=\"{}\"", super::write::escape_attr(ns.unwrap_or_default())));
    }
    for (k, v) in attrs {
        out.push_str(&format!(" {k}=\"{}\"", super::write::escape_attr(v)));
    }
    if node.has_children() {
        out.push('>');
        for c in node.children() {
            write_canonical(c, ns, out);
        }
        out.push_str(&format!("</{name}>"));
    } else {
        out.push_str("/>");
    }
}
