use roxmltree::{Document, Node};
use serde::Serialize;

use super::{LinkageError, SourceMs, WorkStub};
use crate::model::{normalize_lang, EntityKind, EntityUri, IdnoEntry, Locus};
use crate::tei::collapse_ws;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestWarning {
    pub stub_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestOutcome {
    pub stubs: Vec<WorkStub>,
    pub warnings: Vec<IngestWarning>,
}

fn children<'a, 'i>(n: Node<'a, 'i>, name: &'a str) -> impl Iterator<Item = Node<'a, 'i>> + 'a {
    n.children().filter(move |c| c.is_element() && c.tag_name().name() == name)
}

fn child<'a, 'i>(n: Node<'a, 'i>, name: &'a str) -> Option<Node<'a, 'i>> {
    children(n, name).next()
}

fn text(n: Node) -> String {
    collapse_ws(&n.descendants().filter(|d| d.is_text()).filter_map(|d| d.text()).collect::<String>())
}

fn xml_lang<'a>(n: Node<'a, '_>) -> Option<&'a str> {
    n.attribute((crate::tei::XML_NS, "lang"))
}

/// Reads a catalogue document:
///
/// ```xml
/// <catalogue xml:id="wright" citation="Wright, Catalogue (1870)">
///   <msDesc>
///     <msIdentifier><idno type="URI">http://syriaca.org/manuscript/20001</idno></msIdentifier>
///     <msItem>
///       <locus from="1" to="23">1-23</locus>
///       <author ref="http://syriaca.org/person/650">Narsai</author>
///       <title xml:lang="en">Homily on the Angel</title>
///       <incipit xml:lang="syr">...</incipit>
///       <idno type="BHS">49</idno>
///     </msItem>
///   </msDesc>
/// </catalogue>
/// ```
///
/// Element names are matched by local name in any namespace. Items are
/// numbered from 1 across the document and become stubs `{id}-{nnnn}`.
/// Items with neither title nor incipit are skipped with a warning.
pub fn ingest_catalogue_entries(xml: &str) -> Result<IngestOutcome, LinkageError> {
    if xml.trim().is_empty() {
        return Ok(IngestOutcome::default());
    }
    let doc = Document::parse(xml).map_err(|e| LinkageError::Catalogue(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "catalogue" {
        return Err(LinkageError::Catalogue(format!(
            "root element is <{}>, expected <catalogue>",
            root.tag_name().name()
        )));
    }
    let doc_id = root
        .attribute((crate::tei::XML_NS, "id"))
        .or_else(|| root.attribute("id"))
        .filter(|s| !s.is_empty())
        .ok_or_else(|| LinkageError::Catalogue("catalogue has no xml:id".into()))?;
    let citation = root.attribute("citation").map(collapse_ws).unwrap_or_else(|| doc_id.to_string());

    let mut out = IngestOutcome::default();
    let mut index = 0usize;
    for ms_desc in children(root, "msDesc") {
        let ms_uri = child(ms_desc, "msIdentifier")
            .and_then(|m| children(m, "idno").find(|i| i.attribute("type") == Some("URI")))
            .map(text);
        let ms_uri = match ms_uri.as_deref().map(EntityUri::parse) {
            Some(Ok(u)) if u.kind == EntityKind::Manuscript && u.fragment.is_none() => Some(u),
            Some(_) => {
                out.warnings.push(IngestWarning {
                    stub_id: String::new(),
                    message: format!("msDesc manuscript URI {:?} is not a manuscript URI", ms_uri.unwrap_or_default()),
                });
                None
            }
            None => None,
        };
        for item in children(ms_desc, "msItem") {
            index += 1;
            let stub_id = format!("{doc_id}-{index:04}");
            let mut warn = |message: String| {
                out.warnings.push(IngestWarning { stub_id: stub_id.clone(), message });
            };
            let mut lang_of = |n: Node, what: &str| -> Option<String> {
                let raw = xml_lang(n).unwrap_or("");
                match normalize_lang(raw) {
                    Ok((l, _)) => Some(l),
                    Err(e) => {
                        warn(format!("{what} dropped: {e}"));
                        None
                    }
                }
            };

            let mut titles = Vec::new();
            for t in children(item, "title") {
                let body = text(t);
                if body.is_empty() {
                    continue;
                }
                if let Some(l) = lang_of(t, "title") {
                    titles.push((l, body));
                }
            }
            let incipit = child(item, "incipit")
                .filter(|n| !text(*n).is_empty())
                .and_then(|n| lang_of(n, "incipit").map(|l| (l, text(n))));

            let (author_uri, author_name) = match child(item, "author") {
                Some(a) => {
                    let uri = match a.attribute("ref").map(EntityUri::parse) {
                        Some(Ok(u)) if u.kind == EntityKind::Person && u.fragment.is_none() => Some(u),
                        Some(_) => {
                            warn("author ref is not a person URI".into());
                            None
                        }
                        None => None,
                    };
                    let name = text(a);
                    (uri, (!name.is_empty()).then_some(name))
                }
                None => (None, None),
            };

            let locus = child(item, "locus").map(|l| {
                let display = text(l);
                let from = l.attribute("from").map(str::to_string).unwrap_or_else(|| display.clone());
                let to = l.attribute("to").map(str::to_string).unwrap_or_else(|| from.clone());
                Locus { from, to, display, part_uri: None }
            });
            let source_ms = match (&ms_uri, locus) {
                (Some(ms), Some(locus)) => Some(SourceMs { manuscript: ms.clone(), locus }),
                (Some(_), None) => {
                    warn("item has no locus; manuscript source dropped".into());
                    None
                }
                _ => None,
            };

            let idnos = children(item, "idno")
                .filter_map(|i| {
                    let scheme = i.attribute("type")?.to_string();
                    let value = text(i);
                    (scheme != "URI" && !value.is_empty()).then(|| IdnoEntry::new(scheme, value))
                })
                .collect();

            let stub = WorkStub {
                stub_id: stub_id.clone(),
                titles,
                author_uri,
                author_name,
                incipit,
                source_ms,
                idnos,
                provenance: citation.clone(),
            };
            if stub.has_content() {
                out.stubs.push(stub);
            } else {
                out.warnings
                    .push(IngestWarning { stub_id, message: "item has no title and no incipit; skipped".into() });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"<catalogue xml:id="wright" citation="Wright, Catalogue (1870)">
  <msDesc>
    <msIdentifier><idno type="URI">http://syriaca.org/manuscript/20001</idno></msIdentifier>
    <msItem>
      <locus from="1" to="23">1-23</locus>
      <author ref="http://syriaca.org/person/650">Narsai</author>
      <title xml:lang="en">Homily on the
        Angel</title>
      <idno type="BHS">49</idno>
    </msItem>
    <msItem>
      <incipit xml:lang="syr">ܫܡܥܘ ܐܚܝ</incipit>
    </msItem>
    <msItem>
      <locus>24</locus>
    </msItem>
  </msDesc>
</catalogue>"#;

    #[test]
    fn reads_items() {
        let out = ingest_catalogue_entries(DOC).unwrap();
        assert_eq!(out.stubs.len(), 2);
        let a = &out.stubs[0];
        assert_eq!(a.stub_id, "wright-0001");
        assert_eq!(a.titles, [("en".to_string(), "Homily on the Angel".to_string())]);
        assert_eq!(a.author_uri, Some(EntityUri::new(EntityKind::Person, 650)));
        let ms = a.source_ms.as_ref().unwrap();
        assert_eq!(ms.manuscript, EntityUri::new(EntityKind::Manuscript, 20001));
        assert_eq!((ms.locus.from.as_str(), ms.locus.to.as_str(), ms.locus.display.as_str()), ("1", "23", "1-23"));
        assert_eq!(a.idnos, [IdnoEntry::new("BHS", "49")]);
        assert_eq!(a.provenance, "Wright, Catalogue (1870)");

        let b = &out.stubs[1];
        assert_eq!(b.stub_id, "wright-0002");
        assert!(b.titles.is_empty());
        assert_eq!(b.incipit.as_ref().unwrap().0, "syr");

        let warned: Vec<_> = out.warnings.iter().map(|w| w.stub_id.as_str()).collect();
        assert_eq!(warned, ["wright-0002", "wright-0003"]);
        assert!(out.warnings[0].message.contains("no locus"));
    }

    #[test]
    fn empty_inputs() {
        assert!(ingest_catalogue_entries("").unwrap().stubs.is_empty());
        assert!(ingest_catalogue_entries("<catalogue xml:id=\"x\"/>").unwrap().stubs.is_empty());
        assert!(ingest_catalogue_entries("<catalogue/>").is_err());
        assert!(ingest_catalogue_entries("<list xml:id=\"x\"/>").is_err());
    }

    #[test]
    fn deterministic() {
        assert_eq!(ingest_catalogue_entries(DOC).unwrap(), ingest_catalogue_entries(DOC).unwrap());
    }
}
