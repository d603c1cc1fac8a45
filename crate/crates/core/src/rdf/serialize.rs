use std::collections::HashMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{NamespaceTable, Term, Triple, RDF_TYPE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    NTriples,
    Turtle,
}

impl GraphFormat {
    pub fn extension(self) -> &'static str {
        match self {
            GraphFormat::NTriples => "nt",
            GraphFormat::Turtle => "ttl",
        }
    }

    pub fn media_type(self) -> &'static str {
        match self {
            GraphFormat::NTriples => "application/n-triples",
            GraphFormat::Turtle => "text/turtle",
        }
    }
}

/// Serializes triples in input order. Turtle output declares every prefix of
/// `ns` and groups statements by subject in order of first appearance.
pub fn serialize_graph(triples: &[Triple], format: GraphFormat, ns: &NamespaceTable) -> String {
    match format {
        GraphFormat::NTriples => triples.iter().map(|t| ntriples_line(t) + "\n").collect(),
        GraphFormat::Turtle => turtle(triples, ns),
    }
}

fn escape_literal(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
}

fn iri_ref(iri: &str, out: &mut String) {
    out.push('<');
    for c in iri.chars() {
        if c.is_control() || c == ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') {
            let _ = write!(out, "\\u{:04X}", c as u32);
        } else {
            out.push(c);
        }
    }
    out.push('>');
}

fn literal(lexical: &str, lang: Option<&str>, out: &mut String) {
    out.push('"');
    escape_literal(lexical, out);
    out.push('"');
    if let Some(lang) = lang {
        out.push('@');
        out.push_str(lang);
    }
}

pub(super) fn ntriples_line(t: &Triple) -> String {
    let mut out = String::new();
    iri_ref(&t.subject, &mut out);
    out.push(' ');
    iri_ref(&t.predicate, &mut out);
    out.push(' ');
    match &t.object {
        Term::Iri(i) => iri_ref(i, &mut out),
        Term::Literal { lexical, lang } => literal(lexical, lang.as_deref(), &mut out),
    }
    out.push_str(" .");
    out
}

fn is_simple_local(local: &str) -> bool {
    let mut chars = local.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn turtle_iri(iri: &str, ns: &NamespaceTable, out: &mut String) {
    match ns.compact(iri) {
        Some((prefix, local)) if is_simple_local(&local) => {
            out.push_str(prefix);
            out.push(':');
            out.push_str(&local);
        }
        _ => iri_ref(iri, out),
    }
}

fn turtle(triples: &[Triple], ns: &NamespaceTable) -> String {
    let mut out = String::new();
    for (prefix, iri) in ns.iter() {
        out.push_str("@prefix ");
        out.push_str(prefix);
        out.push_str(": ");
        iri_ref(iri, &mut out);
        out.push_str(" .\n");
    }

    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<&Triple>> = HashMap::new();
    for t in triples {
        groups
            .entry(t.subject.as_str())
            .or_insert_with(|| {
                order.push(&t.subject);
                Vec::new()
            })
            .push(t);
    }

    for subject in order {
        out.push('\n');
        turtle_iri(subject, ns, &mut out);
        let group = &groups[subject];
        let mut prev_pred: Option<&str> = None;
        for t in group {
            if prev_pred == Some(t.predicate.as_str()) {
                out.push_str(" ,\n        ");
            } else {
                if prev_pred.is_some() {
                    out.push_str(" ;");
                }
                out.push_str("\n    ");
                if t.predicate == RDF_TYPE {
                    out.push('a');
                } else {
                    turtle_iri(&t.predicate, ns, &mut out);
                }
                out.push(' ');
            }
            match &t.object {
                Term::Iri(i) => turtle_iri(i, ns, &mut out),
                Term::Literal { lexical, lang } => literal(lexical, lang.as_deref(), &mut out),
            }
            prev_pred = Some(&t.predicate);
        }
        out.push_str(" .\n");
    }
    out
}
