//! Preliminary subject taxonomy for works, loaded from a `code\tparent\tlabel` table.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Severity, ValidationReport, WorkRecord};

const BUILTIN_TABLE: &str = include_str!("../data/taxonomy.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("NOT_FOUND: no subject with code {0:?}")]
    NotFound(String),
    #[error("taxonomy table line {line}: {message}")]
    Table { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubjectNode {
    pub code: String,
    pub label: String,
    pub parent: Option<String>,
    pub children: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    nodes: Vec<SubjectNode>,
    index: HashMap<String, usize>,
}

impl Taxonomy {
    /// The shipped taxonomy.
    pub fn builtin() -> &'static Taxonomy {
        static TAXONOMY: OnceLock<Taxonomy> = OnceLock::new();
        TAXONOMY.get_or_init(|| Taxonomy::from_table(BUILTIN_TABLE).expect("built-in taxonomy table is well-formed"))
    }

    /// Parses a tab-separated table with a `code parent label` header.
    /// Parents must appear before their children.
    pub fn from_table(text: &str) -> Result<Self, TaxonomyError> {
        let mut nodes: Vec<SubjectNode> = Vec::new();
        let mut index = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let err = |message: String| TaxonomyError::Table { line: line_no, message };
            if n == 0 || line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [code, parent, label] = cols.as_slice() else {
                return Err(err(format!("expected 3 columns, got {}", cols.len())));
            };
            if code.is_empty() || label.is_empty() {
                return Err(err("empty code or label".into()));
            }
            if index.contains_key(*code) {
                return Err(err(format!("duplicate code {code:?}")));
            }
            let parent = (!parent.is_empty()).then(|| parent.to_string());
            if let Some(p) = &parent {
                let &pi =
                    index.get(p.as_str()).ok_or_else(|| err(format!("parent {p:?} not defined before {code:?}")))?;
                let parent_node: &mut SubjectNode = &mut nodes[pi];
                parent_node.children.push(code.to_string());
            }
            index.insert(code.to_string(), nodes.len());
            nodes.push(SubjectNode { code: code.to_string(), label: label.to_string(), parent, children: Vec::new() });
        }
        Ok(Taxonomy { nodes, index })
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("code\tparent\tlabel\n");
        for n in &self.nodes {
            out.push_str(&format!("{}\t{}\t{}\n", n.code, n.parent.as_deref().unwrap_or(""), n.label));
        }
        out
    }

    pub fn nodes(&self) -> &[SubjectNode] {
        &self.nodes
    }

    pub fn roots(&self) -> impl Iterator<Item = &SubjectNode> {
        self.nodes.iter().filter(|n| n.parent.is_none())
    }

    pub fn lookup(&self, code: &str) -> Result<&SubjectNode, TaxonomyError> {
        self.index.get(code).map(|&i| &self.nodes[i]).ok_or_else(|| TaxonomyError::NotFound(code.to_string()))
    }

    pub fn children(&self, code: &str) -> Result<Vec<&SubjectNode>, TaxonomyError> {
        let node = self.lookup(code)?;
        Ok(node.children.iter().map(|c| &self.nodes[self.index[c]]).collect())
    }

    pub fn depth(&self, code: &str) -> Result<usize, TaxonomyError> {
        let mut depth = 1;
        let mut node = self.lookup(code)?;
        while let Some(p) = &node.parent {
            node = self.lookup(p)?;
            depth += 1;
        }
        Ok(depth)
    }

    /// One `SUBJ_UNKNOWN` error per code not in the taxonomy.
    pub fn validate_subject_codes(&self, record: &WorkRecord) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (i, code) in record.subjects.iter().enumerate() {
            if self.lookup(code).is_err() {
                report.push(
                    Severity::Error,
                    "SUBJ_UNKNOWN",
                    format!("subjects[{i}]"),
                    format!("unknown subject code {code:?}"),
                );
            }
        }
        report.sort();
        report
    }
}

pub fn lookup_subject(code: &str) -> Result<&'static SubjectNode, TaxonomyError> {
    Taxonomy::builtin().lookup(code)
}

pub fn children(code: &str) -> Result<Vec<&'static SubjectNode>, TaxonomyError> {
    Taxonomy::builtin().children(code)
}

pub fn validate_subject_codes(record: &WorkRecord) -> ValidationReport {
    Taxonomy::builtin().validate_subject_codes(record)
}
