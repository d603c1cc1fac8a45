use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::json;
use syriaca_works::model::validate_record_with;
use syriaca_works::rdf::{GraphFormat, Triple};
use syriaca_works::{record_to_triples, serialize_graph, WorkRecord};

use crate::config::Settings;
use crate::inputs::{load_records, write_all, Printer};
use crate::{CliError, CmdResult, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Nt,
    Ttl,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Nt => "nt",
            Format::Ttl => "ttl",
            Format::Json => "json",
        }
    }

    fn graph(self) -> Option<GraphFormat> {
        match self {
            Format::Nt => Some(GraphFormat::NTriples),
            Format::Ttl => Some(GraphFormat::Turtle),
            Format::Json => None,
        }
    }
}

fn json_text<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("records serialize") + "\n"
}

fn triples(record: &WorkRecord, settings: &Settings, path: &Path) -> Result<Vec<Triple>, CliError> {
    record_to_triples(record, &settings.ns).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

pub fn run(
    paths: &[PathBuf],
    to: Format,
    dest: Option<&Path>,
    merge: bool,
    settings: &Settings,
    out: &Printer,
) -> CmdResult {
    let records = load_records(paths)?;
    if records.is_empty() {
        return Ok(Status::Ok);
    }

    let mut invalid = false;
    for (path, record) in &records {
        let report = validate_record_with(record, &settings.ns);
        for item in report.errors() {
            invalid = true;
            let shown = path.display().to_string();
            out.emit(
                || format!("{shown}: error {} at {}: {}", item.code, item.path, item.message),
                &json!({"file": shown, "code": item.code, "path": item.path, "message": item.message}),
            );
        }
    }
    if invalid {
        return Ok(Status::Findings);
    }

    let bodies: Vec<(PathBuf, String)> = if merge {
        let body = match to.graph() {
            Some(g) => {
                let mut seen = HashSet::new();
                let mut all = Vec::new();
                for (path, record) in &records {
                    all.extend(triples(record, settings, path)?.into_iter().filter(|t| seen.insert(t.clone())));
                }
                serialize_graph(&all, g, &settings.ns)
            }
            None => json_text(&records.iter().map(|(_, r)| r).collect::<Vec<_>>()),
        };
        vec![(PathBuf::new(), body)]
    } else {
        records
            .iter()
            .map(|(path, record)| {
                let body = match to.graph() {
                    Some(g) => serialize_graph(&triples(record, settings, path)?, g, &settings.ns),
                    None => json_text(record),
                };
                Ok((path.clone(), body))
            })
            .collect::<Result<_, CliError>>()?
    };

    match dest {
        None => {
            for (_, body) in bodies {
                print!("{body}");
            }
        }
        Some(file) if merge => {
            write_all(&BTreeMap::from([(file.to_path_buf(), bodies.into_iter().next().expect("one body").1)]))?;
        }
        Some(dir) => {
            let mut files = BTreeMap::new();
            for (src, body) in bodies {
                let stem = src.file_stem().unwrap_or_default().to_string_lossy();
                let target = dir.join(format!("{stem}.{}", to.extension()));
                if files.insert(target.clone(), body).is_some() {
                    return Err(CliError(format!("two inputs map to {}", target.display())));
                }
            }
            write_all(&files)?;
        }
    }
    Ok(Status::Ok)
}
