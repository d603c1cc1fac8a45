use std::path::PathBuf;

use serde_json::json;
use syriaca_works::model::{validate_record_with, Severity, ValidationItem};
use syriaca_works::parse_work_record;
use syriaca_works::registry::{lint_corpus_directionality, ViolationKind};
use syriaca_works::taxonomy::validate_subject_codes;

use crate::config::Settings;
use crate::inputs::{collect_xml, load_records, read, Printer};
use crate::{CmdResult, Status};

fn severity(s: Severity, strict: bool) -> &'static str {
    match s {
        Severity::Error => "error",
        Severity::Warning if strict => "error",
        Severity::Warning => "warning",
    }
}

pub fn run(paths: &[PathBuf], strict: bool, settings: &Settings, out: &Printer) -> CmdResult {
    let mut failed = false;
    for path in collect_xml(paths)? {
        let shown = path.display().to_string();
        let items: Vec<ValidationItem> = match parse_work_record(&read(&path)?) {
            Ok(record) => {
                let mut report = validate_record_with(&record, &settings.ns);
                report.merge(validate_subject_codes(&record));
                let mut items = report.items;
                items.sort();
                items
            }
            Err(e) => vec![ValidationItem {
                severity: Severity::Error,
                code: e.code().to_string(),
                path: String::new(),
                message: e.to_string(),
            }],
        };
        let valid = !items.iter().any(|i| i.severity == Severity::Error || strict);
        failed |= !valid;
        let json_items: Vec<_> = items
            .iter()
            .map(|i| json!({"severity": severity(i.severity, strict), "code": i.code, "path": i.path, "message": i.message}))
            .collect();
        out.emit(
            || {
                if items.is_empty() {
                    return format!("{shown}: OK");
                }
                items
                    .iter()
                    .map(|i| {
                        let at = if i.path.is_empty() { String::new() } else { format!(" at {}", i.path) };
                        format!("{shown}: {} {}{at}: {}", severity(i.severity, strict), i.code, i.message)
                    })
                    .collect::<Vec<_>>()
                    .join("\n")
            },
            &json!({"file": shown, "valid": valid, "items": json_items}),
        );
    }
    Ok(Status::from_findings(failed))
}

pub fn lint(paths: &[PathBuf], settings: &Settings, out: &Printer) -> CmdResult {
    let records: Vec<_> = load_records(paths)?.into_iter().map(|(_, r)| r).collect();
    let violations = lint_corpus_directionality(&records, &settings.ns);
    for v in &violations {
        let (a, b) = (&v.works.0, &v.works.1);
        out.emit(
            || match v.kind {
                ViolationKind::MutualRelation => {
                    format!("MUTUAL_RELATION {a} {b}: both records assert <{}> or its inverse", v.predicate)
                }
                ViolationKind::ParentSide => {
                    format!("PARENT_SIDE {a} {b}: <{}> belongs in the record of {a}", v.predicate)
                }
            },
            v,
        );
    }
    if !out.json {
        println!("{} records, {} violations", records.len(), violations.len());
    }
    Ok(Status::from_findings(!violations.is_empty()))
}
