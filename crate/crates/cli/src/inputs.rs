use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use syriaca_works::registry::write_atomic;
use syriaca_works::{parse_work_record, WorkRecord};
use walkdir::WalkDir;

use crate::CliError;

pub struct Printer {
    pub json: bool,
}

impl Printer {
    /// Prints `text` in text mode or `value` as one JSON line.
    pub fn emit<T: Serialize>(&self, text: impl FnOnce() -> String, value: &T) {
        if self.json {
            println!("{}", serde_json::to_string(value).expect("report serializes"));
        } else {
            println!("{}", text());
        }
    }
}

/// Files named directly, plus `*.xml` files under named directories, in path
/// order. Hidden files are skipped.
pub fn collect_xml(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_file() {
            out.push(p.clone());
        } else if p.is_dir() {
            for entry in WalkDir::new(p).sort_by_file_name() {
                let entry = entry?;
                let name = entry.file_name().to_string_lossy();
                if entry.file_type().is_file() && name.ends_with(".xml") && !name.starts_with('.') {
                    out.push(entry.into_path());
                }
            }
        } else {
            return Err(CliError(format!("{}: no such file or directory", p.display())));
        }
    }
    Ok(out)
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

/// Parses every record, failing on the first unreadable or malformed file.
pub fn load_records(paths: &[PathBuf]) -> Result<Vec<(PathBuf, WorkRecord)>, CliError> {
    collect_xml(paths)?
        .into_iter()
        .map(|p| {
            let record = parse_work_record(&read(&p)?).map_err(|e| CliError(format!("{}: {e}", p.display())))?;
            Ok((p, record))
        })
        .collect()
}

/// Writes all files or none: everything is prepared by the caller first,
/// and each file is replaced atomically.
pub fn write_all(files: &BTreeMap<PathBuf, String>) -> Result<(), CliError> {
    for (path, body) in files {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError(format!("{}: {e}", dir.display())))?;
        }
        write_atomic(path, body.as_bytes())?;
    }
    Ok(())
}
