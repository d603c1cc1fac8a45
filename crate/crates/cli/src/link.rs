use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde_json::json;
use syriaca_works::linkage::{
    apply_decisions, generate_candidates, ingest_catalogue_entries, merge_cluster, merge_into, read_jsonl, write_jsonl,
    Band, LinkageError, MatchCandidate, MatchDecision, WorkStub,
};
use syriaca_works::model::EntityKind;
use syriaca_works::registry::{Registry, CANDIDATES_FILE, STUBS_FILE};
use syriaca_works::{parse_work_record, serialize_work_record, EntityUri, WorkRecord};

use crate::config::Settings;
use crate::inputs::{load_records, read, write_all, Printer};
use crate::{CliError, CmdResult, Status};

fn read_lines<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    read_jsonl(&read(path)?).map_err(|(line, e)| CliError(format!("{} line {line}: {e}", path.display())))
}

fn is_work(id: &str) -> bool {
    EntityUri::parse(id).is_ok_and(|u| u.kind == EntityKind::Work)
}

/// Records of a corpus directory, and the next free work id. A registry
/// root (one holding `ids.json`) supplies its allocator state.
fn load_corpus(corpus: Option<&Path>) -> Result<(Vec<WorkRecord>, u64), CliError> {
    let Some(dir) = corpus else { return Ok((Vec::new(), 1)) };
    if dir.join("ids.json").is_file() {
        let reg = Registry::open_read_only(dir)?;
        return Ok((reg.records()?, reg.next_id(EntityKind::Work)));
    }
    let records: Vec<WorkRecord> = load_records(&[dir.to_path_buf()])?.into_iter().map(|(_, r)| r).collect();
    let next = records.iter().map(|r| r.uri.id + 1).max().unwrap_or(1);
    Ok((records, next))
}

pub fn link(
    catalogues: &[PathBuf],
    corpus: Option<&Path>,
    dest: &Path,
    settings: &Settings,
    out: &Printer,
) -> CmdResult {
    let mut stubs: Vec<WorkStub> = Vec::new();
    for path in catalogues {
        let outcome =
            ingest_catalogue_entries(&read(path)?).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
        for w in &outcome.warnings {
            tracing::warn!(file = %path.display(), stub = %w.stub_id, "{}", w.message);
        }
        stubs.extend(outcome.stubs);
    }
    let (records, _) = load_corpus(corpus)?;
    stubs.extend(records.iter().map(WorkStub::from_record));
    let mut seen = BTreeSet::new();
    if let Some(dup) = stubs.iter().find(|s| !seen.insert(s.stub_id.as_str())) {
        return Err(CliError(format!("duplicate stub id {}", dup.stub_id)));
    }

    let candidates: Vec<MatchCandidate> = generate_candidates(&stubs, &settings.linkage)?
        .into_iter()
        .filter(|c| !(is_work(&c.left) && is_work(&c.right)))
        .collect();
    write_all(&BTreeMap::from([
        (dest.join(CANDIDATES_FILE), write_jsonl(&candidates)),
        (dest.join(STUBS_FILE), write_jsonl(&stubs)),
    ]))?;

    let count = |b: Band| candidates.iter().filter(|c| c.band == b).count();
    let (auto, review, reject) = (count(Band::Auto), count(Band::Review), count(Band::Reject));
    out.emit(
        || {
            format!(
                "{} stubs, {} candidates ({auto} auto, {review} review, {reject} reject)",
                stubs.len(),
                candidates.len()
            )
        },
        &json!({"stubs": stubs.len(), "candidates": candidates.len(), "auto": auto, "review": review, "reject": reject}),
    );
    Ok(Status::Ok)
}

pub struct ApplyArgs<'a> {
    pub candidates: &'a Path,
    pub decisions: &'a Path,
    pub stubs: Option<&'a Path>,
    pub corpus: Option<&'a Path>,
    pub first_id: Option<u64>,
    pub out: &'a Path,
}

pub fn apply(args: ApplyArgs<'_>, out: &Printer) -> CmdResult {
    let candidates: Vec<MatchCandidate> = read_lines(args.candidates)?;
    let decisions: Vec<MatchDecision> = read_lines(args.decisions)?;
    let stubs_path = args.stubs.map(Path::to_path_buf).unwrap_or_else(|| args.candidates.with_file_name(STUBS_FILE));
    let stubs: Vec<WorkStub> = read_lines(&stubs_path)?;
    let by_id: BTreeMap<&str, &WorkStub> = stubs.iter().map(|s| (s.stub_id.as_str(), s)).collect();
    let (records, mut next_id) = load_corpus(args.corpus)?;
    if let Some(first) = args.first_id {
        next_id = first;
    }
    let records: BTreeMap<String, WorkRecord> = records.into_iter().map(|r| (r.uri.to_string(), r)).collect();

    let items: Vec<String> = stubs.iter().map(|s| s.stub_id.clone()).collect();
    let clusters = apply_decisions(&items, &candidates, &decisions).map_err(|e| match e {
        LinkageError::UnknownCandidates(ids) => {
            CliError(format!("decisions name unknown candidates: {}", ids.join(", ")))
        }
        other => CliError(other.to_string()),
    })?;

    let mut files = BTreeMap::new();
    let mut failed = false;
    for cluster in &clusters {
        let (works, entries): (Vec<&String>, Vec<&String>) = cluster.members.iter().partition(|m| is_work(m));
        if entries.is_empty() {
            continue;
        }
        let members: Vec<WorkStub> = entries
            .iter()
            .map(|id| {
                by_id
                    .get(id.as_str())
                    .map(|s| (*s).clone())
                    .ok_or_else(|| CliError(format!("candidate names stub {id} missing from {}", stubs_path.display())))
            })
            .collect::<Result<_, _>>()?;
        let merged = match works.as_slice() {
            [] => {
                let uri = EntityUri::work(next_id);
                next_id += 1;
                merge_cluster(&members, &uri)
            }
            [work] => {
                let record = records
                    .get(work.as_str())
                    .ok_or_else(|| CliError(format!("{work} is not in the corpus; pass --corpus")))?;
                merge_into(record, &members)
            }
            several => {
                let ids: Vec<&str> = several.iter().map(|s| s.as_str()).collect();
                failed = true;
                let message = format!("cluster joins existing works {}", ids.join(", "));
                report_failure(out, &cluster.cluster_id, "CLUSTER_CONFLICT", &message);
                continue;
            }
        };
        match merged {
            Ok(record) => {
                let xml = serialize_work_record(&record).map_err(|e| CliError(e.to_string()))?;
                files.insert(args.out.join("work").join(format!("{}.xml", record.uri.id)), xml);
            }
            Err(e) => {
                failed = true;
                report_failure(out, &cluster.cluster_id, e.code(), &e.to_string());
            }
        }
    }
    if failed {
        return Ok(Status::Findings);
    }
    let merged = files.len();
    files.insert(args.out.join("clusters.jsonl"), write_jsonl(&clusters));
    write_all(&files)?;
    out.emit(
        || format!("{} clusters, {merged} records written", clusters.len()),
        &json!({"clusters": clusters.len(), "records": merged}),
    );
    Ok(Status::Ok)
}

fn report_failure(out: &Printer, cluster: &str, code: &str, message: &str) {
    out.emit(
        || format!("cluster {cluster}: {code}: {message}"),
        &json!({"cluster": cluster, "code": code, "message": message}),
    );
}

pub fn merge(
    stubs: &Path,
    members: &[String],
    into: Option<&Path>,
    uri: Option<&str>,
    dest: Option<&Path>,
) -> CmdResult {
    let all: Vec<WorkStub> = read_lines(stubs)?;
    let chosen: Vec<WorkStub> = members
        .iter()
        .map(|id| {
            all.iter()
                .find(|s| &s.stub_id == id)
                .cloned()
                .ok_or_else(|| CliError(format!("no stub {id} in {}", stubs.display())))
        })
        .collect::<Result<_, _>>()?;
    let merged = match (into, uri) {
        (Some(path), _) => {
            let record = parse_work_record(&read(path)?).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
            merge_into(&record, &chosen)
        }
        (None, Some(uri)) => merge_cluster(&chosen, &EntityUri::parse(uri)?),
        (None, None) => return Err(CliError("either --into or --uri is required".into())),
    };
    let record = match merged {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}: {e}", e.code());
            return Ok(Status::Findings);
        }
    };
    let xml = serialize_work_record(&record).map_err(|e| CliError(e.to_string()))?;
    match dest {
        Some(path) => write_all(&BTreeMap::from([(path.to_path_buf(), xml)]))?,
        None => print!("{xml}"),
    }
    Ok(Status::Ok)
}
