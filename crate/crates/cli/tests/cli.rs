use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn syriaca(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_syriaca")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn core_fixture(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(rel).display().to_string()
}

fn catalogue() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/catalogue.xml").display().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_exit_codes() {
    let r = syriaca(&["validate", &core_fixture("works")]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.stdout.lines().filter(|l| l.ends_with(": OK")).count(), 3);

    let r = syriaca(&["validate", &core_fixture("invalid/headword-dup.xml")]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("HEADWORD_DUP"), "{}", r.stdout);

    let syc = core_fixture("syc/syc-lang.xml");
    let r = syriaca(&["validate", &syc]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("warning"));
    let r = syriaca(&["validate", "--strict", &syc]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains(": error "));

    assert_eq!(syriaca(&["validate", "/no/such/path"]).code, 2);
    assert_eq!(syriaca(&["validate", "--bogus"]).code, 2);
}

#[test]
fn validate_json_lines() {
    let r = syriaca(&["--json", "validate", &core_fixture("invalid")]);
    assert_eq!(r.code, 1);
    let lines: Vec<serde_json::Value> = r.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines.iter().all(|l| l["valid"] == false));
}

#[test]
fn strict_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("syriaca.toml");
    std::fs::write(&cfg, "strict = true\n").unwrap();
    assert_eq!(syriaca(&["--config", s(&cfg), "validate", &core_fixture("syc/syc-lang.xml")]).code, 1);
    std::fs::write(&cfg, "strict = true\nunknown = 1\n").unwrap();
    assert_eq!(syriaca(&["--config", s(&cfg), "validate", &core_fixture("works")]).code, 2);
    std::fs::write(&cfg, "[linkage.thresholds]\nauto = 0.2\nreview = 0.5\n").unwrap();
    assert_eq!(syriaca(&["--config", s(&cfg), "validate", &core_fixture("works")]).code, 2);
}

#[test]
fn convert_270_to_ntriples_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let input = core_fixture("works/270.xml");
    let r = syriaca(&["convert", &input, "--to", "nt", "-o", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let first = std::fs::read(out.join("270.nt")).unwrap();
    assert_eq!(first.iter().filter(|&&b| b == b'\n').count(), 13);
    assert_eq!(syriaca(&["convert", &input, "--to", "nt", "-o", s(&out)]).code, 0);
    assert_eq!(std::fs::read(out.join("270.nt")).unwrap(), first);

    let r = syriaca(&["convert", &input, "--to", "nt"]);
    assert_eq!(r.stdout.as_bytes(), first.as_slice());
}

#[test]
fn convert_merge_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let ttl = dir.path().join("all.ttl");
    assert_eq!(syriaca(&["convert", &core_fixture("works"), "--to", "ttl", "--merge", "-o", s(&ttl)]).code, 0);
    let text = std::fs::read_to_string(&ttl).unwrap();
    assert_eq!(text.matches("@prefix lawd:").count(), 1);
    for id in [0, 270, 300] {
        assert!(text.contains(&format!("<http://syriaca.org/work/{id}>")));
    }
    let r = syriaca(&["convert", &core_fixture("works/300.xml"), "--to", "json"]);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["uri"], "http://syriaca.org/work/300");
}

#[test]
fn convert_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let r = syriaca(&["convert", "--to", "nt", "-o", s(&out)]);
    assert_eq!(r.code, 0);
    assert!(!out.exists());

    // one invalid input: nothing is written
    let r = syriaca(&[
        "convert",
        &core_fixture("works/270.xml"),
        &core_fixture("invalid/headword-dup.xml"),
        "--to",
        "nt",
        "-o",
        s(&out),
    ]);
    assert_eq!(r.code, 1);
    assert!(!out.exists());
}

#[test]
fn lint_corpus_reports_violations() {
    let r = syriaca(&["lint-corpus", &core_fixture("works")]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("3 records, 0 violations"));

    let dir = tempfile::tempdir().unwrap();
    let stored = [(1, 1, "syriaca:hasVersion", 2), (2, 2, "syriaca:isVersionOf", 1), (3, 4, "bf:translationOf", 3)];
    for (id, active, rel, passive) in stored {
        let xml = std::fs::read_to_string(core_fixture("works/300.xml"))
            .unwrap()
            .replace("work/300", &format!("work/{id}"))
            .replace("work-300", &format!("work-{id}"))
            .replace("name300-", &format!("name{id}-"))
            .replace("bib300-", &format!("bib{id}-"))
            .replace(
                "</listRelation>",
                &format!(
                    "<relation active=\"http://syriaca.org/work/{active}\" ref=\"{rel}\" passive=\"http://syriaca.org/work/{passive}\"/></listRelation>"
                ),
            );
        std::fs::write(dir.path().join(format!("{id}.xml")), xml).unwrap();
    }
    let r = syriaca(&["--json", "lint-corpus", s(dir.path())]);
    assert_eq!(r.code, 1, "{}{}", r.stdout, r.stderr);
    let kinds: Vec<serde_json::Value> = r.stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(
        kinds.iter().map(|k| k["kind"].as_str().unwrap()).collect::<Vec<_>>(),
        ["MUTUAL_RELATION", "PARENT_SIDE"]
    );
}

fn read_jsonl(path: &Path) -> Vec<serde_json::Value> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn link_catalogue_without_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("link");
    let r = syriaca(&["link", "--catalogue", &catalogue(), "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let cands = read_jsonl(&out.join("candidates.jsonl"));
    assert!(!cands.is_empty());
    assert!(cands
        .iter()
        .all(|c| c["left"].as_str().unwrap().starts_with("wright-")
            && c["right"].as_str().unwrap().starts_with("wright-")));
    let pair = cands.iter().find(|c| c["candidate_id"] == "wright-0001|wright-0003").unwrap();
    assert_eq!(pair["band"], "review");
    assert_eq!(read_jsonl(&out.join("stubs.jsonl")).len(), 4);

    let first = std::fs::read(out.join("candidates.jsonl")).unwrap();
    assert_eq!(syriaca(&["link", "--catalogue", &catalogue(), "--out", s(&out)]).code, 0);
    assert_eq!(std::fs::read(out.join("candidates.jsonl")).unwrap(), first);
}

#[test]
fn link_and_apply_against_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("link");
    let corpus = core_fixture("works");
    assert_eq!(syriaca(&["link", "--catalogue", &catalogue(), "--corpus", &corpus, "--out", s(&out)]).code, 0);
    let cands = read_jsonl(&out.join("candidates.jsonl"));
    let is_work = |v: &serde_json::Value| v.as_str().unwrap().starts_with("http://syriaca.org/work/");
    assert!(cands.iter().all(|c| !(is_work(&c["left"]) && is_work(&c["right"]))));
    assert!(cands.iter().any(|c| c["candidate_id"] == "http://syriaca.org/work/300|wright-0002"));

    let decisions = dir.path().join("decisions.jsonl");
    std::fs::write(
        &decisions,
        r#"{"candidate_id":"wright-0001|wright-0003","verdict":"accept","editor":"ed","timestamp":"2024-01-01T00:00:00Z"}
{"candidate_id":"http://syriaca.org/work/300|wright-0002","verdict":"accept","editor":"ed","timestamp":"2024-01-01T00:00:00Z"}
"#,
    )
    .unwrap();
    let merged = dir.path().join("merged");
    let cand_file = out.join("candidates.jsonl");
    let args = [
        "apply-decisions",
        "--candidates",
        s(&cand_file),
        "--decisions",
        s(&decisions),
        "--corpus",
        &corpus,
        "--out",
        s(&merged),
    ];
    let r = syriaca(&args);
    assert_eq!(r.code, 0, "{}{}", r.stdout, r.stderr);
    let clusters = read_jsonl(&merged.join("clusters.jsonl"));
    let multi: Vec<_> = clusters.iter().filter(|c| c["members"].as_array().unwrap().len() > 1).collect();
    assert_eq!(multi.len(), 2);
    assert_eq!(clusters[0]["members"], serde_json::json!(["http://syriaca.org/work/0", "wright-0001", "wright-0003"]));

    // wright-0001 matches work 0 automatically, and the accepted pair joins it there
    let narsai = std::fs::read_to_string(merged.join("work/0.xml")).unwrap();
    assert!(narsai.contains("http://syriaca.org/manuscript/20001"));
    assert!(narsai.contains("http://syriaca.org/manuscript/20002"));
    // the stub matched to work 300 is folded into that record
    let updated = std::fs::read_to_string(merged.join("work/300.xml")).unwrap();
    assert!(updated.contains("24-30"));
    // the unmatched entry becomes a new work after the corpus's highest id
    let new = std::fs::read_to_string(merged.join("work/301.xml")).unwrap();
    assert!(new.contains("Letter to Simeon"));
    assert!(!merged.join("work/270.xml").exists());
    assert!(!merged.join("work/302.xml").exists());
    let r = syriaca(&["validate", s(&merged.join("work"))]);
    assert_eq!(r.code, 0, "{}", r.stdout);

    let before = std::fs::read(merged.join("work/0.xml")).unwrap();
    assert_eq!(syriaca(&args).code, 0);
    assert_eq!(std::fs::read(merged.join("work/0.xml")).unwrap(), before);
}

#[test]
fn apply_decisions_reports_unknown_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("link");
    assert_eq!(syriaca(&["link", "--catalogue", &catalogue(), "--out", s(&out)]).code, 0);
    let decisions = dir.path().join("decisions.jsonl");
    std::fs::write(
        &decisions,
        r#"{"candidate_id":"x|y","verdict":"accept","editor":"ed","timestamp":"2024-01-01T00:00:00Z"}"#,
    )
    .unwrap();
    let merged = dir.path().join("merged");
    let r = syriaca(&[
        "apply-decisions",
        "--candidates",
        s(&out.join("candidates.jsonl")),
        "--decisions",
        s(&decisions),
        "--out",
        s(&merged),
    ]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("x|y"));
    assert!(!merged.exists());
}

#[test]
fn merge_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("link");
    assert_eq!(syriaca(&["link", "--catalogue", &catalogue(), "--out", s(&out)]).code, 0);
    let r = syriaca(&[
        "merge",
        "--stubs",
        s(&out.join("stubs.jsonl")),
        "--members",
        "wright-0001,wright-0003",
        "--uri",
        "http://syriaca.org/work/900",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("http://syriaca.org/work/900"));
    let r = syriaca(&[
        "merge",
        "--stubs",
        s(&out.join("stubs.jsonl")),
        "--members",
        "nope",
        "--uri",
        "http://syriaca.org/work/900",
    ]);
    assert_eq!(r.code, 2);
}

#[test]
fn mint_from_registry() {
    let dir = tempfile::tempdir().unwrap();
    let r = syriaca(&["mint", "--data", s(dir.path()), "--count", "2"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout, "http://syriaca.org/work/1\nhttp://syriaca.org/work/2\n");
    let r = syriaca(&["--json", "mint", "--data", s(dir.path()), "--kind", "person"]);
    assert_eq!(r.stdout.trim(), r#"{"uri":"http://syriaca.org/person/1"}"#);
    assert_eq!(syriaca(&["mint", "--data", "/no/such/dir"]).code, 2);
    assert_eq!(syriaca(&["mint", "--data", s(dir.path()), "--kind", "poem"]).code, 2);
}

fn http_get(addr: &str, path: &str) -> (u16, String) {
    let mut stream = TcpStream::connect(addr).unwrap();
    write!(stream, "GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut resp = String::new();
    stream.read_to_string(&mut resp).unwrap();
    let status = resp.split(' ').nth(1).unwrap().parse().unwrap();
    let body = resp.split_once("\r\n\r\n").map(|(_, b)| b.to_string()).unwrap_or_default();
    (status, body)
}

#[test]
fn serve_answers_requests() {
    let dir = tempfile::tempdir().unwrap();
    let data: PathBuf = dir.path().join("data");
    std::fs::create_dir_all(data.join("work")).unwrap();
    for id in [0, 270, 300] {
        std::fs::copy(core_fixture(&format!("works/{id}.xml")), data.join(format!("work/{id}.xml"))).unwrap();
    }
    let mut child = Command::new(env!("CARGO_BIN_EXE_syriaca"))
        .args(["serve", "--data", s(&data), "--port", "0"])
        .env("RUST_LOG", "info")
        .env("NO_COLOR", "1")
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stderr = BufReader::new(child.stderr.take().unwrap());
    let addr = loop {
        let mut line = String::new();
        assert!(stderr.read_line(&mut line).unwrap() > 0, "server exited early");
        if let Some(rest) = line.split("addr=").nth(1) {
            break rest.split_whitespace().next().unwrap().to_string();
        }
    };
    std::thread::spawn(move || for _ in stderr.lines() {});

    let (status, body) = http_get(&addr, "/api/work/270");
    assert_eq!(status, 200);
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["uri"], "http://syriaca.org/work/270");
    assert_eq!(http_get(&addr, "/api/work/999").0, 404);
    let (status, body) = http_get(&addr, "/api/work/270?format=nt");
    assert_eq!(status, 200);
    assert_eq!(body.lines().filter(|l| l.ends_with(" .")).count(), 13);

    child.kill().unwrap();
    child.wait().unwrap();

    // port already taken
    let busy = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = busy.local_addr().unwrap().port().to_string();
    let r = syriaca(&["serve", "--data", s(&data), "--port", &port]);
    assert_eq!(r.code, 2);
    let r = syriaca(&["serve", "--data", "/no/such/dir"]);
    assert_eq!(r.code, 2);
}
