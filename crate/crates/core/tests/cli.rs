mod common;

use std::fs;

use common::{cli, fixtures, resource_dir, stderr, stdout};

fn res_arg() -> String {
    resource_dir().display().to_string()
}

#[test]
fn model3_golden_sentence() {
    let out = cli(&["generate", "--model", "3", "--query", "sol", "--len", "6", "--seed", "3", "--count", "1", "--resources", &res_arg()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "Aquella arena inmensa navega siempre.\n");
}

#[test]
fn generate_is_byte_identical_across_runs() {
    for model in ["1", "2", "3"] {
        let args = ["generate", "--model", model, "--query", "amor", "--len", "7", "--seed", "42", "--count", "5", "--resources", &res_arg()];
        let (a, b) = (cli(&args), cli(&args));
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stderr, b.stderr);
        assert_eq!(a.status.code(), b.status.code());
        if model != "1" {
            assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
            assert_eq!(stdout(&a).lines().count(), 5);
        }
    }
}

#[test]
fn count_uses_per_index_seeds() {
    let many = cli(&["generate", "--model", "2", "--query", "mar", "--len", "6", "--seed", "10", "--count", "3", "--resources", &res_arg()]);
    let lines: Vec<String> = stdout(&many).lines().map(String::from).collect();
    for (i, line) in lines.iter().enumerate() {
        let seed = (10 + i).to_string();
        let one = cli(&["generate", "--model", "2", "--query", "mar", "--len", "6", "--seed", &seed, "--resources", &res_arg()]);
        assert_eq!(stdout(&one).trim_end(), line);
    }
}

#[test]
fn resources_from_environment() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_homosyntax"))
        .args(["generate", "--model", "3", "--query", "sol", "--len", "6", "--seed", "3"])
        .env("HOMOSYNTAX_RESOURCES", resource_dir())
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "Aquella arena inmensa navega siempre.\n");
}

#[test]
fn exit_codes() {
    let bad_len = cli(&["generate", "--model", "3", "--query", "sol", "--len", "2", "--resources", &res_arg()]);
    assert_eq!(bad_len.status.code(), Some(64));
    assert!(stderr(&bad_len).contains("Usage") || stderr(&bad_len).contains("usage"));

    let bad_model = cli(&["generate", "--model", "4", "--query", "sol", "--len", "5", "--resources", &res_arg()]);
    assert_eq!(bad_model.status.code(), Some(64));

    let missing = cli(&["generate", "--model", "1", "--query", "sol", "--len", "5", "--resources", "/nonexistent/dir"]);
    assert_eq!(missing.status.code(), Some(2));

    let oov = cli(&["generate", "--model", "2", "--query", "zzzz", "--len", "5", "--resources", &res_arg()]);
    assert_eq!(oov.status.code(), Some(3));
    let first = stderr(&oov).lines().next().unwrap().to_string();
    let diag: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(diag["code"], "oov");
    assert_eq!(diag["exit"], 3);

    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn trace_records_every_slot() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.jsonl");
    let out = cli(&[
        "generate", "--model", "3", "--query", "guerra", "--len", "8", "--seed", "5", "--count", "2",
        "--resources", &res_arg(), "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = fs::read_to_string(&trace)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(!lines.is_empty());
    for l in &lines {
        for key in ["sentence", "position", "tag", "o", "candidates", "chosen"] {
            assert!(l.get(key).is_some(), "missing {key} in {l}");
        }
        let c = &l["candidates"][0];
        assert!(c["theta"].is_f64() && c["beta"].is_f64() && c["s"].is_f64());
    }
}

#[test]
fn check_passes_on_pristine_resources() {
    let out = cli(&["check", "--resources", &res_arg()]);
    assert_eq!(out.status.code(), Some(0), "{}{}", stdout(&out), stderr(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("[PASS]")).count(), 7);
}

fn copy_resources() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(resource_dir()).unwrap() {
        let p = entry.unwrap().path();
        fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    dir
}

#[test]
fn check_detects_unattested_table_word() {
    let dir = copy_resources();
    let ta = dir.path().join("ta.jsonl");
    let text = fs::read_to_string(&ta).unwrap();
    let first = text.lines().next().unwrap();
    let mut row: serde_json::Value = serde_json::from_str(first).unwrap();
    row["words"].as_array_mut().unwrap().push(serde_json::json!(["inventadísimo", 1]));
    fs::write(&ta, text.replacen(first, &row.to_string(), 1)).unwrap();
    let out = cli(&["check", "--resources", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("[FAIL] associative table soundness"));
    assert!(stderr(&out).contains("check_failed"));
}

#[test]
fn check_detects_missing_transition_mass() {
    // counts are the source of truth in the file, so drop a whole row's
    // outgoing triples to break stochasticity
    let dir = copy_resources();
    let m = dir.path().join("matrix.txt");
    let text = fs::read_to_string(&m).unwrap();
    let kept: Vec<&str> = text
        .lines()
        .filter(|l| {
            let f: Vec<&str> = l.split(' ').collect();
            !(f.len() == 3 && f[0] == "2" && f[1] != "1")
        })
        .collect();
    fs::write(&m, kept.join("\n") + "\n").unwrap();
    let out = cli(&["check", "--resources", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("[FAIL] row-stochastic"));
}

#[test]
fn build_pipeline_reproduces_fixture_resources() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let p = |name: &str| d.join(name).display().to_string();
    let tagged = fixtures().join("tagged.tsv").display().to_string();
    for args in [
        vec!["import-tagged", "--in", &tagged, "--out", &p("tagged.tsv")],
        vec!["build-matrix", "--in", &p("tagged.tsv"), "--out", &p("matrix.txt")],
        vec!["build-templates", "--in", &p("tagged.tsv"), "--out", &p("templates.jsonl")],
        vec!["build-ta", "--in", &p("tagged.tsv"), "--out", &p("ta.jsonl"), "--dict-out", &p("dict.jsonl")],
    ] {
        let out = cli(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
    }
    for name in ["tagged.tsv", "matrix.txt", "templates.jsonl", "ta.jsonl", "dict.jsonl"] {
        assert_eq!(fs::read(d.join(name)).unwrap(), fs::read(resource_dir().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn training_reproduces_fixture_vectors() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("vectors.txt");
    let corpus = fixtures().join("5kl-sample.txt");
    let out = cli(&["train-emb", "--in", corpus.to_str().unwrap(), "--dims", "64", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(fs::read(out_path).unwrap(), fs::read(resource_dir().join("vectors.txt")).unwrap());
}

#[test]
fn ingest_stats_match_independent_count() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("sentences.txt");
    let stats_path = dir.path().join("stats.txt");
    let out = cli(&[
        "ingest", "--in", fixtures().join("docs").to_str().unwrap(), "--out", out_path.to_str().unwrap(),
        "--stats", stats_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = fs::read_to_string(&out_path).unwrap();
    // wc-style oracle over the written file: lines, and whitespace tokens
    // containing a letter or digit
    let lines = text.lines().count();
    let words: usize = text
        .lines()
        .flat_map(str::split_whitespace)
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .count();
    let report = fs::read_to_string(&stats_path).unwrap();
    assert_eq!(report, stdout(&out));
    assert!(report.contains(&format!("sentences: {lines}\n")), "{report}");
    assert!(report.contains(&format!("words: {words}\n")), "{report}");
    for line in text.lines() {
        let n = line.split_whitespace().filter(|t| t.chars().any(char::is_alphanumeric)).count();
        assert!((4..=29).contains(&n), "{line}");
        assert!(!line.contains("1998") && !line.contains("ONU") && !line.contains("10:30"));
    }
    assert!(text.contains("El Sr. Ruiz habló"));
}

#[test]
fn tag_command_writes_canonical_tsv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("tagged.tsv");
    let out = cli(&[
        "tag", "--in", fixtures().join("8kf-sample.txt").to_str().unwrap(),
        "--lexicon", fixtures().join("lexicon.tsv").to_str().unwrap(), "--out", out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let check = cli(&["import-tagged", "--in", out_path.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));
    assert!(stdout(&check).starts_with("sentences: 800\n"));
}

#[test]
fn gen_egv_prints_tags() {
    let out = cli(&["gen-egv", "--matrix", resource_dir().join("matrix.txt").to_str().unwrap(), "--len", "5", "--seed", "9", "--policy", "argmax"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).split_whitespace().count(), 5);
}
