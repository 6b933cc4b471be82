use std::path::{Path, PathBuf};
use std::process::Command;

use drgkit::cli::run;
use drgkit::encoder::EncodingSpec;
use drgkit::graph::{read_record, Drg};
use drgkit::matcher::{mces, SearchBudget};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn drgkit(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("drgkit").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn house_senate_converts_to_one_line() {
    let f = fixture("house_senate.clf");
    let (code, out, err) = drgkit(&["convert", "--encoding", "chain-bnode-cref-implicit", "--input", path_str(&f)]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    assert!(err.contains("0 null graphs"), "{err}");
}

#[test]
fn measure_book_becomes_a_null_graph() {
    let f = fixture("measure_book.clf");
    let (code, out, err) = drgkit(&["convert", "--encoding", "fork-bnode-cref", "--input", path_str(&f)]);
    assert_eq!(code, 0);
    assert!(err.contains("1 null graphs"), "{err}");
    assert!(err.contains("tom-read-book") && err.contains("line 1"), "{err}");
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["nodes"], serde_json::json!([]));
    assert_eq!(v["edges"], serde_json::json!([]));
    assert!(v["error"].as_str().unwrap().contains("NoMostSpecificConcept"));
}

#[test]
fn hypernym_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("h.tsv");
    std::fs::write(&tsv, "book.n.01\tmeasure.n.02\n").unwrap();
    let f = fixture("measure_book.clf");
    let out = Command::new(env!("CARGO_BIN_EXE_drgkit"))
        .args(["convert", "--encoding", "fork-bnode-cref", "--input", path_str(&f)])
        .env("DRGKIT_HYPERNYMS", &tsv)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("0 null graphs"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"book.n.01\""));
}

#[test]
fn self_score_report() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.jsonl");
    let f = fixture("corpus.clf");
    let (code, _, _) = drgkit(&["convert", "--encoding", "fork-breif-cedge", "--input", path_str(&f), "--output", path_str(&g)]);
    assert_eq!(code, 0);
    let (code, out, _) = drgkit(&["score", "--gold", path_str(&g), "--system", path_str(&g), "--json", "--workers", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["macro_f1"], 1.0);
    assert_eq!(v["approx_rate"], 0.0);
    assert_eq!(v["docs"].as_array().unwrap().len(), 22);
    let (_, table, _) = drgkit(&["score", "--gold", path_str(&g), "--system", path_str(&g)]);
    assert!(table.contains("macro F1 1.0000"));
}

fn graphs(p: &Path) -> Vec<Drg> {
    std::fs::read_to_string(p).unwrap().lines().map(|l| read_record(l).unwrap().graph.unwrap()).collect()
}

#[test]
fn convert_decode_convert_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("corpus.clf");
    for spec in EncodingSpec::all().into_iter().filter(EncodingSpec::is_lossless) {
        let name = spec.name();
        let p = |i: usize, ext: &str| dir.path().join(format!("{name}.{i}.{ext}"));
        let cycle = |from: &Path, clf: &Path, to: &Path| {
            assert_eq!(drgkit(&["decode", "--input", path_str(from), "--output", path_str(clf)]).0, 0);
            assert_eq!(drgkit(&["convert", "--encoding", name, "--input", path_str(clf), "--output", path_str(to)]).0, 0);
        };
        assert_eq!(drgkit(&["convert", "--encoding", name, "--input", path_str(&f), "--output", path_str(&p(1, "jsonl"))]).0, 0);
        cycle(&p(1, "jsonl"), &p(1, "clf"), &p(2, "jsonl"));
        cycle(&p(2, "jsonl"), &p(2, "clf"), &p(3, "jsonl"));
        for (a, b) in graphs(&p(1, "jsonl")).iter().zip(graphs(&p(2, "jsonl"))) {
            let m = mces(a, &b, &SearchBudget::default(), 0);
            assert!(m.exact && m.matched == m.system_items && m.matched == m.gold_items, "{name} {}", a.id());
        }
        assert_eq!(std::fs::read(p(2, "jsonl")).unwrap(), std::fs::read(p(3, "jsonl")).unwrap(), "{name}");
    }
}

#[test]
fn usage_and_data_errors() {
    assert_eq!(drgkit(&["convert", "--input", "x.clf"]).0, 1);
    assert_eq!(drgkit(&["frobnicate"]).0, 1);
    assert_eq!(drgkit(&["score", "--gold", "a", "--system", "b", "--max-expansions", "0"]).0, 1);
    assert_eq!(drgkit(&["convert", "--encoding", "bb-star", "--input", "/no/such/file.clf"]).0, 2);
    assert_eq!(drgkit(&["--help"]).0, 0);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "{\"id\":\"d1\",\"nodes\":[{\"id\":0}],\"edges\":[{\"source\":0,\"target\":3}],\"tops\":[0]}\n").unwrap();
    let (code, _, err) = drgkit(&["score", "--gold", path_str(&bad), "--system", path_str(&bad)]);
    assert_eq!(code, 2);
    assert!(err.contains(":1:"), "{err}");
}

#[test]
fn stray_system_document_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let (g, s) = (dir.path().join("g.jsonl"), dir.path().join("s.jsonl"));
    drgkit(&["convert", "--encoding", "bb-star", "--input", path_str(&fixture("house_senate.clf")), "--output", path_str(&g)]);
    drgkit(&["convert", "--encoding", "bb-star", "--input", path_str(&fixture("szp.clf")), "--output", path_str(&s)]);
    let (code, _, err) = drgkit(&["score", "--gold", path_str(&g), "--system", path_str(&s)]);
    assert_eq!(code, 2);
    assert!(err.contains("DocIdMismatch") && err.contains("hid-parcel"), "{err}");
}

#[test]
fn validate_reports_by_document_and_line() {
    let (code, out, _) = drgkit(&["validate", "--input", path_str(&fixture("corpus.clf"))]);
    assert_eq!(code, 0);
    assert!(out.contains("22 documents, 0 ill-formed"));
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.clf");
    std::fs::write(&f, "%%% id: fine\nb1 REF x1\nb1 dog \"n.01\" x1\n\n%%% id: broken\nb1 REF x1\nb1 Agent e1 x1\n").unwrap();
    let (code, out, _) = drgkit(&["validate", "--input", path_str(&f)]);
    assert_eq!(code, 2);
    assert!(out.contains("broken (line 5)"), "{out}");
    assert!(out.contains("fine: ok"));
}

#[test]
fn clause_scores_and_stats() {
    let f = fixture("corpus.clf");
    let (code, out, _) = drgkit(&["score-clf", "--gold", path_str(&f), "--system", path_str(&f), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["macro_f1"], 1.0);

    let (code, out, _) = drgkit(&["stats", "--input", path_str(&f), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["encodings"].as_array().unwrap().len(), 13);
    for r in v["reductions"].as_array().unwrap() {
        assert!(r["reduction"].as_f64().unwrap() > 0.0, "{r}");
    }

    let (code, out, _) = drgkit(&["list-encodings", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(serde_json::from_str::<serde_json::Value>(&out).unwrap().as_array().unwrap().len(), 13);
}
