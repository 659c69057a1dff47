use std::path::Path;
use std::process::{Command, Output};

fn hvkg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hvkg")).args(args).output().expect("spawn hvkg")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

const TRIPLES: &str = "a\tr1\tb\nb\tr2\tc\na\tr3\td\nd\tr2\te\n";
const QUESTIONS: &str = concat!(
    r#"{"id":"q1","text":"Starting from a, which entity is reached via r1, then r2?","topic_entity":"a","gold_answers":["c"],"gold_schema":["r1","r2"]}"#,
    "\n",
    r#"{"id":"q2","text":"what does r3 reach from a","topic_entity":"a"}"#,
    "\n"
);

/// Triples, questions and a codebook built by the binary.
fn fixture(dir: &Path) -> [std::path::PathBuf; 3] {
    let t = write(dir, "triples.tsv", TRIPLES);
    let q = write(dir, "questions.jsonl", QUESTIONS);
    let cb = dir.join("cb.bin");
    let o = hvkg(&["--seed", "3", "codebook", "--triples", p(&t), "--out", p(&cb), "--blocks", "32"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    [t, q, cb]
}

#[test]
fn codebook_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "t.tsv", TRIPLES);
    let reversed: String = TRIPLES.lines().rev().map(|l| format!("{l}\n")).collect();
    let t2 = write(dir.path(), "t2.tsv", &reversed);
    let outs: Vec<Vec<u8>> = [(&t, "a.bin"), (&t, "b.bin"), (&t2, "c.bin")]
        .iter()
        .map(|(src, name)| {
            let out = dir.path().join(name);
            let o = hvkg(&["--seed", "7", "codebook", "--triples", p(src), "--out", p(&out)]);
            assert_eq!(code(&o), 0);
            assert!(stdout(&o).contains("d=4096"), "{}", stdout(&o));
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    // relation order in the file does not matter
    assert_eq!(outs[0], outs[2]);
    let other = dir.path().join("d.bin");
    assert_eq!(code(&hvkg(&["--seed", "8", "codebook", "--triples", p(&t), "--out", p(&other)])), 0);
    assert_ne!(std::fs::read(other).unwrap(), outs[0]);
}

#[test]
fn retrieve_writes_one_record_per_question_and_echoes_k() {
    let dir = tempfile::tempdir().unwrap();
    let [t, q, cb] = fixture(dir.path());
    let out = dir.path().join("out.jsonl");
    let o = hvkg(&["retrieve", "--triples", p(&t), "--questions", p(&q), "--codebook", p(&cb), "--out", p(&out), "-k", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("questions=2") && s.contains("k=2") && s.contains("hit@k=1.0000"), "{s}");
    let text = std::fs::read_to_string(&out).unwrap();
    let recs: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["question_id"], "q1");
    assert_eq!(recs[0]["top_k"].as_array().unwrap().len(), 2);
    assert_eq!(recs[0]["candidates"][0]["chain"], serde_json::json!(["a", "b", "c"]));
    assert_eq!(recs[1]["plan"], serde_json::json!(["r3"]));
}

#[test]
fn answer_with_mock_records_one_call_each() {
    let dir = tempfile::tempdir().unwrap();
    let [t, q, cb] = fixture(dir.path());
    let out = dir.path().join("answers.jsonl");
    let o = hvkg(&["answer", "--triples", p(&t), "--questions", p(&q), "--codebook", p(&cb), "--out", p(&out), "--mock-llm"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("calls=2"), "{}", stdout(&o));
    let recs: Vec<serde_json::Value> = std::fs::read_to_string(&out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().all(|r| r["call_count"] == 1));
    assert_eq!(recs[0]["answer"], "c");
    assert_eq!(recs[0]["correct"], true);
    assert_eq!(recs[0]["supporting_paths"], serde_json::json!(["a --r1--> b --r2--> c"]));
    assert_eq!(recs[1]["correct"], serde_json::Value::Null);
}

#[test]
fn unreachable_endpoint_exits_3_after_writing_records() {
    let dir = tempfile::tempdir().unwrap();
    let [t, q, cb] = fixture(dir.path());
    let out = dir.path().join("answers.jsonl");
    let o = hvkg(&[
        "answer",
        "--triples",
        p(&t),
        "--questions",
        p(&q),
        "--codebook",
        p(&cb),
        "--out",
        p(&out),
        "--llm-endpoint",
        "http://127.0.0.1:9/complete",
        "--timeout",
        "2",
    ]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains(r#""error_kind":"transport""#));
}

#[test]
fn missing_input_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let [_, q, cb] = fixture(dir.path());
    let missing = dir.path().join("nope.tsv");
    let out = dir.path().join("o.jsonl");
    let o = hvkg(&["retrieve", "--triples", p(&missing), "--questions", p(&q), "--codebook", p(&cb), "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope.tsv"));
}

#[test]
fn mutually_exclusive_llm_flags_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let [t, q, cb] = fixture(dir.path());
    let out = dir.path().join("o.jsonl");
    let o = hvkg(&[
        "answer",
        "--triples",
        p(&t),
        "--questions",
        p(&q),
        "--codebook",
        p(&cb),
        "--out",
        p(&out),
        "--mock-llm",
        "--llm-endpoint",
        "http://x",
    ]);
    assert_eq!(code(&o), 1);
    let o = hvkg(&["answer", "--triples", p(&t), "--questions", p(&q), "--codebook", p(&cb), "--out", p(&out)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn empty_question_file_yields_no_records() {
    let dir = tempfile::tempdir().unwrap();
    let [t, _, cb] = fixture(dir.path());
    let q = write(dir.path(), "empty.jsonl", "");
    let out = dir.path().join("o.jsonl");
    let o = hvkg(&["retrieve", "--triples", p(&t), "--questions", p(&q), "--codebook", p(&cb), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("questions=0"));
    assert_eq!(std::fs::read_to_string(&out).unwrap_or_default(), "");
}

#[test]
fn vocabulary_mismatch_and_bad_topic_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let [_, q, cb] = fixture(dir.path());
    let t = write(dir.path(), "more.tsv", &format!("{TRIPLES}a\tr9\tz\n"));
    let out = dir.path().join("o.jsonl");
    let o = hvkg(&["retrieve", "--triples", p(&t), "--questions", p(&q), "--codebook", p(&cb), "--out", p(&out)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("r9"));
    let [t, _, cb] = fixture(dir.path());
    let q = write(dir.path(), "bad.jsonl", r#"{"id":"x","text":"t","topic_entity":"nobody"}"#);
    let o = hvkg(&["retrieve", "--triples", p(&t), "--questions", p(&q), "--codebook", p(&cb), "--out", p(&out)]);
    assert_eq!(code(&o), 1);
}

#[test]
fn invalid_parameters_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let [t, q, cb] = fixture(dir.path());
    let out = dir.path().join("o.jsonl");
    for extra in [["--lambda", "1.5"], ["-k", "0"], ["--alpha", "-1"]] {
        let mut args = vec!["retrieve", "--triples", p(&t), "--questions", p(&q), "--codebook", p(&cb), "--out", p(&out)];
        args.extend(extra);
        assert_eq!(code(&hvkg(&args)), 1, "{extra:?}");
    }
    assert_eq!(code(&hvkg(&["validate", "--epsilon", "1.5"])), 1);
    assert_eq!(code(&hvkg(&["validate", "--experiments", "bogus"])), 1);
    assert_eq!(code(&hvkg(&["frobnicate"])), 1);
    assert_eq!(code(&hvkg(&["--help"])), 0);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let [t, q, cb] = fixture(dir.path());
    let cfg = write(dir.path(), "hvkg.toml", "k = 1\nalpha = 0.0\n");
    let out = dir.path().join("o.jsonl");
    let base = ["retrieve", "--triples", p(&t), "--questions", p(&q), "--codebook", p(&cb), "--out", p(&out)];
    let mut args = vec!["--config", p(&cfg)];
    args.extend(base);
    assert!(stdout(&hvkg(&args)).contains("k=1 "));
    args.extend(["-k", "2"]);
    assert!(stdout(&hvkg(&args)).contains("k=2 "));
    let bad = write(dir.path(), "bad.toml", "nonsense_key = 1\n");
    let mut args = vec!["--config", p(&bad)];
    args.extend(base);
    assert_eq!(code(&hvkg(&args)), 1);
}

#[test]
fn synth_refuses_to_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("bench");
    let args = [
        "--seed",
        "1",
        "synth",
        "--entities",
        "40",
        "--relations",
        "5",
        "--num-triples",
        "120",
        "--num-questions",
        "10",
        "--out-dir",
        p(&d),
    ];
    assert_eq!(code(&hvkg(&args)), 0);
    assert_eq!(std::fs::read_to_string(d.join("questions.jsonl")).unwrap().lines().count(), 10);
    assert_eq!(std::fs::read_to_string(d.join("triples.tsv")).unwrap().lines().count(), 120);
    assert_eq!(code(&hvkg(&args)), 2);
    let x = dir.path().join("x");
    let bad = ["synth", "--num-triples", "5", "--out-dir", p(&x)];
    assert_eq!(code(&hvkg(&bad)), 1);
}

#[test]
fn quick_validate_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results");
    let o = hvkg(&["validate", "--quick", "--experiments", "separation,order", "--out-dir", p(&out)]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count() >= 4);
    let names: Vec<String> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert_eq!(names.iter().filter(|n| n.ends_with(".csv")).count(), 2);
    assert_eq!(names.iter().filter(|n| n.ends_with(".json")).count(), 2);
}
