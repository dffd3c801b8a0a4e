use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tcm(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcm"))
        .args(args)
        .env("TCM_CACHE_DIR", cache)
        .output()
        .expect("tcm runs")
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(tcm(dir.path(), &["fgl", "--no-such-flag"]).status.code(), Some(64));
    assert_eq!(tcm(dir.path(), &["frobnicate"]).status.code(), Some(64));
    assert_eq!(tcm(dir.path(), &["torsion", "--t", "2"]).status.code(), Some(64));
    assert_eq!(tcm(dir.path(), &["fgl", "--p", "4"]).status.code(), Some(64));
    assert_eq!(tcm(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn reports_are_deterministic_and_reuse_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let args = |o: &Path| vec!["charmap".to_string(), "--preset".into(), "flagship".into(), "-o".into(), o.display().to_string()];
    let run = |o: &Path| {
        let v = args(o);
        tcm(&cache, &v.iter().map(String::as_str).collect::<Vec<_>>())
    };
    assert_eq!(run(&a).status.code(), Some(0));
    assert_eq!(run(&b).status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let r = read(&a);
    assert_eq!(r["command"], "charmap");
    assert_eq!(r["parameters"]["preset"], "flagship");
    assert_eq!(r["parameters"]["budget"], 4);
    assert_eq!(r["summary"]["status"], "pass");
    assert!(r["results"]["charmap"]["iso G=2"]["exponents"].is_array());

    let (ta, tb) = (read(&dir.path().join("a.json.timings.json")), read(&dir.path().join("b.json.timings.json")));
    let events = |t: &Value| t["cache"].as_object().unwrap().values().cloned().collect::<Vec<_>>();
    assert_eq!(events(&ta), vec![Value::from("miss")]);
    assert_eq!(events(&tb), vec![Value::from("hit")]);
    for t in [&ta, &tb] {
        let secs = t["seconds"].as_object().unwrap();
        assert!(!secs.is_empty());
        assert!(secs.values().all(|s| s.as_f64().unwrap() >= 0.0));
    }
}

#[test]
fn groups_accept_corpus_names_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("z3.json");
    std::fs::write(&file, r#"{"name": "C3", "degree": 3, "generators": [[1, 2, 0]]}"#).unwrap();
    let out = dir.path().join("g.json");
    let o = tcm(
        dir.path(),
        &["groups", "--p", "3", "--group", "S3", "--group", file.to_str().unwrap(), "-o", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read(&out);
    assert_eq!(r["results"]["groups"]["C3"]["class_functions"]["total_rank"], 9);
    assert_eq!(r["results"]["groups"]["S3"]["commuting_tuples"], 3);

    let bad = dir.path().join("bad.json");
    assert_eq!(tcm(dir.path(), &["groups", "--group", "Z0", "-o", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn missing_witness_is_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.json");
    let o = tcm(dir.path(), &["charmap", "--preset", "flagship", "--budget", "0", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(read(&out)["summary"]["status"], "inconclusive");
}
