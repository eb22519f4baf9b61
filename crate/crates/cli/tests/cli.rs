mod support;

use std::fs;

use support::{cli, fixture_dir, stdout};

fn data() -> String {
    fixture_dir().display().to_string()
}

const MALL: [&str; 6] = ["--query", "mall", "--city", "Bandung", "--mode", "global"];

fn recommend(extra: &[&str]) -> std::process::Output {
    let data = data();
    let mut args = vec!["recommend", "--data", data.as_str()];
    args.extend(MALL);
    args.extend(extra);
    cli(&args)
}

#[test]
fn recommend_golden_table() {
    let out = recommend(&["--method", "lrw", "--k", "5", "--seed", "42", "--top", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[..4],
        [
            "query=mall category=shopping mall city=Bandung mode=global k=5 method=lrw seed=42 aggregation=pool",
            "experts: u02, u03, u04, u05, u06, u10, u12, u13, u14, u16, u17, u18, u19, u21, u23, u24",
            "fallback: none",
            "[('Setiabudhi Supermarket',29,1), ('Trans Studio Mall (TSM)',27,1), ('Istana Bandung Electronic Center (BEC)',26,1)]",
        ]
    );
    assert!(lines[4].starts_with("t_graph="));
}

#[test]
fn degree_output_is_stable() {
    let a = recommend(&["--method", "degree", "--k", "5", "--format", "json"]);
    let b = recommend(&["--method", "degree", "--k", "5", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains(r#""seed":null"#));
}

#[test]
fn missing_seed_is_drawn_and_printed() {
    let out = recommend(&["--method", "rw", "--k", "5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let seed: u64 = stderr
        .lines()
        .find_map(|l| l.strip_prefix("seed: "))
        .expect("seed printed")
        .parse()
        .unwrap();
    let replay = recommend(&["--method", "rw", "--k", "5", "--format", "json", "--seed", &seed.to_string()]);
    assert_eq!(out.stdout, replay.stdout);
}

#[test]
fn exit_codes() {
    let data = data();
    let spa = cli(&["recommend", "--data", &data, "--query", "spa", "--city", "Bandung", "--method", "lrw", "--k", "5"]);
    assert_eq!(spa.status.code(), Some(2));
    let message = String::from_utf8(spa.stderr).unwrap();
    assert!(message.contains("discount books") && message.contains("mall"));

    let ghost = cli(&[
        "recommend", "--data", &data, "--query", "mall", "--city", "Bandung", "--mode", "pa",
        "--user", "ghost", "--method", "degree", "--k", "5",
    ]);
    assert_eq!(ghost.status.code(), Some(2));
    assert_eq!(recommend(&["--method", "hits", "--k", "5"]).status.code(), Some(1));
    assert_eq!(recommend(&["--method", "lrw", "--k", "five"]).status.code(), Some(1));
    assert_eq!(recommend(&["--method", "lrw", "--k", "0"]).status.code(), Some(1));
    assert_eq!(cli(&["recommend"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
    assert_eq!(cli(&["ingest", "--data", "/nonexistent"]).status.code(), Some(2));
}

#[test]
fn ingest_summary() {
    let data = data();
    let out = cli(&["ingest", "--data", &data, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["users"], 49);
    assert_eq!(summary["places"], 19);
    assert_eq!(summary["reviews"], 405);
}

fn write_queries(dir: &std::path::Path, lines: &[&str]) -> String {
    let path = dir.join("queries.jsonl");
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    path.display().to_string()
}

#[test]
fn evaluate_pagerank_has_zero_mse() {
    let dir = tempfile::tempdir().unwrap();
    let queries = write_queries(
        dir.path(),
        &[r#"{"query": "mall", "city": "Bandung", "mode": "global", "method": "pagerank", "k": 5}"#],
    );
    let data = data();
    let out = cli(&["evaluate", "--data", &data, "--queries", &queries, "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["mse"], 0.0);
    assert_eq!(report["m"], 10);
}

#[test]
fn evaluate_lrw_golden() {
    let dir = tempfile::tempdir().unwrap();
    let queries = write_queries(
        dir.path(),
        &[r#"{"query": "mall", "city": "Bandung", "mode": "global", "method": "lrw", "k": 5}"#],
    );
    let data = data();
    let out = cli(&["evaluate", "--data", &data, "--queries", &queries, "--m", "10", "--seed", "42", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let score = "[4.346692451450121,4.346692451450121]";
    let expected = format!(
        concat!(
            r#"{{"query":"mall","city":"Bandung","mode":"global","method":"lrw","k":5,"m":10,"degenerate":0,"#,
            r#""r_scores":[{}],"e_r":1.0,"mse":0.0,"precision":[{{"x":1,"p":1.0}},{{"x":3,"p":1.0}},"#,
            r#"{{"x":5,"p":1.0}},{{"x":10,"p":1.0}},{{"x":15,"p":1.0}},{{"x":20,"p":0.8}},"#,
            r#"{{"x":30,"p":0.5333333333333333}}]}}"#,
            "\n"
        ),
        vec![score; 10].join(",")
    );
    assert_eq!(stdout(&out), expected);
}

#[test]
fn evaluate_rejects_short_walks() {
    let dir = tempfile::tempdir().unwrap();
    let queries = write_queries(
        dir.path(),
        &[r#"{"query": "mall", "city": "Bandung", "mode": "global", "method": "lrw", "k": 2}"#],
    );
    let data = data();
    let out = cli(&["evaluate", "--data", &data, "--queries", &queries]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains(":1"));
}

#[test]
fn synth_then_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("tiny");
    let target = out_dir.display().to_string();
    let out = cli(&["synth", "--out", &target, "--users", "30", "--places", "6", "--reviews", "40", "--synth-seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = cli(&["ingest", "--data", &target, "--format", "json"]);
    let summary: serde_json::Value = serde_json::from_slice(&summary.stdout).unwrap();
    assert_eq!((summary["users"].as_u64(), summary["places"].as_u64(), summary["reviews"].as_u64()), (Some(30), Some(6), Some(40)));
}

#[test]
fn bench_percentages_add_up() {
    let data = data();
    let out = cli(&["bench", "--data", &data, "--reps", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let sum: f64 = ["pct_graph", "pct_algo", "pct_other"].iter().map(|k| row[*k].as_f64().unwrap()).sum();
        assert!((sum - 100.0).abs() < 0.1);
        let t = &row["timings"];
        let parts: f64 = ["t_graph", "t_algo", "t_other"].iter().map(|k| t[*k].as_f64().unwrap()).sum();
        assert!((t["t_total"].as_f64().unwrap() - parts).abs() < 1e-3);
    }
    let table = cli(&["bench", "--data", &data, "--reps", "1"]);
    assert!(stdout(&table).contains("lrw - rw t_total difference"));
}
