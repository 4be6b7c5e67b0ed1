use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use drcr_core::fixtures;
use drcr_core::graph::load_network;
use drcr_core::records::{parse_jsonl, ResultRecord};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drcr-bench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = bench(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn results(path: &Path) -> Vec<ResultRecord> {
    parse_jsonl(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        ok(&["gen", "--nodes", "300", "--pmult", "1", "--seed", "7", "--cases", "drcr", "--count", "30", "--out", p(out)]);
    }
    for file in ["graph.csv", "queries.jsonl", "manifest.json"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    assert_eq!(fs::read_to_string(a.join("queries.jsonl")).unwrap().lines().count(), 30);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["nodes"], 300);
    assert_eq!(manifest["query_seeds"].as_array().unwrap().len(), 30);
}

#[test]
fn nonstar_srlgs_cover_every_link() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "gen", "--nodes", "60", "--pmult", "2", "--seed", "3", "--cases", "srlg", "--srlg-style", "nonstar",
        "--srlg-size", "1", "5", "--count", "10", "--out", p(dir.path()),
    ]);
    let net = load_network(&fs::read_to_string(dir.path().join("graph.csv")).unwrap()).unwrap();
    assert!(net.link_count() > 0);
    assert!(net.links().iter().all(|l| !l.srlgs.is_empty()));
    let queries = fs::read_to_string(dir.path().join("queries.jsonl")).unwrap();
    assert!(queries.lines().all(|l| l.contains("\"delta\":4")));
}

#[test]
fn pulse_on_g1_matches_known_answers() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("graph.csv");
    let queries = dir.path().join("queries.jsonl");
    fs::write(&graph, fixtures::g1().to_edge_list()).unwrap();
    fs::write(
        &queries,
        "{\"src\":\"s\",\"dst\":\"t\",\"L\":0,\"U\":10}\n{\"src\":\"s\",\"dst\":\"t\",\"L\":3,\"U\":5}\n{\"src\":\"s\",\"dst\":\"t\",\"L\":5,\"U\":6}\n",
    )
    .unwrap();
    for algo in ["pulse+", "cost-ksp", "delay-ksp", "lagrangian-ksp"] {
        let out = dir.path().join(format!("{algo}.jsonl"));
        ok(&["solve", "--graph", p(&graph), "--queries", p(&queries), "--algo", algo, "--out", p(&out)]);
        let recs = results(&out);
        let got: Vec<(&str, Option<u64>)> = recs.iter().map(|r| (r.status.as_str(), r.cost)).collect();
        assert_eq!(got, [("optimal", Some(2)), ("optimal", Some(10)), ("infeasible", None)], "{algo}");
        assert!(recs.iter().all(|r| r.algo.as_deref() == Some(algo)));
    }
}

#[test]
fn tiny_time_limit_reports_timeouts_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen", "--nodes", "400", "--pmult", "3", "--seed", "1", "--count", "10", "--out", p(dir.path())]);
    let out = dir.path().join("r.jsonl");
    ok(&[
        "solve", "--graph", p(&dir.path().join("graph.csv")), "--queries", p(&dir.path().join("queries.jsonl")),
        "--algo", "cost-ksp", "--time-limit-ms", "0.001", "--out", p(&out),
    ]);
    let recs = results(&out);
    assert_eq!(recs.len(), 10);
    assert!(recs.iter().all(|r| r.status == "timeout"));
}

#[test]
fn bad_invocations_fail() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("graph.csv");
    let queries = dir.path().join("queries.jsonl");
    fs::write(&graph, fixtures::g1().to_edge_list()).unwrap();
    fs::write(&queries, "{\"src\":\"s\",\"dst\":\"t\",\"L\":0,\"U\":10}\n").unwrap();

    let unknown = bench(&["solve", "--graph", p(&graph), "--queries", p(&queries), "--algo", "dijkstra"]);
    assert!(!unknown.status.success());
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("dijkstra"));

    let wrong_kind = bench(&["solve", "--graph", p(&graph), "--queries", p(&queries), "--algo", "cose-pulse+"]);
    assert!(!wrong_kind.status.success());

    fs::write(&queries, "{\"src\":\"nowhere\",\"dst\":\"t\",\"U\":10}\n").unwrap();
    let unknown_node = bench(&["solve", "--graph", p(&graph), "--queries", p(&queries), "--algo", "pulse+"]);
    assert!(!unknown_node.status.success());

    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    assert!(!bench(&["report", "--results", p(&empty)]).status.success());
}

#[test]
fn jobs_keep_input_order() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen", "--nodes", "200", "--pmult", "2", "--seed", "9", "--count", "25", "--out", p(dir.path())]);
    let run = |jobs: &str| {
        let out = dir.path().join(format!("jobs{jobs}.jsonl"));
        ok(&[
            "solve", "--graph", p(&dir.path().join("graph.csv")), "--queries", p(&dir.path().join("queries.jsonl")),
            "--algo", "pulse+", "--jobs", jobs, "--out", p(&out),
        ]);
        results(&out).into_iter().map(|r| (r.status, r.cost, r.path, r.iterations)).collect::<Vec<_>>()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn srlg_solvers_agree_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["gen", "--nodes", "12", "--pmult", "2", "--seed", "4", "--cases", "srlg", "--count", "15", "--out", p(dir.path())]);
    let mut outcomes = Vec::new();
    for algo in ["cose-pulse+", "srlg-cost-ksp", "srlg-delay-ksp", "srlg-lagrangian-ksp"] {
        let out = dir.path().join(format!("{algo}.jsonl"));
        ok(&[
            "solve", "--graph", p(&dir.path().join("graph.csv")), "--queries", p(&dir.path().join("queries.jsonl")),
            "--algo", algo, "--out", p(&out),
        ]);
        let recs = results(&out);
        assert_eq!(recs.len(), 15);
        assert!(recs.iter().filter(|r| r.status == "optimal").all(|r| r.backup_path.is_some()));
        outcomes.push(recs.into_iter().map(|r| (r.status, r.cost)).collect::<Vec<_>>());
    }
    assert!(outcomes[0].iter().any(|(s, _)| s == "optimal"));
    for other in &outcomes[1..] {
        assert_eq!(&outcomes[0], other);
    }
}

fn synthetic(path: &Path, algo: &str, elapsed: impl IntoIterator<Item = Option<u64>>) {
    let mut text = String::new();
    for e in elapsed {
        let status = if e.is_some() { "optimal" } else { "timeout" };
        text.push_str(&format!(
            "{{\"status\":\"{status}\",\"elapsed_us\":{},\"topology\":\"t\",\"algo\":\"{algo}\"}}\n",
            e.unwrap_or(10_000_000)
        ));
    }
    fs::write(path, text).unwrap();
}

#[test]
fn report_percentiles_and_completion() {
    let dir = tempfile::tempdir().unwrap();
    let solved = dir.path().join("solved.jsonl");
    let half = dir.path().join("half.jsonl");
    synthetic(&solved, "a", (1..=100).map(Some));
    synthetic(&half, "b", (1..=50).map(Some).chain((0..50).map(|_| None)));

    let csv_out = ok(&["report", "--results", p(&solved), p(&half)]);
    let lines: Vec<&str> = csv_out.lines().collect();
    assert_eq!(lines[0], "topology,algo,p50_us,p75_us,p99_us,completion_rate");
    assert_eq!(lines[1], "t,a,50,75,99,1.0000");
    assert_eq!(lines[2], "t,b,50,>LIMIT,>LIMIT,0.5000");

    let with_limit = ok(&["report", "--results", p(&half), "--time-limit-ms", "10000"]);
    assert!(with_limit.contains("t,b,50,>10000000,>10000000,0.5000"));

    let file = dir.path().join("report.csv");
    ok(&["report", "--results", p(&solved), p(&half), "--out", p(&file)]);
    let first = fs::read(&file).unwrap();
    ok(&["report", "--results", p(&solved), p(&half), "--out", p(&file)]);
    assert_eq!(first, fs::read(&file).unwrap());
    assert_eq!(first, csv_out.as_bytes());
}

#[test]
fn help_documents_nearest_rank() {
    let help = ok(&["report", "--help"]);
    assert!(help.contains("nearest-rank"));
}
