use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn wikinet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wikinet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = wikinet(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn extract(dir: &Path) {
    let wiki = fixtures().join("wiki");
    ok(&[
        "extract",
        "--catalogue",
        s(&wiki.join("catalogue")),
        "--pages",
        s(&wiki.join("pages")),
        "--out",
        s(dir),
    ]);
}

#[test]
fn extract_writes_edges_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    extract(tmp.path());
    let edges = fs::read_to_string(tmp.path().join("edges.tsv")).unwrap();
    assert_eq!(edges.lines().count(), 2, "{edges}");
    assert!(edges.contains("Niels Henrik Abel\tBernhard Bolzano"));
    assert!(edges.contains("Niels Henrik Abel\tMaria Gaetana Agnesi"));
    let bios = fs::read_to_string(tmp.path().join("biographies.txt")).unwrap();
    assert_eq!(bios.lines().count(), 3);
    let manifest = json(&tmp.path().join("extract_manifest.json"));
    assert_eq!(manifest["warning_count"], 1);
    assert_eq!(manifest["network"]["biographies"], 3);
    assert_eq!(manifest["network"]["hyperlinks"], 2);
    assert_eq!(manifest["network"]["self_links"], 1);
}

#[test]
fn fused_analysis_matches_extracted_edge_list() {
    let tmp = tempfile::tempdir().unwrap();
    let (ex, fused, staged) = (tmp.path().join("ex"), tmp.path().join("fused"), tmp.path().join("staged"));
    extract(&ex);
    let wiki = fixtures().join("wiki");
    ok(&[
        "analyze",
        "--catalogue",
        s(&wiki.join("catalogue")),
        "--pages",
        s(&wiki.join("pages")),
        "--out",
        s(&fused),
    ]);
    ok(&[
        "analyze",
        "--edges",
        s(&ex.join("edges.tsv")),
        "--nodes",
        s(&ex.join("biographies.txt")),
        "--out",
        s(&staged),
    ]);
    for name in ["scores.csv", "scores.json", "correlations_lcc.csv", "degree_fit.json"] {
        assert_eq!(
            fs::read(fused.join(name)).unwrap(),
            fs::read(staged.join(name)).unwrap(),
            "{name}"
        );
    }
    assert_eq!(
        json(&fused.join("network.json"))["parameters"],
        json(&staged.join("network.json"))["parameters"]
    );
}

fn write_edges(dir: &Path, name: &str, text: &str) -> PathBuf {
    fs::create_dir_all(dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn path_graph_table() {
    let tmp = tempfile::tempdir().unwrap();
    let edges = write_edges(tmp.path(), "p3.tsv", "a\tb\nb\tc\n");
    let out = tmp.path().join("out");
    ok(&["analyze", "--edges", s(&edges), "--out", s(&out)]);
    let csv = fs::read_to_string(out.join("scores.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(
        lines[0],
        "title,degree_raw,degree,betweenness,closeness,eigenvector,pagerank,average,rank_by_average"
    );
    assert!(lines[1].starts_with("b,2,100.00,100.00,100.00,100.00,100.00,100.00,1"), "{}", lines[1]);
    assert!(lines[2].starts_with("a,1,50.00,0.00,66.67,70.71,"), "{}", lines[2]);
    let params = json(&out.join("network.json"))["parameters"].clone();
    assert_eq!(params["diameter"], 2);
    let fit = json(&out.join("degree_fit.json"));
    assert_eq!(fit["error"]["kind"], "insufficient_bins");
}

fn ring_with_chords(n: usize) -> String {
    let mut text = String::new();
    for i in 0..n {
        text.push_str(&format!("v{i}\tv{}\n", (i + 1) % n));
        if i % 4 == 0 {
            text.push_str(&format!("v{i}\tv{}\n", (i + n / 3) % n));
        }
    }
    text
}

#[test]
fn noise_without_rewiring_reproduces_analysis() {
    let tmp = tempfile::tempdir().unwrap();
    let edges = write_edges(tmp.path(), "g.tsv", &ring_with_chords(30));
    let (a, n) = (tmp.path().join("a"), tmp.path().join("n"));
    ok(&["analyze", "--edges", s(&edges), "--out", s(&a)]);
    ok(&["noise", "--edges", s(&edges), "--p", "0", "--samples", "4", "--out", s(&n)]);
    let scores = json(&a.join("scores.json"));
    let ensemble = json(&n.join("ensemble_scores.json"));
    for (row, node) in scores["rows"].as_array().unwrap().iter().zip(ensemble.as_array().unwrap()) {
        assert_eq!(row["title"], node["title"]);
        assert_eq!(row["average"], node["scores"][5]["mean"]);
        assert_eq!(row["rescaled"]["betweenness"], node["scores"][1]["mean"]);
        for s in node["scores"].as_array().unwrap() {
            assert_eq!(s["std"], 0.0);
        }
    }
    let fit = json(&n.join("degree_std.json"));
    assert_eq!(fit["fit"]["slope"], 0.0);
}

#[test]
fn noise_is_reproducible_across_workers() {
    let tmp = tempfile::tempdir().unwrap();
    let edges = write_edges(tmp.path(), "g.tsv", &ring_with_chords(40));
    let run = |name: &str, workers: &str| {
        let out = tmp.path().join(name);
        ok(&[
            "noise", "--edges", s(&edges), "--samples", "20", "--seed", "7", "--workers", workers, "--out",
            s(&out),
        ]);
        out
    };
    let (one, two, again) = (run("one", "1"), run("two", "3"), run("again", "1"));
    for name in [
        "ensemble_scores.csv",
        "ensemble_scores.json",
        "ensemble_samples.csv",
        "rank_boxes.json",
        "degree_std.json",
    ] {
        let reference = fs::read(one.join(name)).unwrap();
        assert_eq!(reference, fs::read(two.join(name)).unwrap(), "{name}");
        assert_eq!(reference, fs::read(again.join(name)).unwrap(), "{name}");
    }
    let other = tmp.path().join("other");
    ok(&["noise", "--edges", s(&edges), "--samples", "20", "--seed", "8", "--out", s(&other)]);
    assert_ne!(
        fs::read(one.join("ensemble_samples.csv")).unwrap(),
        fs::read(other.join("ensemble_samples.csv")).unwrap()
    );
}

#[test]
fn poset_of_published_table() {
    let tmp = tempfile::tempdir().unwrap();
    let scores = fixtures().join("score2017.csv");
    ok(&["poset", "--scores", s(&scores), "--out", s(tmp.path())]);
    let dag = json(&tmp.path().join("hasse.json"));
    let nodes = dag["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 35);
    let tops: Vec<&str> = nodes
        .iter()
        .filter(|n| n["is_top"] == true)
        .map(|n| n["title"].as_str().unwrap())
        .collect();
    assert_eq!(tops, ["David Hilbert", "Isaac Newton", "John von Neumann"]);
    let leibniz = nodes.iter().find(|n| n["title"] == "Gottfried Wilhelm Leibniz").unwrap();
    assert_eq!(leibniz["height"], 2);
    let dot = fs::read_to_string(tmp.path().join("hasse.dot")).unwrap();
    assert_eq!(dot.matches("peripheries=2").count(), 3);
}

#[test]
fn poset_of_chain_and_antichain() {
    let tmp = tempfile::tempdir().unwrap();
    let chain = write_edges(
        tmp.path(),
        "chain.csv",
        "title,degree,betweenness,closeness,eigenvector,pagerank\nA,3,3,3,3,3\nB,2,2,2,2,2\nC,1,1,1,1,1\n",
    );
    let out = tmp.path().join("chain");
    ok(&["poset", "--scores", s(&chain), "--out", s(&out)]);
    let dot = fs::read_to_string(out.join("hasse.dot")).unwrap();
    assert_eq!(dot.matches("->").count(), 2);
    assert!(dot.contains("n0 -> n1;") && dot.contains("n1 -> n2;"));

    let anti = write_edges(
        tmp.path(),
        "anti.csv",
        "title,degree,betweenness,closeness,eigenvector,pagerank\nA,3,1,2,2,2\nB,1,3,2,2,2\nC,2,2,3,1,1\n",
    );
    let out = tmp.path().join("anti");
    ok(&["poset", "--scores", s(&anti), "--out", s(&out)]);
    let dot = fs::read_to_string(out.join("hasse.dot")).unwrap();
    assert!(!dot.contains("->"));
}

#[test]
fn config_file_and_flag_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    write_edges(tmp.path(), "g.tsv", &ring_with_chords(20));
    let cfg = tmp.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"input": {"edge_list": "g.tsv"}, "output_dir": "out", "noise": {"samples": 3, "p": 0.2}, "top_k": 5}"#,
    )
    .unwrap();
    ok(&["noise", "--config", s(&cfg), "--samples", "2"]);
    let samples = fs::read_to_string(tmp.path().join("out/ensemble_samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 3);
    let std = json(&tmp.path().join("out/degree_std.json"));
    assert_eq!(std["config"]["p"], 0.2);
}

#[test]
fn failures_emit_error_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: Vec<(Vec<String>, &str)> = vec![
        (vec!["analyze".into()], "config"),
        (
            vec!["analyze".into(), "--edges".into(), s(&tmp.path().join("missing.tsv")).into()],
            "file",
        ),
        (
            vec!["noise".into(), "--edges".into(), "x".into(), "--p".into(), "2".into()],
            "config",
        ),
    ];
    for (args, kind) in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = wikinet(&args);
        assert!(!out.status.success());
        let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["error"]["kind"], kind, "{args:?}");
        assert!(err["error"]["message"].is_string());
    }
    let empty = write_edges(tmp.path(), "empty.tsv", "# nothing\n");
    let out = wikinet(&["analyze", "--edges", s(&empty), "--out", s(&tmp.path().join("o"))]);
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "empty");
}
