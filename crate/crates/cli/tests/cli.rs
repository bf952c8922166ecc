use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gpart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpart"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn kv(out: &Output) -> HashMap<String, String> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_partition_eval() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpart(&[
        "generate",
        "--family",
        "two-cliques",
        "--nodes",
        "8",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let gen = kv(&out);
    assert_eq!(gen["edges"], "13");
    assert_eq!(gen["planted_cut_weight"], "1");

    let graph = dir.path().join("graph.txt");
    for method in ["kl", "spectral", "gnn"] {
        let pdir = dir.path().join(method);
        let out = gpart(&["partition", s(&graph), "--method", method, "--out", s(&pdir)]);
        assert_eq!(code(&out), 0, "{method}: {}", String::from_utf8_lossy(&out.stderr));
        let m = kv(&out);
        assert_eq!(m["method"], method);
        assert_eq!(m["nodes"], "8");
        assert!(m.contains_key("cut_percent") && m.contains_key("imbalance_percent"));
        assert_eq!(m.contains_key("markov_bound"), method == "gnn");

        let eval = kv(&gpart(&["eval", s(&graph), s(&pdir.join("partition.txt"))]));
        assert_eq!(eval["cut_weight"], m["cut_weight"]);
        assert_eq!(eval["imbalance_percent"], m["imbalance_percent"]);
    }
    let kl = kv(&gpart(&["eval", s(&graph), s(&dir.path().join("kl/partition.txt"))]));
    assert_eq!(kl["cut_weight"], "1");
    assert_eq!(kl["imbalance_percent"], "0.00");
}

#[test]
fn metis_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = gpart(&[
        "generate",
        "--nodes",
        "30",
        "--seed",
        "4",
        "--format",
        "metis",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    let graph = dir.path().join("graph.metis");
    assert!(fs::read_to_string(&graph).unwrap().starts_with("30 "));
    let out = gpart(&["partition", s(&graph), "--format", "metis", "--method", "kl"]);
    assert_eq!(code(&out), 0);
    assert_eq!(kv(&out)["imbalance_percent"], "0.00");
}

#[test]
fn bench_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("sweep.conf");
    fs::write(
        &conf,
        "sizes = 20,30\ngraphs-per-size = 2\nmethod = kl,spectral\nno-timing = true\n",
    )
    .unwrap();
    let run = |out: &Path| {
        let res = gpart(&["bench", "--config", s(&conf), "--er-p", "0.3", "--out", s(out)]);
        assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
        fs::read_to_string(out.join("bench.csv")).unwrap()
    };
    let a = run(&dir.path().join("a"));
    let b = run(&dir.path().join("b"));
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "# family=er p=0.3 graphs_per_size=2 seeds_per_graph=3");
    // 2 sizes x (kl 2 graphs x 3 seeds + spectral 2 graphs)
    assert_eq!(lines.len(), 2 + 2 * (6 + 2));
    assert!(lines[2].starts_with("20,kl,"));
    let svg = fs::read_to_string(dir.path().join("a/bench.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // usage
    assert_eq!(code(&gpart(&[])), 1);
    assert_eq!(code(&gpart(&["partition"])), 1);
    assert_eq!(code(&gpart(&["partition", "g.txt", "--method", "metis"])), 1);
    assert_eq!(code(&gpart(&["bench", "--sizes", ""])), 1);
    assert_eq!(code(&gpart(&["--help"])), 0);

    // input
    let missing = dir.path().join("missing.txt");
    assert_eq!(code(&gpart(&["partition", s(&missing), "--method", "kl"])), 2);
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0 1\n1 1\n").unwrap();
    let out = gpart(&["partition", s(&bad), "--method", "kl"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("self-loop"));

    let graph = dir.path().join("g.txt");
    fs::write(&graph, "0 1\n1 2\n2 3\n").unwrap();
    let part = dir.path().join("p.txt");
    fs::write(&part, "0\n1\n").unwrap();
    assert_eq!(code(&gpart(&["eval", s(&graph), s(&part)])), 2);

    let split = dir.path().join("split.txt");
    fs::write(&split, "0 1\n2 3\n").unwrap();
    assert_eq!(code(&gpart(&["partition", s(&split), "--method", "spectral"])), 2);

    // runtime: a vanishing centrality width makes the gradients NaN
    let out = gpart(&[
        "partition",
        s(&graph),
        "--method",
        "gnn",
        "--xi",
        "1e-200",
        "--epochs",
        "50",
    ]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
}
