use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use motif_forge::io::{read_dataset, read_graph, write_graph};
use motif_forge_core::iso::exact_isomorphic;
use motif_forge_core::Graph;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_motif-forge"));
    c.env_remove("MOTIF_FORGE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn tree(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

/// A checkpoint small enough to train in a second.
fn tiny_ckpt(dir: &Path) -> PathBuf {
    let ckpt = dir.join("tiny.ckpt");
    ok(&["train", "--batches", "4", "--eval-every", "2", "--holdout-size", "40", "--hidden", "8", "--seed", "3", "--out", p(&ckpt)]);
    ckpt
}

fn triangle_rich(dir: &Path) -> PathBuf {
    let mut parts = vec![Graph::complete(4); 12];
    parts.push(Graph::path(5));
    parts.push(Graph::star(3));
    let path = dir.join("fixture.edgelist");
    write_graph(&path, &Graph::disjoint_union(&parts).0).unwrap();
    path
}

#[test]
fn gen_writes_one_file_per_graph() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    ok(&["gen", "--family", "er", "--n-graphs", "3", "--size", "6..6", "--seed", "1", "--out", p(&out)]);
    let graphs = read_dataset(&out).unwrap();
    assert_eq!(graphs.len(), 3);
    assert!(graphs.iter().all(|g| g.node_count() == 6));
    assert!(out.join("statistics.csv").exists());
}

#[test]
fn gen_plant_layout_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        ok(&["gen", "plant", "--motif-size", "6", "--base-size", "10", "--count", "200", "--seed", "7", "--out", p(out)]);
    }
    let graphs = read_dataset(&a.join("graphs")).unwrap();
    assert_eq!(graphs.len(), 200);
    assert!(graphs.iter().all(|g| g.node_count() == 16));
    assert_eq!(read_graph(&a.join("planted.edgelist")).unwrap().node_count(), 6);
    assert_eq!(tree(&a), tree(&b));
}

#[test]
fn json_config_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gen.json");
    std::fs::write(&cfg, r#"{"family": "ws", "n_graphs": 2, "size": [7, 7], "seed": 5}"#).unwrap();
    let out = dir.path().join("d");
    ok(&["gen", "--config", p(&cfg), "--n-graphs", "4", "--out", p(&out)]);
    let graphs = read_dataset(&out).unwrap();
    assert_eq!(graphs.len(), 4);
    assert!(graphs.iter().all(|g| g.node_count() == 7));
    let manifest = std::fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("watts_strogatz"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["gen", "--family", "nope", "--out", "x"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"n_graphs\": \"many\"}").unwrap();
    assert_eq!(run(&["gen", "--config", p(&bad), "--out", p(&dir.path().join("o"))]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_with_one() {
    let out = run(&["count", "--target", "/nonexistent/graph.edgelist", "--k", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn train_writes_loadable_checkpoint_and_curve() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("m.ckpt");
    let stdout = ok(&[
        "train", "--batches", "10", "--eval-every", "3", "--holdout-size", "40", "--hidden", "8", "--seed", "1", "--out", p(&ckpt),
    ]);
    assert!(stdout.contains("held-out accuracy"));
    motif_forge::checkpoint::load(&ckpt).unwrap();
    let curve = std::fs::read_to_string(dir.path().join("m.ckpt.curve.csv")).unwrap();
    let rows = curve.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows, 10usize.div_ceil(3) + 1);
}

#[test]
fn mine_ranks_triangle_first_and_respects_top() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = tiny_ckpt(dir.path());
    let target = triangle_rich(dir.path());
    let out = dir.path().join("mine");
    ok(&[
        "mine", "--target", p(&target), "--ckpt", p(&ckpt), "--k", "3", "--seeds", "60", "--index", "50", "--nbr-size", "4..6",
        "--top", "2", "--seed", "9", "--out", p(&out),
    ]);
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    for size in ["2", "3"] {
        let rows = csv.lines().skip(1).filter(|l| l.split(',').nth(1) == Some(size)).count();
        assert!((1..=2).contains(&rows));
    }
    let first = read_graph(&out.join("motifs/size03_rank01.edgelist")).unwrap();
    assert!(exact_isomorphic(&first.without_anchor(), &Graph::complete(3)));
}

#[test]
fn beam_width_one_matches_greedy() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = tiny_ckpt(dir.path());
    let target = dir.path().join("t");
    ok(&["gen", "--family", "mixed", "--n-graphs", "5", "--size", "8..12", "--seed", "2", "--out", p(&target)]);
    let common = ["--target", p(&target), "--ckpt", p(&ckpt), "--k", "4", "--seeds", "30", "--index", "40", "--nbr-size", "5..8", "--seed", "4"];
    let greedy = dir.path().join("greedy");
    let beam = dir.path().join("beam");
    ok(&[&["mine"][..], &common, &["--strategy", "greedy", "--out", p(&greedy)]].concat());
    ok(&[&["mine"][..], &common, &["--strategy", "beam", "--beam", "1", "--out", p(&beam)]].concat());
    let strip = |mut t: BTreeMap<PathBuf, Vec<u8>>| {
        t.remove(Path::new("manifest.json"));
        t
    };
    assert_eq!(strip(tree(&greedy)), strip(tree(&beam)));
}

#[test]
fn mine_rejects_missing_checkpoint_and_empty_target() {
    let dir = tempfile::tempdir().unwrap();
    let target = triangle_rich(dir.path());
    let out = run(&["mine", "--target", p(&target), "--ckpt", "/nonexistent.ckpt", "--out", p(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    let ckpt = tiny_ckpt(dir.path());
    let empty = dir.path().join("empty.edgelist");
    std::fs::write(&empty, "n 0\n").unwrap();
    let out = run(&["mine", "--target", p(&empty), "--ckpt", p(&ckpt), "--out", p(&dir.path().join("o2"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn count_methods_on_k4() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = dir.path().join("k4.edgelist");
    write_graph(&k4, &Graph::complete(4)).unwrap();
    let exact = ok(&["count", "--target", p(&k4), "--k", "3", "--method", "exact", "--seed", "5"]);
    assert!(exact.starts_with("# seed=5"));
    let row = exact.lines().nth(2).unwrap();
    assert_eq!(row.split(',').nth(2), Some("4"));
    let est = ok(&["count", "--target", p(&k4), "--k", "3", "--method", "randesu", "--tau", "0.000001"]);
    let weight: f64 = est.lines().nth(2).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((weight - 4.0).abs() < 1e-3);
    let mf = ok(&["count", "--target", p(&k4), "--k", "3", "--method", "mfinder", "--samples", "20", "--seed", "8"]);
    assert!(mf.starts_with("# seed=8 method=mfinder"));
    assert_eq!(run(&["count", "--target", p(&k4), "--k", "9"]).status.code(), Some(2));
}

fn small_desk(dir: &Path) -> PathBuf {
    let cfg = serde_json::json!({
        "train": {"batches": 4, "eval_every": 2, "holdout_size": 40, "validation_size": 40, "seed": 1,
                  "encoder": {"hidden": 8, "layers": 2, "mlp_layers": 2, "dim": 8}},
        "small_motifs": {
            "target": {"family": "mixed", "graphs": 6, "size_range": [6, 9], "seed": 1},
            "sizes": [3], "mfinder_samples": null, "rank": 2,
            "mine": {"seeds": 20, "index_count": 30, "size_range": [4, 6]}
        },
        "planted": {
            "plant": {"motif_size": 4, "base_size": 5, "graph_count": 10},
            "seed": 2, "runs": 2, "rank": 10,
            "mine": {"seeds": 20, "index_count": 30, "size_range": [5, 9]}
        },
        "large_motifs": {
            "target": {"family": "mixed", "graphs": 6, "size_range": [6, 9], "seed": 1},
            "sizes": [5, 6], "mfinder_samples": 20, "rank": 3,
            "mine": {"seeds": 20, "index_count": 30, "size_range": [4, 6], "verify_limit": 5}
        },
        "encoder": {"seed": 4, "holdout_size": 40, "families": ["er", "mixed"]}
    });
    let path = dir.join("desk.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

#[test]
fn repro_encoder_emits_metrics_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_desk(dir.path());
    let out = dir.path().join("enc");
    let stdout = ok(&["repro", "encoder", "--config", p(&cfg), "--out", p(&out)]);
    assert!(stdout.starts_with("method,dataset,accuracy,aupr\n"));
    let csv = std::fs::read_to_string(out.join("encoder_metrics.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("method,dataset,accuracy,aupr"));
    assert_eq!(csv.lines().count(), 3);
    assert!(out.join("model.ckpt").exists());
}

#[test]
fn repro_planted_reports_recovery() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_desk(dir.path());
    let out = dir.path().join("planted");
    let stdout = ok(&["repro", "planted", "--config", p(&cfg), "--out", p(&out)]);
    assert_eq!(stdout.lines().filter(|l| l.contains("recovered=")).count(), 2);
    assert!(out.join("planted.csv").exists());
    assert!(out.join("summary.txt").exists());
}

#[test]
fn repro_small_and_large_motifs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_desk(dir.path());
    let ckpt = tiny_ckpt(dir.path());
    for exp in ["small-motifs", "large-motifs"] {
        let a = dir.path().join(format!("{exp}-a"));
        let b = dir.path().join(format!("{exp}-b"));
        for out in [&a, &b] {
            ok(&["repro", exp, "--config", p(&cfg), "--ckpt", p(&ckpt), "--out", p(out)]);
        }
        assert_eq!(tree(&a), tree(&b));
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
        let stages: Vec<&str> = manifest["stages"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
        assert!(stages.iter().any(|s| s.starts_with("spminer")));
        assert!(stages.iter().any(|s| s.starts_with("mfinder")));
    }
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = tiny_ckpt(dir.path());
    let target = triangle_rich(dir.path());
    let out = dir.path().join("m");
    ok(&[
        "--threads", "1", "mine", "--target", p(&target), "--ckpt", p(&ckpt), "--k", "3", "--seeds", "10", "--index", "20",
        "--nbr-size", "4..6", "--timings", "--out", p(&out),
    ]);
    let t: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("timings.json")).unwrap()).unwrap();
    assert!(t["search"].as_f64().unwrap() >= 0.0);
}
