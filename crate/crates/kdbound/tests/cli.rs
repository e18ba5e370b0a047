// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use kdbound::format::{sha256_hex, tree_from_json, BuildManifest};
use kdbound_core::Node;

fn kdbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdbound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn build_fixture(dir: &Path) -> std::path::PathBuf {
    let out = dir.join("planar.json");
    let o = kdbound(&[
        "build",
        "--fixture",
        "planar20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    out
}

#[test]
fn build_fixture_thresholds_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = build_fixture(dir.path());
    let text = std::fs::read_to_string(&out).unwrap();
    let tree = tree_from_json(&text).unwrap();
    let Node::Internal {
        rule, left, right, ..
    } = tree.node(tree.root()).unwrap()
    else {
        panic!("root splits");
    };
    assert_eq!(rule.threshold, 2.26);
    let child = |id| match tree.node(id).unwrap() {
        Node::Internal { rule, .. } => rule.threshold,
        _ => panic!("second level splits"),
    };
    assert_eq!((child(*left), child(*right)), (2.92, 2.13));
    assert_eq!(tree.leaf_count(), 8);

    let manifest: BuildManifest = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("planar.json.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest.sha256, sha256_hex(text.as_bytes()));
    assert_eq!((manifest.n, manifest.d, manifest.n0), (20, 2, 2));
}

#[test]
fn large_leaf_size_gives_single_leaf() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("one.json");
    let o = kdbound(&[
        "build",
        "--fixture",
        "planar20",
        "--n0",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let tree = tree_from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(tree.leaf_count(), 1);
}

#[test]
fn missing_input_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no-such-points.json");
    let out = dir.path().join("t.json");
    let o = kdbound(&[
        "build",
        "--data",
        missing.to_str().unwrap(),
        "--n0",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no-such-points.json"), "{}", stderr(&o));
}

#[test]
fn build_from_point_file() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.json");
    std::fs::write(
        &pts,
        r#"{"points": [[0.1, 0.2], [0.7, 0.9], [0.4, 0.4], [0.9, 0.1]]}"#,
    )
    .unwrap();
    let out = dir.path().join("t.json");
    let o = kdbound(&[
        "build",
        "--data",
        pts.to_str().unwrap(),
        "--n0",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let q = kdbound(&[
        "query",
        "--tree",
        out.to_str().unwrap(),
        "--q",
        "0.8,0.8",
        "--mode",
        "brute",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&q.stdout).unwrap();
    assert_eq!(v["index"], 1);
}

#[test]
fn sampled_build_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = kdbound(&[
            "build",
            "--dist",
            "uniform",
            "--d",
            "3",
            "--n",
            "300",
            "--seed",
            "5",
            "--n0",
            "8",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn sampling_requires_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = kdbound(&[
        "build",
        "--dist",
        "uniform",
        "--d",
        "3",
        "--n",
        "30",
        "--n0",
        "8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--seed"), "{}", stderr(&o));
}

#[test]
fn query_modes_on_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let tree = build_fixture(dir.path());
    let run = |mode: &str| {
        let o = kdbound(&[
            "query",
            "--tree",
            tree.to_str().unwrap(),
            "--q",
            "3.47,5.5",
            "--mode",
            mode,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()
    };
    let def = run("defeatist");
    assert_eq!(def["point"], serde_json::json!([4.64, 2.29]));
    assert_eq!(def["visited_leaves"], 1);
    let com = run("comprehensive");
    assert_eq!(com["point"], serde_json::json!([3.19, 5.69]));
    let brute = run("brute");
    assert_eq!(brute["index"], com["index"]);
    assert_eq!(brute["distance"], com["distance"]);
}

#[test]
fn query_dimension_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let tree = build_fixture(dir.path());
    let o = kdbound(&["query", "--tree", tree.to_str().unwrap(), "--q", "1,2,3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dimension"), "{}", stderr(&o));
}

#[test]
fn unknown_experiment_exits_2_with_names() {
    let o = kdbound(&["experiment", "warp-speed", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for name in kdbound::experiments::EXPERIMENT_NAMES {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn failed_threshold_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = kdbound(&[
        "experiment",
        "defeatist-success",
        "--n",
        "256",
        "--n0",
        "4",
        "--d-grid",
        "16",
        "--trials",
        "50",
        "--min-success-rate",
        "1.0",
        "--seed",
        "3",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("[FAIL] min_success_rate[d=16]"));
    assert!(dir.path().join("defeatist-success.jsonl").exists());
}

#[test]
fn rerun_is_byte_identical_across_parallelism() {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, par) in dirs.iter().zip(["1", "1", "4"]) {
        let o = kdbound(&[
            "experiment",
            "cell-regularity",
            "--n",
            "8192",
            "--n0",
            "64",
            "--d",
            "3",
            "--trees",
            "6",
            "--seed",
            "7",
            "--parallelism",
            par,
            "--out-dir",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    for file in ["cell-regularity.jsonl", "cell-regularity.csv"] {
        let first = std::fs::read(dirs[0].path().join(file)).unwrap();
        for d in &dirs[1..] {
            assert_eq!(first, std::fs::read(d.path().join(file)).unwrap(), "{file}");
        }
    }
}

#[test]
fn example1_memory_guard() {
    let o = kdbound(&[
        "experiment",
        "example1",
        "--d",
        "8",
        "--trials",
        "1",
        "--memory-budget",
        "1000",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("override n0"), "{}", stderr(&o));
}

#[test]
fn example1_smoke_d2() {
    let dir = tempfile::tempdir().unwrap();
    let o = kdbound(&[
        "experiment",
        "example1",
        "--d",
        "2",
        "--trials",
        "10",
        "--seed",
        "7",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("outside asymptotic regime"));
}

#[test]
fn distribution_file_with_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("dist.json");
    std::fs::write(
        &cfg,
        r#"{"type": "product", "d": 3, "intervals": [[0.0, 0.2], [0.6, 1.0]], "masses": [0.3, 0.7], "seed": 11}"#,
    )
    .unwrap();
    let o = kdbound(&[
        "experiment",
        "diameter",
        "--dist-file",
        cfg.to_str().unwrap(),
        "--n",
        "2048",
        "--n0",
        "16",
        "--d-grid",
        "3",
        "--queries",
        "50",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let jsonl = std::fs::read_to_string(dir.path().join("diameter.jsonl")).unwrap();
    assert!(jsonl.contains("\"distribution\":\"product\""));
}
