use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitlimit"))
        .args(args)
        .env_remove("SPLITLIMIT_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn count_lists_four_dh_trees_at_size_two() {
    let o = run(&["count", "--family", "dh", "--max-n", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# splitlimit"));
    assert!(text.lines().any(|l| l == "dh,2,4,"));
    assert!(text.lines().any(|l| l == "dh,4,596,38"));
}

#[test]
fn constants_report_printed_values() {
    let o = run(&["constants", "--family", "dh"]);
    assert!(o.status.success());
    let v = json(&o);
    let r = &v["result"];
    let get = |k: &str| r[k].as_f64().unwrap_or_else(|| panic!("missing {k} in {r}"));
    assert!((get("rho") - 0.1597).abs() < 5e-4);
    assert!((get("gamma_h") - 3.9258).abs() < 5e-4);
    assert!((get("c_f") - 0.3602).abs() < 5e-4);
}

#[test]
fn tree_distance_on_the_example_is_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    std::fs::write(&path, stdout(&run(&["tree", "example"]))).unwrap();
    let o = run(&["tree", "distance", "--in", path.to_str().unwrap(), "--pair", "6", "7"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "3");
}

#[test]
fn bad_flags_exit_with_two() {
    for args in [
        &["count", "--max-n", "0"][..],
        &["count", "--max-n", "x"],
        &["constants", "--family", "nope"],
        &["sample", "--family", "dh", "--size", "10", "--epsilon", "1.5", "--out", "unused"],
        &["crt", "sample", "-k", "0"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn corrupted_golden_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken_golden.csv");
    std::fs::write(&path, "family,n,tree_count,graph_count\ndh,2,5,\n").unwrap();
    let o = run(&["selftest", "--golden", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL") && text.contains("broken_golden.csv"), "{text}");
}

fn sample_dir(dir: &Path, seed: &str) {
    let o = run(&["sample", "--family", "dh2c", "--size", "25", "--count", "3", "--seed", seed, "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sampling_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    sample_dir(a.path(), "17");
    sample_dir(b.path(), "17");
    for i in 0..3 {
        let name = format!("graph_{i:06}.json");
        let x = std::fs::read(a.path().join(&name)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(&name)).unwrap());
        let v: serde_json::Value = serde_json::from_slice(&x).unwrap();
        assert_eq!(v["result"]["size"], 25);
    }
}

#[test]
fn seed_falls_back_to_environment() {
    let out = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_splitlimit"));
        c.args(["crt", "sample", "-k", "2", "--count", "3"]).env_remove("SPLITLIMIT_SEED");
        if let Some(e) = env {
            c.env("SPLITLIMIT_SEED", e);
        }
        if let Some(f) = flag {
            c.args(["--seed", f]);
        }
        String::from_utf8(c.output().unwrap().stdout).unwrap()
    };
    assert_eq!(out(Some("5"), None), out(None, Some("5")));
    assert_ne!(out(Some("5"), None), out(None, None));
}

#[test]
fn crt_csv_has_one_column_per_pair() {
    let o = run(&["crt", "sample", "-k", "3", "--count", "10", "--seed", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0].split(',').count(), 1 + 16);
    for r in &rows[1..] {
        let v: Vec<f64> = r.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[0], 0.0);
        assert_eq!(v[1], v[4]);
    }
}

#[test]
fn decompose_round_trips_through_the_graph() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("t.json");
    let graph = dir.path().join("g.json");
    let back = dir.path().join("back.json");
    std::fs::write(&tree, stdout(&run(&["tree", "example"]))).unwrap();
    let g = run(&["tree", "graph", "--in", tree.to_str().unwrap()]);
    std::fs::write(&graph, stdout(&g)).unwrap();
    let o = run(&["decompose", "--in", graph.to_str().unwrap(), "--out", back.to_str().unwrap()]);
    assert!(o.status.success());
    let again = run(&["tree", "graph", "--in", back.to_str().unwrap()]);
    assert_eq!(stdout(&again), stdout(&g));
}

#[test]
fn decompose_rejects_non_dh_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c5.json");
    std::fs::write(&path, r#"{"n":5,"edges":[[0,1],[1,2],[2,3],[3,4],[0,4]]}"#).unwrap();
    let o = run(&["decompose", "--in", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["kind"], "graph");
}
