use std::path::Path;
use std::process::{Command, Output};

use fastgas::{generate_synthetic, save_embeddings, EmbeddingFormat};

fn fastgas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fastgas"))
        .args(args)
        .env_remove("FASTGAS_SEED")
        .output()
        .unwrap()
}

fn write_pool(dir: &Path, n: usize) -> String {
    let path = dir.join("pool.bin");
    save_embeddings(&generate_synthetic(n, 16, 4, 0.2, 1).unwrap(), &path, EmbeddingFormat::Binary).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn missing_file_exits_1_and_names_the_path() {
    let out = fastgas(&["build-graph", "--input", "/no/such/pool.bin"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/pool.bin"));
}

#[test]
fn malformed_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    std::fs::write(&path, "{\"id\": \"a\", \"vector\": [1.0]}\nnot json\n").unwrap();
    let out = fastgas(&["build-graph", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("record 2"));
}

#[test]
fn parameter_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write_pool(dir.path(), 50);
    let k0 = fastgas(&["build-graph", "--input", &pool, "--k", "0"]);
    assert_eq!(k0.status.code(), Some(2));
    let too_many = fastgas(&["select", "--input", &pool, "--K", "2", "--budget", "51"]);
    assert_eq!(too_many.status.code(), Some(2));
    let no_parts = fastgas(&["select", "--input", &pool, "--budget", "5"]);
    assert_eq!(no_parts.status.code(), Some(2));
}

#[test]
fn select_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write_pool(dir.path(), 300);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = fastgas(&[
            "select", "--method", "fastgas", "--input", &pool, "--budget", "18", "--K", "6", "--seed", "0",
            "--no-timings", "--output", out.to_str().unwrap(),
        ]);
        assert!(status.status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["K"], 6);
    assert_eq!(v["selected"].as_array().unwrap().len(), 18);
    assert!(v.get("timings_ms").is_none());
}

#[test]
fn timings_are_reported_by_stage() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write_pool(dir.path(), 200);
    let out = fastgas(&["select", "--input", &pool, "--budget", "10", "--K", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for stage in ["embed_load", "knn", "coarsen", "init_bisect", "refine", "partition_total", "select", "total"] {
        assert!(v["timings_ms"][stage].is_number(), "{stage}");
    }
    let out = fastgas(&["partition", "--input", &pool, "--K", "3"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for stage in ["coarsen", "init", "refine", "total"] {
        assert!(v["timings_ms"][stage].is_number(), "{stage}");
    }
}

#[test]
fn seed_env_is_a_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write_pool(dir.path(), 100);
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fastgas"));
        cmd.args(["select", "--method", "random", "--input", &pool, "--budget", "5", "--no-timings"]);
        cmd.env_remove("FASTGAS_SEED");
        if let Some(e) = env {
            cmd.env("FASTGAS_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        let v: serde_json::Value = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        v["seed"].as_u64().unwrap()
    };
    assert_eq!(run(None, None), 0);
    assert_eq!(run(Some("42"), None), 42);
    assert_eq!(run(Some("42"), Some("7")), 7);
}

#[test]
fn config_file_sits_between_defaults_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write_pool(dir.path(), 120);
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"K": 3, "budget": 9, "seed": 11}"#).unwrap();
    let out = fastgas(&["select", "--config", cfg.to_str().unwrap(), "--input", &pool, "--budget", "6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((v["K"].as_u64(), v["budget"].as_u64(), v["seed"].as_u64()), (Some(3), Some(6), Some(11)));
}

#[test]
fn graph_build_retrieve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pool = write_pool(dir.path(), 150);
    let tests = dir.path().join("tests.jsonl");
    save_embeddings(&generate_synthetic(5, 16, 2, 0.2, 9).unwrap(), &tests, EmbeddingFormat::Jsonl).unwrap();
    let graph = dir.path().join("g.json");
    let sel = dir.path().join("s.json");
    let out = fastgas(&["build-graph", "--input", &pool, "--output", graph.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("N = 150"));
    let out = fastgas(&[
        "select", "--graph", graph.to_str().unwrap(), "--input", &pool, "--K", "3", "--budget", "9",
        "--output", sel.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = fastgas(&[
        "retrieve", "--input", &pool, "--selection", sel.to_str().unwrap(), "--tests", tests.to_str().unwrap(),
        "--m", "3", "--order", "desc",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["order"], "desc");
    let per_test = v["per_test"].as_object().unwrap();
    assert_eq!(per_test.keys().collect::<Vec<_>>(), vec!["syn-0", "syn-1", "syn-2", "syn-3", "syn-4"]);
    assert!(per_test.values().all(|l| l.as_array().unwrap().len() == 3));
}

#[test]
fn paper_pool_graph_has_min_degree_k() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("paper.bin");
    save_embeddings(&generate_synthetic(3000, 768, 10, 0.1, 7).unwrap(), &path, EmbeddingFormat::Binary).unwrap();
    let out = fastgas(&["build-graph", "--input", path.to_str().unwrap(), "--k", "10"]);
    assert!(out.status.success());
    let g: fastgas::GraphFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(g.num_vertices, 3000);
    let mut degree = vec![0usize; 3000];
    for [u, v, _] in &g.edges {
        assert!(u < v);
        degree[*u as usize] += 1;
        degree[*v as usize] += 1;
    }
    assert!(degree.iter().all(|&d| d >= 10));
}

#[test]
fn verify_subcommand_reports_the_bound() {
    let out = fastgas(&["verify", "--instances", "50"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["instances"], 55);
    assert!(v["min_ratio"].as_f64().unwrap() >= v["bound"].as_f64().unwrap());
    assert_eq!(fastgas(&["verify", "--max-n", "30"]).status.code(), Some(2));
}

#[test]
fn bench_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("bench.json");
    let out = fastgas(&[
        "bench", "--sizes", "200,400", "--dim", "8", "--reps", "1", "--budget", "20", "--K", "4",
        "--output", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["runs"].as_array().unwrap().len(), 10);
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    assert!(csv.starts_with("n,method,stage,ms"));
}
