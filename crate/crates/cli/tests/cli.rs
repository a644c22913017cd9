use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").canonicalize().unwrap()
}

fn normreq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normreq")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// The bundled configuration with outputs redirected into `dir`.
fn config_in(dir: &Path) -> PathBuf {
    let mut config: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(data().join("pipeline.json")).unwrap()).unwrap();
    let data = data();
    let abs = |rel: &serde_json::Value| serde_json::Value::from(data.join(rel.as_str().unwrap()).display().to_string());
    config["glossary"] = abs(&config["glossary"]);
    for rule in config["rules"].as_array_mut().unwrap() {
        *rule = abs(rule);
    }
    for doc in config["documents"].as_array_mut().unwrap() {
        doc["path"] = abs(&doc["path"]);
    }
    for table in config["tables"].as_array_mut().unwrap() {
        table["path"] = abs(&table["path"]);
    }
    config["output_dir"] = "out".into();
    config["index_path"] = "out/index.json".into();
    let path = dir.join("pipeline.json");
    std::fs::write(&path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    path
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(normreq(&[]).status.code(), Some(2));
    assert_eq!(normreq(&["annotate"]).status.code(), Some(2));
    let out = normreq(&["report", "--config", "/nonexistent/pipeline.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn report_and_strict_mode() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_in(dir.path());
    let config = config.to_str().unwrap();
    let out = normreq(&["report", "--config", config]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["counts"]["requirement_sentences"], 3);
    assert!(dir.path().join("out/requirements.rsml").exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning:"));
    // the bundled tables conflict with the strict environment bounds
    assert_eq!(normreq(&["run", "--strict", "--config", config]).status.code(), Some(1));
}

#[test]
fn stage_commands() {
    let dir = tempfile::tempdir().unwrap();
    let config = config_in(dir.path());
    let config = config.to_str().unwrap();
    let ex1 = data().join("corpus/ex1_responsibility.txt");
    let ex1 = ex1.to_str().unwrap();

    let xml = stdout(&normreq(&["annotate", "--config", config, ex1]));
    assert!(xml.starts_with("<?xml") && xml.contains("DeonticMarker"));

    let atoms = normreq(&["extract", "--config", config, ex1]);
    let atoms_path = dir.path().join("atoms.json");
    std::fs::write(&atoms_path, &atoms.stdout).unwrap();
    let parsed: Vec<serde_json::Value> = serde_json::from_slice(&atoms.stdout).unwrap();
    assert_eq!(parsed.len(), 2);

    let csv = data().join("tables/cf4_in_sf6_mixtures.csv");
    let rows = normreq(&["tables", "--context", "mixtures", csv.to_str().unwrap()]);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&rows.stdout).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r["substance"]["uri"].is_null()));

    let rsml = normreq(&["emit-rsml", "--config", config, "--requirements", atoms_path.to_str().unwrap()]);
    assert_eq!(rsml.status.code(), Some(0));
    let rsml_path = dir.path().join("ex1.rsml");
    std::fs::write(&rsml_path, &rsml.stdout).unwrap();
    assert!(stdout(&rsml).contains("[7] According to local regulation"));

    let contracts = dir.path().join("contracts");
    let out = normreq(&["emit-contracts", rsml_path.to_str().unwrap(), "--out", contracts.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(contracts.join("domain_knowledge.e").exists());

    let index = dir.path().join("index.json");
    let out = normreq(&["index", "--config", config, "--out", index.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let hits = normreq(&["query", "--index", index.to_str().unwrap(), "--concept", "SF6"]);
    let hits: Vec<serde_json::Value> = serde_json::from_slice(&hits.stdout).unwrap();
    assert!(!hits.is_empty());
    assert!(hits.windows(2).all(|w| w[0]["score"].as_f64() >= w[1]["score"].as_f64()));
}
