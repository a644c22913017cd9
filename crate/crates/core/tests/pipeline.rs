#[path = "support/corpus.rs"]
mod corpus;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use normreq_core::index::load_snapshot;
use normreq_core::pipeline::{run_pipeline, FixedClock, PipelineConfig, PipelineError, RSML_FILE};

fn clock() -> FixedClock {
    FixedClock("2020-12-28T17:09:49".parse().unwrap())
}

fn bundled(out: &Path) -> PipelineConfig {
    let mut config = PipelineConfig::load(&corpus::data_dir().join("pipeline.json")).unwrap();
    config.output_dir = out.to_path_buf();
    config.index_path = out.join("index.json");
    config
}

fn artifacts(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    out
}

#[test]
fn bundled_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_pipeline(&bundled(dir.path()), &clock()).unwrap();
    let c = &report.counts;
    assert_eq!(c.documents, 4);
    assert_eq!(c.sentences, 9);
    assert_eq!(c.requirement_sentences, 3);
    assert_eq!(c.table_rows, 8);
    assert_eq!(c.indexed + c.rejected, c.candidates);
    assert!(c.indexed > 0);
    assert!(report.warnings.iter().any(|w| w.contains("outside its declared range")));
    assert!(!report.warnings.iter().any(|w| w.contains("disagree")), "{:?}", report.warnings);

    let files = artifacts(dir.path());
    for name in ["annotations/ex1.xml", "requirements.json", "tables.json", RSML_FILE, "report.json", "index.json"] {
        assert!(files.contains_key(name), "missing {name}");
    }
    assert!(files.contains_key("contracts/domain_knowledge.e"));
    assert!(files.contains_key("contracts/cffour_mixture_requirements.e"));
    let xml = String::from_utf8(files["annotations/ex1.xml"].clone()).unwrap();
    assert!(xml.contains("type=\"matchOntology\""));
    assert!(xml.contains("type=\"RequirementSentence\""));

    let index = load_snapshot(&dir.path().join("index.json")).unwrap();
    assert_eq!(index.len(), c.indexed);
    assert!(index.search_all().iter().all(|r| r.type_facet == "requirement"));
}

#[test]
fn runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_pipeline(&bundled(a.path()), &clock()).unwrap();
    run_pipeline(&bundled(b.path()), &clock()).unwrap();
    assert_eq!(artifacts(a.path()), artifacts(b.path()));
}

#[test]
fn empty_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = bundled(dir.path());
    config.documents.clear();
    config.tables.clear();
    let report = run_pipeline(&config, &clock()).unwrap();
    assert_eq!(report.counts, Default::default());
    assert_eq!(fs::read_to_string(dir.path().join(RSML_FILE)).unwrap(), "Environment:\n");
    assert!(load_snapshot(&dir.path().join("index.json")).unwrap().is_empty());
}

#[test]
fn rule_syntax_error_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("bad.jape");
    fs::write(&rules, "Phase: P\nInput: Token\nRule: R\n({Token.norm ==}):m\n-->\n:m.X = {}\n").unwrap();
    let mut config = bundled(&dir.path().join("out"));
    config.rules = vec![rules];
    match run_pipeline(&config, &clock()) {
        Err(PipelineError::Config(msg)) => assert!(msg.contains("line 4"), "{msg}"),
        other => panic!("expected a configuration error, got {other:?}"),
    }
}

#[test]
fn missing_input_and_duplicate_context() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = bundled(dir.path());
    config.documents[0].path = dir.path().join("absent.txt");
    assert!(matches!(run_pipeline(&config, &clock()), Err(PipelineError::Config(_))));

    let mut config = bundled(dir.path());
    let copy = config.tables[0].clone();
    config.tables.push(copy);
    assert!(matches!(config.validate(), Err(PipelineError::Config(_))));
}

#[test]
fn relative_paths_follow_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.csv"), "uri,class,lang,label,preferred,parent_uri\nx:a,t,en,a,true,\n").unwrap();
    fs::write(
        dir.path().join("c.json"),
        r#"{"glossary": "g.csv", "output_dir": "o", "index_path": "o/i.json", "compat": {"exigence_facet": true}}"#,
    )
    .unwrap();
    let config = PipelineConfig::load(&dir.path().join("c.json")).unwrap();
    assert_eq!(config.glossary, dir.path().join("g.csv"));
    assert!(config.compat.exigence_facet);
    assert!(PipelineConfig::from_json(r#"{"glossary": "g", "bogus": 1}"#, dir.path()).is_err());
}
