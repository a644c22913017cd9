//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

#[path = "../../core/tests/support/corpus.rs"]
mod corpus;
#[path = "../../core/tests/support/rsml_gen.rs"]
mod rsml_gen;
#[path = "../../core/tests/support/rule_oracle.rs"]
mod rule_oracle;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use normreq_cli::service::router;
use normreq_core::extract::{
    classify_sentence, convert_unit, extract_structured, flag_vague_terms, parse_requirement_table, parse_table_cell,
    read_table_csv, Comparator, StatementClass, TableRow, Unit, VagueLexicon,
};
use normreq_core::formal::{
    build_rsml, emit_contracts, emit_rsml, parse_rsml, BuildConfig, ContractOptions, TableContext,
};
use normreq_core::index::{IndexCandidate, RequirementIndex, SharedIndex};
use normreq_core::pipeline::{
    annotate_document, index_document, run_pipeline, FixedClock, PipelineConfig, Resources, RSML_FILE,
};
use normreq_core::rules::run_phase_matches;
use proptest::prelude::*;
use proptest::test_runner::{RngAlgorithm, TestRng, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng as _, SeedableRng};
use rust_decimal::Decimal;
use serde_json::Value;
use tower::ServiceExt;

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn clock() -> FixedClock {
    FixedClock("2020-12-28T17:09:49.882388".parse().unwrap())
}

fn bundled_config() -> PipelineConfig {
    PipelineConfig::load(&corpus::data_dir().join("pipeline.json")).unwrap()
}

fn resources(keep_duplicates: bool) -> Resources {
    let mut config = bundled_config();
    config.compat.keep_duplicates = keep_duplicates;
    Resources::load(&config).unwrap()
}

fn fragment(uri: &str) -> &str {
    uri.rsplit('#').next().unwrap_or(uri)
}

fn golden_corpus() -> Outcome {
    let res = resources(false);
    let expected: &[(&str, &str, &[bool])] = &[
        ("ex1", "corpus/ex1_responsibility.txt", &[true]),
        ("ex2", "corpus/ex2_storage.txt", &[false, true]),
        ("ex3", "corpus/ex3_complementary_gases.txt", &[false, false, false, false]),
        ("env", "corpus/env_impact.txt", &[false, true]),
    ];
    for (id, path, want) in expected {
        let doc = annotate_document(id, "IEC 60376 ED3", &corpus::read(path), &res);
        let got: Vec<bool> = doc
            .sentences()
            .iter()
            .map(|s| classify_sentence(&doc, s, &res.deontic).is_requirement_strength())
            .collect();
        ensure!(got == *want, "{id}: requirement strength {got:?}, expected {want:?}");
    }

    let doc = annotate_document("ex1", "IEC 60376 ED3", &corpus::read("corpus/ex1_responsibility.txt"), &res);
    let row = extract_structured(&doc, &doc.sentences()[0], &res.deontic, &res.lexicon).map_err(|e| e.to_string())?;
    ensure!(row.classification == StatementClass::Requirement, "Ex1 class {}", row.classification);
    let distinguish = ["GUARANTEE", "in conformance with (international regulation and local regulation)"];
    ensure!(row.distinguish_features == distinguish, "distinguish {:?}", row.distinguish_features);
    let concepts: Vec<&str> = row.concepts.iter().map(|c| fragment(&c.uri)).collect();
    ensure!(concepts == ["supplier", "gas", "gas_mixture", "toxicity"], "concepts {concepts:?}");
    Ok(())
}

fn table_extraction() -> Outcome {
    let lex = corpus::lexicon();
    let rows = read_table_csv(corpus::read("tables/cf4_in_sf6_mixtures.csv").as_bytes()).map_err(|e| e.to_string())?;
    let reqs = parse_requirement_table(&rows, "CF4 to be used in SF6 mixtures", &lex).map_err(|e| e.to_string())?;
    let want = [
        ("CF", Comparator::GT, "99.7", Unit::PercentVolume),
        ("O", Comparator::LT, "500", Unit::MicrolitrePerLitre),
        ("N", Comparator::LT, "1500", Unit::MicrolitrePerLitre),
        ("H", Comparator::LT, "200", Unit::MicrolitrePerLitre),
        ("Mineral oil", Comparator::LT, "10", Unit::MgPerKg),
        ("Total acidity", Comparator::LT, "7", Unit::MicrolitrePerLitre),
    ];
    ensure!(reqs.len() == want.len(), "{} records", reqs.len());
    for (req, (prefix, cmp, value, unit)) in reqs.iter().zip(want) {
        let value: Decimal = value.parse().unwrap();
        ensure!(
            req.substance.surface.starts_with(prefix)
                && req.comparator == cmp
                && req.quantity.value == value
                && req.quantity.unit == unit,
            "unexpected record {req:?}"
        );
    }
    for (k, row) in rows.iter().enumerate() {
        let Ok(cell) = parse_table_cell(&row.constraint, k + 1) else { continue };
        if let Some(alt) = cell.alt_quantity {
            let back = convert_unit(alt, cell.quantity.unit).map_err(|e| e.to_string())?;
            ensure!(back.value == cell.quantity.value, "parenthetical on row {} differs", k + 1);
        }
    }
    Ok(())
}

const EX1_LISTING: &str = "\
Environment:
- Toxicity of the gas is in 0 and 100 .
- Toxicity of the gas mixture is in 0 and 100 .
- Responsibility of the supplier is in 0 and 1 .
SUPPLIER:
[1]\"The supplier provides the gas .\"
[2]\"The supplier provides the gas mixture .\"
RESPONSIBILITY OF THE SUPPLIER:
[3] When the toxicity of the gas is equal to 0 then immediately the responsibility of the supplier shall be equal to 0 .
INTERNATIONAL REGULATION:
[4] According to international regulation the toxicity of the gas shall be equal to 0 [Percentage] .
[5] According to international regulation the toxicity of the gas mixture shall be equal to 0 [Percentage] .
LOCAL REGULATION:
[6] According to local regulation the toxicity of the gas shall be equal to 0 [Percentage] .
[7] According to local regulation the toxicity of the gas mixture shall be equal to 0 [Percentage] .
";

fn rsml_golden() -> Outcome {
    let lex = corpus::lexicon();
    let doc = corpus::annotated("ex1", &corpus::read("corpus/ex1_responsibility.txt"), &lex);
    let program =
        build_rsml(&[], &corpus::atoms(&doc, &lex), &lex, &BuildConfig::default()).map_err(|e| e.to_string())?;
    let text = emit_rsml(&program);
    ensure!(text == EX1_LISTING, "listing differs:\n{text}");

    let files = emit_contracts(&program, &ContractOptions::default());
    let invariant = "toxicity_of_gas_is_in_0_and_100: toxicity_of_gas > 0 and toxicity_of_gas < 100";
    ensure!(files.values().any(|f| f.lines().any(|l| l.trim() == invariant)), "invariant line missing");

    // purity grade of SF6 used in mixtures
    let rows = [TableRow { substance: "SF6".into(), constraint: "> 99,7 % volume".into() }];
    let reqs = parse_requirement_table(&rows, "SF6 for mixtures", &lex).map_err(|e| e.to_string())?;
    let config = BuildConfig {
        tables: vec![TableContext {
            context: "SF6 for mixtures".into(),
            state: "mixture".into(),
            state_substance: None,
        }],
        ..Default::default()
    };
    let program = build_rsml(&reqs, &[], &lex, &config).map_err(|e| e.to_string())?;
    let files = emit_contracts(&program, &ContractOptions::default());
    let class = files.get("sfsix_mixture_requirements.e").ok_or("no SFSIX_MIXTURE contract")?;
    for line in [
        "when_sfsix_is_equal_to_mixture: (sfsix = mixture)",
        "check_sfsix_shall_be_greater_than_99_7_percentage: (sfsix > 99.7)",
    ] {
        ensure!(class.lines().any(|l| l.trim() == line), "missing {line:?} in\n{class}");
    }
    Ok(())
}

fn rsml_round_trip() -> Outcome {
    let config = ProptestConfig { cases: 500, failure_persistence: None, ..ProptestConfig::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner
        .run(&rsml_gen::program(), |program| {
            let text = emit_rsml(&program);
            let parsed = parse_rsml(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
            prop_assert_eq!(parsed, program);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn appelt_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0xa99e17);
    for case in 0..1000 {
        let doc = rule_oracle::random_document(&mut rng);
        let phase = rule_oracle::random_phase(&mut rng);
        let got: Vec<(usize, usize, usize)> =
            run_phase_matches(&phase, &doc).iter().map(|m| (m.rule_index, m.tokens.start, m.tokens.end)).collect();
        let want = rule_oracle::oracle_appelt(&phase, &doc);
        ensure!(got == want, "case {case}: engine {got:?}, oracle {want:?}");
    }
    Ok(())
}

fn indexing_filter() -> Outcome {
    let res = resources(true);
    let concepts = ["SF6", "CF4", "gas mixture", "the supplier", "mineral oil", "nitrogen"];
    let plain = ["the cylinder", "each valve", "the operator", "this device"];
    let verbs = ["shall", "must", "should", "may", "can", "shall not"];
    let other = ["is", "will", "has to", "remains"];
    let mut rng = StdRng::seed_from_u64(6);
    let mut index = RequirementIndex::new(normreq_core::index::IndexOptions { dedup: false, ..Default::default() });
    for i in 0..1000 {
        let (has_concept, has_verb) = (rng.gen_bool(0.5), rng.gen_bool(0.5));
        let subject =
            if has_concept { concepts[rng.gen_range(0..concepts.len())] } else { plain[rng.gen_range(0..plain.len())] };
        let verb = if has_verb { verbs[rng.gen_range(0..verbs.len())] } else { other[rng.gen_range(0..other.len())] };
        let text = format!("Before delivery {subject} {verb} be checked at station {i}.");
        let doc = annotate_document("syn", "synthetic", &text, &res);
        let (accepted, _) = index_document(&doc, &res, &mut index, &clock());
        let expected = has_concept && has_verb;
        ensure!((accepted > 0) == expected, "{text:?}: accepted {accepted}, expected indexed = {expected}");
    }
    Ok(())
}

async fn query_reproduction() -> Outcome {
    let res = resources(true);
    let mut index = RequirementIndex::new(normreq_core::index::IndexOptions { dedup: false, ..Default::default() });
    let doc = annotate_document("queries", "IEC 60376 ED3", &corpus::read("sf6_query_sentences.txt"), &res);
    index_document(&doc, &res, &mut index, &clock());

    let app = router(Arc::new(SharedIndex::new(index)));
    let response = app
        .oneshot(Request::get("/search?concept=SF6").body(Body::empty()).unwrap())
        .await
        .map_err(|e| e.to_string())?;
    ensure!(response.status() == StatusCode::OK, "status {}", response.status());
    let bytes = response.into_body().collect().await.map_err(|e| e.to_string())?.to_bytes();
    let hits: Vec<Value> = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
    ensure!(hits.len() == 4, "{} hits", hits.len());
    for hit in &hits {
        ensure!(hit["score"].as_f64().is_some_and(|s| s > 0.0), "non-positive score in {hit}");
        for field in ["type", "title", "sentence", "concept", "date"] {
            ensure!(hit.get(field).is_some_and(|v| v.is_string()), "field {field} missing in {hit}");
        }
        ensure!(hit["concept"] == "SF6", "concept {}", hit["concept"]);
    }

    let candidate = |s: &str| IndexCandidate {
        title: "t".into(),
        sentence: s.into(),
        concepts: vec!["SF6".into()],
        markers: vec!["SHALL".into()],
    };
    let mut pair = RequirementIndex::default();
    pair.index_sentence(&candidate("the purity of SF6 gas shall be checked by the supplier"), clock().0);
    pair.index_sentence(&candidate("the purity of SF6 gas shall be checked by the SF6 supplier"), clock().0);
    let ranked = pair.search_by_concept("SF6", Some("SF6"));
    ensure!(ranked.len() == 2 && ranked[0].1.id == "r000002", "doubled term not ranked first");
    ensure!(ranked[0].0.total_cmp(&ranked[1].0).is_gt(), "scores {} and {}", ranked[0].0, ranked[1].0);
    Ok(())
}

fn vague_lint() -> Outcome {
    let doc = corpus::annotated("env", &corpus::read("corpus/env_impact.txt"), &corpus::lexicon());
    let vague = VagueLexicon::default();
    let mut terms: Vec<String> =
        doc.sentences().iter().flat_map(|s| flag_vague_terms(&doc, s.span, &vague).flagged).map(|f| f.term).collect();
    terms.sort();
    ensure!(terms == ["carefully", "certain", "deliberate"], "flags {terms:?}");
    Ok(())
}

fn unit_conversions() -> Outcome {
    let mut rng = StdRng::seed_from_u64(9);
    let pairs = [
        (Unit::MicrolitrePerLitre, Unit::Ppmv),
        (Unit::MgPerKg, Unit::Ppmw),
        (Unit::PercentVolume, Unit::Ppmv),
        (Unit::PercentVolume, Unit::MicrolitrePerLitre),
    ];
    for _ in 0..2000 {
        let value = Decimal::new(rng.gen_range(1..10_000_000_000i64), rng.gen_range(0..8));
        for (a, b) in pairs {
            let q = normreq_core::extract::Quantity::new(value, a);
            let there = convert_unit(q, b).map_err(|e| e.to_string())?;
            let back = convert_unit(there, a).map_err(|e| e.to_string())?;
            ensure!(back.value == value, "{q} -> {there} -> {back}");
            let scale = if a == Unit::PercentVolume { Decimal::from(10_000) } else { Decimal::ONE };
            ensure!(there.value == value * scale, "{q} -> {there}");
        }
    }
    Ok(())
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(dir).unwrap().display().to_string(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut config = bundled_config();
        config.output_dir = dir.path().to_path_buf();
        config.index_path = dir.path().join("index.json");
        run_pipeline(&config, &clock()).map_err(|e| e.to_string())?;
        runs.push(tree(dir.path()));
    }
    let (a, b) = (&runs[0], &runs[1]);
    ensure!(a.keys().any(|k| k.ends_with(".xml")), "no XML written");
    ensure!(a.contains_key(RSML_FILE), "no RSML written");
    ensure!(a.keys().any(|k| k.ends_with(".e")), "no contracts written");
    ensure!(a == b, "artifacts differ between runs");
    Ok(())
}

#[tokio::test]
async fn acceptance() {
    let results: Vec<(&str, Outcome)> = vec![
        ("1 golden corpus reproduction", golden_corpus()),
        ("2 table extraction", table_extraction()),
        ("3 RSML and contract golden output", rsml_golden()),
        ("4 RSML round trip", rsml_round_trip()),
        ("5 appelt oracle", appelt_oracle()),
        ("6 indexing filter", indexing_filter()),
        ("7 query reproduction", query_reproduction().await),
        ("8 vague-term lint", vague_lint()),
        ("9 unit conversions", unit_conversions()),
        ("10 determinism", determinism()),
    ];
    // written to the process stdout so the lines survive output capture
    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for (name, outcome) in &results {
        let _ = match outcome {
            Ok(()) => writeln!(out, "PASS {name}"),
            Err(why) => {
                failed += 1;
                writeln!(out, "FAIL {name}: {why}")
            }
        };
    }
    assert_eq!(failed, 0, "{failed} acceptance criteria failed");
}
