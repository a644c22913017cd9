use chrono::NaiveDateTime;
use normreq_core::index::{
    load_snapshot, save_snapshot, IndexCandidate, IndexOptions, RequirementIndex, Snapshot, FORMAT_VERSION,
};
use proptest::prelude::*;

fn date() -> NaiveDateTime {
    "2020-12-28T17:09:49.882388".parse().unwrap()
}

fn candidate(sentence: &str, concepts: &[&str]) -> IndexCandidate {
    IndexCandidate {
        title: "T".into(),
        sentence: sentence.into(),
        concepts: concepts.iter().map(|s| s.to_string()).collect(),
        markers: vec!["SHALL".into()],
    }
}

/// Textbook BM25 evaluated from raw counts, independent of the index.
fn reference_score(query: &[&str], doc: &[&str], corpus: &[Vec<&str>]) -> f64 {
    let (k1, b) = (1.2, 0.75);
    let n = corpus.len() as f64;
    let avg = corpus.iter().map(Vec::len).sum::<usize>() as f64 / n;
    query
        .iter()
        .map(|q| {
            let tf = doc.iter().filter(|t| *t == q).count() as f64;
            let df = corpus.iter().filter(|d| d.contains(q)).count() as f64;
            let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
            idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * doc.len() as f64 / avg))
        })
        .sum()
}

#[test]
fn scores_match_the_formula() {
    let sentences = ["gas shall be dry", "gas gas shall be pure", "oil shall be clean and dry"];
    let mut index = RequirementIndex::default();
    for s in sentences {
        index.index_sentence(&candidate(s, &["gas"]), date());
    }
    // stored terms are the sentence words followed by the concept words
    let corpus: Vec<Vec<&str>> = sentences.iter().map(|s| s.split(' ').chain(["gas"]).collect()).collect();
    for (score, record) in index.search_by_concept("gas", Some("dry gas")) {
        let slot = sentences.iter().position(|s| *s == record.sentence).unwrap();
        let want = reference_score(&["dry", "gas"], &corpus[slot], &corpus);
        assert!((score - want).abs() < 1e-12, "{score} vs {want}");
    }
}

#[test]
fn doubled_term_scores_higher() {
    let mut index = RequirementIndex::default();
    index.index_sentence(&candidate("the purity of SF6 shall be checked by the supplier", &["SF6"]), date());
    index.index_sentence(&candidate("the purity of SF6 shall be checked by the SF6 supplier", &["SF6"]), date());
    let ranked = index.search_by_concept("SF6", None);
    assert_eq!(ranked.len(), 2);
    assert_eq!(ranked[0].1.id, "r000002");
    assert!(ranked[0].0 > ranked[1].0 && ranked[1].0 > 0.0);
}

#[test]
fn snapshot_rejects_other_versions_and_tampering() {
    let mut index = RequirementIndex::default();
    index.index_sentence(&candidate("SF6 shall be dry", &["SF6"]), date());
    let mut snapshot = Snapshot::of(&index);
    snapshot.format_version = FORMAT_VERSION + 1;
    assert!(snapshot.into_index().is_err());
    let mut snapshot = Snapshot::of(&index);
    snapshot.postings.clear();
    assert!(snapshot.into_index().is_err());
}

const VOCAB: &[&str] = &["gas", "sf6", "shall", "be", "dry", "pure", "oil", "mixture", "cf4", "supplier"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn persistence_round_trip(
        sentences in prop::collection::vec(
            (prop::collection::vec(prop::sample::select(VOCAB), 1..8), prop::sample::select(&VOCAB[..3])),
            0..12,
        ),
        query in prop::collection::vec(prop::sample::select(VOCAB), 0..3),
    ) {
        let mut index = RequirementIndex::new(IndexOptions { dedup: false, ..Default::default() });
        for (words, concept) in &sentences {
            index.index_sentence(&candidate(&words.join(" "), &[concept]), date());
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("index.json");
        save_snapshot(&index, &path).unwrap();
        let loaded = load_snapshot(&path).unwrap();
        prop_assert_eq!(loaded.search_all(), index.search_all());
        let q = query.join(" ");
        let q = (!q.is_empty()).then_some(q.as_str());
        for concept in &VOCAB[..3] {
            let a: Vec<_> = index.search_by_concept(concept, q).into_iter().map(|(s, r)| (s, r.id.clone())).collect();
            let b: Vec<_> = loaded.search_by_concept(concept, q).into_iter().map(|(s, r)| (s, r.id.clone())).collect();
            prop_assert!(a.iter().all(|(s, _)| *s > 0.0));
            prop_assert_eq!(a, b);
        }
        for record in index.search_all() {
            prop_assert_eq!(loaded.get_by_id(&record.id).unwrap(), record);
        }
    }
}
