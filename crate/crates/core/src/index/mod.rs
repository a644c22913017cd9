//! In-process requirement index with concept and type facets and BM25
//! ranking.

mod bm25;
mod snapshot;

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{normalize, tokenize, TokenKind};

pub use bm25::{bm25_term_score, Bm25Params};
pub use snapshot::{load_snapshot, save_snapshot, Snapshot, FORMAT_VERSION};

pub const REQUIREMENT_FACET: &str = "requirement";
/// Facet literal of the original French tooling, kept for compatibility.
pub const EXIGENCE_FACET: &str = "exigence";

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("no record with id {0:?}")]
    NotFound(String),
    #[error("snapshot format version {found}, expected {expected}")]
    UnsupportedVersion { found: u32, expected: u32 },
    #[error("snapshot is inconsistent: {0}")]
    Corrupt(String),
    #[error("snapshot I/O on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("snapshot JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// A stored record: one sentence paired with one of its concepts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedSentence {
    pub id: String,
    #[serde(rename = "type")]
    pub type_facet: String,
    pub title: String,
    pub sentence: String,
    pub concept: String,
    pub date: NaiveDateTime,
}

/// A sentence offered to the index with the concepts and modal markers found
/// in it. Concepts are listed once per occurrence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexCandidate {
    pub title: String,
    pub sentence: String,
    pub concepts: Vec<String>,
    pub markers: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Error)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    #[error("empty sentence")]
    EmptySentence,
    #[error("no concept")]
    NoConcept,
    #[error("no modal verb")]
    NoMarker,
    #[error("duplicate of an indexed record")]
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexOptions {
    pub type_facet: String,
    /// Skip records repeating the (sentence, concept, title) of a stored one.
    pub dedup: bool,
    pub bm25: Bm25Params,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions { type_facet: REQUIREMENT_FACET.into(), dedup: true, bm25: Bm25Params::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Posting {
    pub record: usize,
    pub tf: u32,
}

/// Record terms: word and number norms of the sentence followed by those of
/// the concept, so a concept query always matches its own records.
pub(crate) fn terms(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| matches!(t.kind, TokenKind::Word | TokenKind::Number))
        .map(|t| t.norm)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RequirementIndex {
    options: IndexOptions,
    records: Vec<IndexedSentence>,
    lengths: Vec<u32>,
    postings: BTreeMap<String, Vec<Posting>>,
    by_concept: BTreeMap<String, Vec<usize>>,
    by_type: BTreeMap<String, Vec<usize>>,
    total_length: u64,
}

impl Default for RequirementIndex {
    fn default() -> Self {
        RequirementIndex::new(IndexOptions::default())
    }
}

impl RequirementIndex {
    pub fn new(options: IndexOptions) -> Self {
        RequirementIndex {
            options,
            records: Vec::new(),
            lengths: Vec::new(),
            postings: BTreeMap::new(),
            by_concept: BTreeMap::new(),
            by_type: BTreeMap::new(),
            total_length: 0,
        }
    }

    pub fn options(&self) -> &IndexOptions {
        &self.options
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub(crate) fn postings(&self) -> &BTreeMap<String, Vec<Posting>> {
        &self.postings
    }

    pub(crate) fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    fn average_length(&self) -> f64 {
        if self.records.is_empty() {
            0.0
        } else {
            self.total_length as f64 / self.records.len() as f64
        }
    }

    fn next_id(&self) -> String {
        format!("r{:06}", self.records.len() + 1)
    }

    fn insert(&mut self, record: IndexedSentence) -> String {
        let slot = self.records.len();
        let mut tf: BTreeMap<String, u32> = BTreeMap::new();
        let mut length = 0u32;
        for term in terms(&record.sentence).into_iter().chain(terms(&record.concept)) {
            *tf.entry(term).or_default() += 1;
            length += 1;
        }
        for (term, count) in tf {
            self.postings.entry(term).or_default().push(Posting { record: slot, tf: count });
        }
        self.by_concept.entry(normalize(&record.concept)).or_default().push(slot);
        self.by_type.entry(record.type_facet.clone()).or_default().push(slot);
        self.lengths.push(length);
        self.total_length += u64::from(length);
        let id = record.id.clone();
        self.records.push(record);
        id
    }

    /// Indexes one record per concept occurrence. Returns one outcome per
    /// occurrence, or a single rejection when the sentence has no concept.
    pub fn index_sentence(
        &mut self,
        candidate: &IndexCandidate,
        date: NaiveDateTime,
    ) -> Vec<Result<String, Rejection>> {
        let reject = |r: Rejection| vec![Err(r); candidate.concepts.len().max(1)];
        if candidate.sentence.trim().is_empty() {
            return reject(Rejection::EmptySentence);
        }
        if candidate.concepts.is_empty() {
            return reject(Rejection::NoConcept);
        }
        if candidate.markers.is_empty() {
            return reject(Rejection::NoMarker);
        }
        let mut out = Vec::with_capacity(candidate.concepts.len());
        for concept in &candidate.concepts {
            if concept.trim().is_empty() {
                out.push(Err(Rejection::NoConcept));
                continue;
            }
            if self.options.dedup && self.contains(&candidate.sentence, concept, &candidate.title) {
                log::info!("skipping repeated record for concept {concept:?}");
                out.push(Err(Rejection::Duplicate));
                continue;
            }
            let record = IndexedSentence {
                id: self.next_id(),
                type_facet: self.options.type_facet.clone(),
                title: candidate.title.clone(),
                sentence: candidate.sentence.clone(),
                concept: concept.clone(),
                date,
            };
            out.push(Ok(self.insert(record)));
        }
        out
    }

    fn contains(&self, sentence: &str, concept: &str, title: &str) -> bool {
        self.by_concept
            .get(&normalize(concept))
            .into_iter()
            .flatten()
            .map(|&slot| &self.records[slot])
            .any(|r| r.sentence == sentence && r.concept == concept && r.title == title)
    }

    /// Every record, by id.
    pub fn search_all(&self) -> Vec<&IndexedSentence> {
        // ids are assigned in insertion order and zero-padded
        self.records.iter().collect()
    }

    pub fn get_by_id(&self, id: &str) -> Result<&IndexedSentence, IndexError> {
        let slot = id
            .strip_prefix('r')
            .filter(|d| d.len() >= 6 && d.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|d| d.parse::<usize>().ok())
            .and_then(|n| n.checked_sub(1))
            .filter(|&s| s < self.records.len() && self.records[s].id == id);
        slot.map(|s| &self.records[s]).ok_or_else(|| IndexError::NotFound(id.to_string()))
    }

    /// Records of `concept`, ranked by BM25 against `query` (the concept
    /// itself when absent). Records scoring zero are left out; ties keep id
    /// order.
    pub fn search_by_concept(&self, concept: &str, query: Option<&str>) -> Vec<(f64, &IndexedSentence)> {
        let Some(slots) = self.by_concept.get(&normalize(concept)) else {
            return Vec::new();
        };
        let mut query_terms = terms(query.unwrap_or(concept));
        query_terms.sort();
        query_terms.dedup();

        let n = self.records.len();
        let avg = self.average_length();
        let mut scores: BTreeMap<usize, f64> = slots.iter().map(|&s| (s, 0.0)).collect();
        for term in &query_terms {
            let Some(postings) = self.postings.get(term) else { continue };
            for p in postings {
                if let Some(score) = scores.get_mut(&p.record) {
                    *score += bm25_term_score(&self.options.bm25, p.tf, self.lengths[p.record], avg, n, postings.len());
                }
            }
        }
        let mut ranked: Vec<(f64, &IndexedSentence)> = scores
            .into_iter()
            .filter(|(_, score)| *score > 0.0)
            .map(|(slot, score)| (score, &self.records[slot]))
            .collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.id.cmp(&b.1.id)));
        ranked
    }

    /// Record count per type facet value.
    pub fn type_facets(&self) -> BTreeMap<&str, usize> {
        self.by_type.iter().map(|(k, v)| (k.as_str(), v.len())).collect()
    }

    /// Rebuilds an index from stored records, keeping their ids.
    pub fn from_records(options: IndexOptions, records: Vec<IndexedSentence>) -> Result<Self, IndexError> {
        let mut index = RequirementIndex::new(options);
        for record in records {
            let expected = index.next_id();
            if record.id != expected {
                return Err(IndexError::Corrupt(format!("record id {:?}, expected {expected:?}", record.id)));
            }
            if record.sentence.trim().is_empty() || record.concept.trim().is_empty() {
                return Err(IndexError::Corrupt(format!("record {:?} has an empty field", record.id)));
            }
            index.insert(record);
        }
        Ok(index)
    }
}

/// An index shared between request handlers. Readers take a cheap
/// reference to the current index; [`SharedIndex::replace`] swaps in a
/// rebuilt one.
#[derive(Debug, Default)]
pub struct SharedIndex {
    current: RwLock<Arc<RequirementIndex>>,
}

impl SharedIndex {
    pub fn new(index: RequirementIndex) -> Self {
        SharedIndex { current: RwLock::new(Arc::new(index)) }
    }

    pub fn current(&self) -> Arc<RequirementIndex> {
        Arc::clone(&self.current.read().unwrap_or_else(|e| e.into_inner()))
    }

    pub fn replace(&self, index: RequirementIndex) {
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(index);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date() -> NaiveDateTime {
        "2020-12-28T17:09:49".parse().unwrap()
    }

    fn candidate(sentence: &str, concepts: &[&str], markers: &[&str]) -> IndexCandidate {
        IndexCandidate {
            title: "IEC 60376 ED3".into(),
            sentence: sentence.into(),
            concepts: concepts.iter().map(|s| s.to_string()).collect(),
            markers: markers.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn filter_and_fan_out() {
        let mut index = RequirementIndex::default();
        let out =
            index.index_sentence(&candidate("SF6 and CF4 shall be handled.", &["SF6", "CF4"], &["SHALL"]), date());
        assert_eq!(out, [Ok("r000001".to_string()), Ok("r000002".to_string())]);
        assert_eq!(
            index.index_sentence(&candidate("SF6 is a gas.", &["SF6"], &[]), date()),
            [Err(Rejection::NoMarker)]
        );
        assert_eq!(
            index.index_sentence(&candidate(" ", &["SF6"], &["SHALL"]), date()),
            [Err(Rejection::EmptySentence)]
        );
        assert_eq!(index.index_sentence(&candidate("It shall.", &[], &["SHALL"]), date()), [Err(Rejection::NoConcept)]);
        assert_eq!(index.search_all().len(), 2);
        assert_eq!(index.search_all()[0].type_facet, "requirement");
    }

    #[test]
    fn dedup_is_configurable() {
        let c = candidate("SF6 shall be kept. SF6 again.", &["SF6", "SF6"], &["SHALL"]);
        let mut dedup = RequirementIndex::default();
        let out = dedup.index_sentence(&c, date());
        assert_eq!(out[1], Err(Rejection::Duplicate));
        let mut keep = RequirementIndex::new(IndexOptions { dedup: false, ..Default::default() });
        assert!(keep.index_sentence(&c, date()).iter().all(Result::is_ok));
        assert_eq!(keep.len(), 2);
    }

    #[test]
    fn lookup_by_id_and_concept() {
        let mut index = RequirementIndex::default();
        index.index_sentence(&candidate("SF6 shall be pure.", &["SF6"], &["SHALL"]), date());
        assert_eq!(index.get_by_id("r000001").unwrap().concept, "SF6");
        assert!(matches!(index.get_by_id("r000002"), Err(IndexError::NotFound(_))));
        assert!(matches!(index.get_by_id("x"), Err(IndexError::NotFound(_))));
        assert_eq!(index.search_by_concept("sf6", None).len(), 1);
        assert!(index.search_by_concept("CF4", None).is_empty());
        assert!(index.search_by_concept("SF6", Some("unrelated")).is_empty());
    }
}
