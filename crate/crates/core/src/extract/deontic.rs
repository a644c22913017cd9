use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{match_phrases, phrase_key, ExtractError};
use crate::lexicon::LOOKUP;
use crate::text::{AnnotatedDocument, SentenceSpan, Span};

/// Statement strength, weakest first. `Ord` follows strength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatementClass {
    Statement,
    Possibility,
    Permission,
    Recommendation,
    ExternalConstraint,
    Requirement,
}

impl StatementClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StatementClass::Statement => "statement",
            StatementClass::Possibility => "possibility",
            StatementClass::Permission => "permission",
            StatementClass::Recommendation => "recommendation",
            StatementClass::ExternalConstraint => "external_constraint",
            StatementClass::Requirement => "requirement",
        }
    }

    /// `requirement` and `external_constraint` (the "must" family).
    pub fn is_requirement_strength(self) -> bool {
        self >= StatementClass::ExternalConstraint
    }
}

impl fmt::Display for StatementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StatementClass {
    type Err = ExtractError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "statement" => StatementClass::Statement,
            "possibility" => StatementClass::Possibility,
            "permission" => StatementClass::Permission,
            "recommendation" => StatementClass::Recommendation,
            "external_constraint" => StatementClass::ExternalConstraint,
            "requirement" => StatementClass::Requirement,
            other => return Err(ExtractError::UnknownClass(other.to_string())),
        })
    }
}

/// Marker phrases mapped to the class they signal.
#[derive(Debug, Clone)]
pub struct DeonticLexicon {
    entries: Vec<(Vec<String>, StatementClass)>,
}

const DEFAULT_MARKERS: &[(&str, StatementClass)] = &[
    ("shall", StatementClass::Requirement),
    ("shall not", StatementClass::Requirement),
    ("guarantee", StatementClass::Requirement),
    ("should", StatementClass::Recommendation),
    ("should not", StatementClass::Recommendation),
    ("may", StatementClass::Permission),
    ("can", StatementClass::Possibility),
    ("cannot", StatementClass::Possibility),
    ("must", StatementClass::ExternalConstraint),
];

impl Default for DeonticLexicon {
    fn default() -> Self {
        DeonticLexicon::new(DEFAULT_MARKERS.iter().map(|&(p, c)| (p, c)))
    }
}

impl DeonticLexicon {
    pub fn new<'a>(entries: impl IntoIterator<Item = (&'a str, StatementClass)>) -> Self {
        let mut lex = DeonticLexicon { entries: Vec::new() };
        for (phrase, class) in entries {
            lex.insert(phrase, class);
        }
        lex
    }

    /// Adds or replaces a marker. Statement-class markers are ignored.
    pub fn insert(&mut self, phrase: &str, class: StatementClass) {
        let key = phrase_key(phrase);
        self.entries.retain(|(k, _)| *k != key);
        if !key.is_empty() && class != StatementClass::Statement {
            self.entries.push((key, class));
        }
    }

    pub fn remove(&mut self, phrase: &str) {
        let key = phrase_key(phrase);
        self.entries.retain(|(k, _)| *k != key);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Reads `phrase,class` rows (with header).
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, ExtractError> {
        #[derive(Deserialize)]
        struct Row {
            phrase: String,
            class: String,
        }
        let mut lex = DeonticLexicon { entries: Vec::new() };
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(|e| ExtractError::Lexicon(e.to_string()))?;
            lex.insert(&row.phrase, row.class.parse()?);
        }
        if lex.is_empty() {
            return Err(ExtractError::Lexicon("deontic lexicon has no markers".into()));
        }
        Ok(lex)
    }
}

/// A deontic marker found in text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marker {
    pub span: Span,
    /// Uppercased marker as it is reported, e.g. `SHALL NOT`.
    pub phrase: String,
    pub class: StatementClass,
    pub negated: bool,
}

/// Markers inside `span`, in text order.
pub fn find_markers(doc: &AnnotatedDocument, span: Span, deontic: &DeonticLexicon) -> Vec<Marker> {
    let range = doc.token_range(span);
    let tokens = &doc.tokens()[range.clone()];
    match_phrases(tokens, &deontic.entries)
        .into_iter()
        .map(|(r, &class)| {
            let words: Vec<&str> = tokens[r.clone()].iter().map(|t| t.norm.as_str()).collect();
            Marker {
                span: doc.tokens_span(range.start + r.start..range.start + r.end),
                phrase: words.join(" ").to_uppercase(),
                class,
                negated: words.contains(&"not") || words.contains(&"cannot"),
            }
        })
        .collect()
}

/// Strongest marker class when the sentence holds at least one concept
/// lookup and at least one marker; `Statement` otherwise.
pub fn classify_sentence(doc: &AnnotatedDocument, sentence: &SentenceSpan, deontic: &DeonticLexicon) -> StatementClass {
    if doc.annotations_within(LOOKUP, sentence.span).is_empty() {
        return StatementClass::Statement;
    }
    find_markers(doc, sentence.span, deontic).iter().map(|m| m.class).max().unwrap_or(StatementClass::Statement)
}
