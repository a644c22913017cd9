use serde::{Deserialize, Serialize};

use super::{match_phrases, phrase_key};
use crate::text::{AnnotatedDocument, Span};

pub const DEFAULT_VAGUE_REASON: &str = "ambiguous modifier — Directives conformance risk";

const DEFAULT_TERMS: &[&str] =
    &["certain", "carefully", "deliberate", "specific", "proper", "typically", "mainly", "wherever possible"];

#[derive(Debug, Clone)]
pub struct VagueLexicon {
    entries: Vec<(Vec<String>, (String, String))>,
}

impl Default for VagueLexicon {
    fn default() -> Self {
        VagueLexicon::new(DEFAULT_TERMS.iter().map(|t| (*t, DEFAULT_VAGUE_REASON)))
    }
}

impl VagueLexicon {
    pub fn new<'a>(terms: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let entries = terms
            .into_iter()
            .map(|(term, reason)| (phrase_key(term), (term.to_string(), reason.to_string())))
            .filter(|(k, _)| !k.is_empty())
            .collect();
        VagueLexicon { entries }
    }

    /// One term per line; blank lines and `#` comments are skipped. An
    /// optional reason follows a tab.
    pub fn from_lines(text: &str) -> Self {
        let pairs: Vec<(&str, &str)> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| match l.split_once('\t') {
                Some((t, r)) => (t.trim(), r.trim()),
                None => (l, DEFAULT_VAGUE_REASON),
            })
            .collect();
        VagueLexicon::new(pairs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VagueFlag {
    pub term: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VagueTermReport {
    pub sentence_span: Span,
    pub flagged: Vec<VagueFlag>,
}

/// Flags every occurrence of a configured vague term inside `span`.
pub fn flag_vague_terms(doc: &AnnotatedDocument, span: Span, vague: &VagueLexicon) -> VagueTermReport {
    let tokens = &doc.tokens()[doc.token_range(span)];
    let flagged = match_phrases(tokens, &vague.entries)
        .into_iter()
        .map(|(_, (term, reason))| VagueFlag { term: term.clone(), reason: reason.clone() })
        .collect();
    VagueTermReport { sentence_span: span, flagged }
}
