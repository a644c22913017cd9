use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{split_sentences, tokenize, SentenceSpan, Span, Token};

/// Scalar feature value attached to an annotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FeatureValue {
    Str(String),
    Num(f64),
}

impl FeatureValue {
    /// Equality used by rule constraints: same-variant values compare
    /// directly, mixed values compare through their textual form.
    pub fn matches(&self, other: &FeatureValue) -> bool {
        match (self, other) {
            (FeatureValue::Str(a), FeatureValue::Str(b)) => a == b,
            (FeatureValue::Num(a), FeatureValue::Num(b)) => a == b,
            _ => self.to_string() == other.to_string(),
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            FeatureValue::Str(s) => Some(s),
            FeatureValue::Num(_) => None,
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Str(s) => f.write_str(s),
            FeatureValue::Num(n) => write!(f, "{n}"),
        }
    }
}

impl From<&str> for FeatureValue {
    fn from(s: &str) -> Self {
        FeatureValue::Str(s.to_string())
    }
}

impl From<String> for FeatureValue {
    fn from(s: String) -> Self {
        FeatureValue::Str(s)
    }
}

impl From<f64> for FeatureValue {
    fn from(n: f64) -> Self {
        FeatureValue::Num(n)
    }
}

pub type Features = BTreeMap<String, FeatureValue>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub id: u64,
    pub type_name: String,
    pub span: Span,
    pub features: Features,
}

impl Annotation {
    pub fn feature(&self, name: &str) -> Option<&FeatureValue> {
        self.features.get(name)
    }

    pub fn feature_str(&self, name: &str) -> Option<&str> {
        self.features.get(name).and_then(FeatureValue::as_str)
    }
}

/// Text plus its tokens, sentences and annotations.
///
/// Tokens and sentences are computed once at construction. Annotations are
/// added through [`AnnotatedDocument::merge`], which snaps spans to token
/// boundaries and assigns fresh ids.
#[derive(Debug, Clone)]
pub struct AnnotatedDocument {
    pub doc_id: String,
    pub title: String,
    text: String,
    // byte offset of every char, plus one past the end
    byte_offsets: Vec<usize>,
    tokens: Vec<Token>,
    sentences: Vec<SentenceSpan>,
    annotations: Vec<Annotation>,
    next_id: u64,
}

impl AnnotatedDocument {
    pub fn new(doc_id: impl Into<String>, title: impl Into<String>, text: impl Into<String>) -> Self {
        let text = text.into();
        let tokens = tokenize(&text);
        let sentences = split_sentences(&text, &tokens);
        let mut byte_offsets: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        byte_offsets.push(text.len());
        AnnotatedDocument {
            doc_id: doc_id.into(),
            title: title.into(),
            text,
            byte_offsets,
            tokens,
            sentences,
            annotations: Vec::new(),
            next_id: 1,
        }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    /// Length in characters.
    pub fn char_len(&self) -> usize {
        self.byte_offsets.len() - 1
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn sentences(&self) -> &[SentenceSpan] {
        &self.sentences
    }

    pub fn annotations(&self) -> &[Annotation] {
        &self.annotations
    }

    pub fn annotations_of<'a>(&'a self, type_name: &'a str) -> impl Iterator<Item = &'a Annotation> + 'a {
        self.annotations.iter().filter(move |a| a.type_name == type_name)
    }

    /// Annotations of `type_name` lying inside `span`, ordered by start.
    pub fn annotations_within<'a>(&'a self, type_name: &'a str, span: Span) -> Vec<&'a Annotation> {
        let mut found: Vec<&Annotation> = self.annotations_of(type_name).filter(|a| span.contains(a.span)).collect();
        found.sort_by_key(|a| (a.span.start, a.span.end, a.id));
        found
    }

    /// The id the next merged annotation will receive.
    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    pub fn slice(&self, span: Span) -> &str {
        &self.text[self.byte_offsets[span.start]..self.byte_offsets[span.end]]
    }

    /// Indices of the tokens lying inside `span`.
    pub fn token_range(&self, span: Span) -> Range<usize> {
        let first = self.tokens.partition_point(|t| t.span.start < span.start);
        let last = self.tokens.partition_point(|t| t.span.end <= span.end);
        first..last.max(first)
    }

    /// Character span covering tokens `range`.
    pub fn tokens_span(&self, range: Range<usize>) -> Span {
        assert!(range.start < range.end, "empty token range");
        Span::new(self.tokens[range.start].span.start, self.tokens[range.end - 1].span.end)
    }

    /// Widens `span` outward to token boundaries. `None` if no token overlaps it.
    pub fn snap(&self, span: Span) -> Option<Span> {
        let first = self.tokens.partition_point(|t| t.span.end <= span.start);
        let last = self.tokens.partition_point(|t| t.span.start < span.end);
        if first >= last {
            return None;
        }
        Some(Span::new(self.tokens[first].span.start, self.tokens[last - 1].span.end))
    }

    /// Adds annotations, snapping spans to token boundaries and numbering
    /// them from [`next_id`](Self::next_id). Annotations that overlap no token
    /// are dropped. Returns the ids assigned.
    pub fn merge(&mut self, annotations: impl IntoIterator<Item = Annotation>) -> Vec<u64> {
        let mut ids = Vec::new();
        for mut ann in annotations {
            let Some(span) = self.snap(ann.span) else {
                log::warn!(
                    "{}: dropping {} annotation at {}..{}, no token overlap",
                    self.doc_id,
                    ann.type_name,
                    ann.span.start,
                    ann.span.end
                );
                continue;
            };
            ann.span = span;
            ann.id = self.next_id;
            self.next_id += 1;
            ids.push(ann.id);
            self.annotations.push(ann);
        }
        ids
    }

    /// The sentence containing character offset `pos`.
    pub fn sentence_at(&self, pos: usize) -> Option<&SentenceSpan> {
        let idx = self.sentences.partition_point(|s| s.span.end <= pos);
        self.sentences.get(idx).filter(|s| s.span.start <= pos)
    }
}
