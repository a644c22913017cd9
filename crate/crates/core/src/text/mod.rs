//! Tokens, sentences and the annotation store shared by every pipeline stage.
//!
//! All offsets are counted in Unicode scalar values, not bytes: standards text
//! is full of `µ`, `°` and subscript digits.

mod document;
mod sentence;
mod tokenize;
mod xml;

use serde::{Deserialize, Serialize};

pub use document::{AnnotatedDocument, Annotation, FeatureValue, Features};
pub use sentence::{split_sentences, SentenceSpan, SentenceSplitter, DEFAULT_ABBREVIATIONS};
pub use tokenize::{fold_subscripts, normalize, tokenize, Token, TokenKind};
pub use xml::export_annotations_xml;

/// Half-open character range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end, "span start {start} > end {end}");
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, other: Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}
