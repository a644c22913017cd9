//! Requirement detection and decomposition.

mod coordination;
mod deontic;
mod quantity;
mod structure;
mod table;
mod vague;

use std::ops::Range;

use thiserror::Error;

use crate::text::Token;

pub use coordination::split_coordination;
pub use deontic::{classify_sentence, find_markers, DeonticLexicon, Marker, StatementClass};
pub use quantity::{convert_unit, parse_quantity, Quantity, Unit};
pub(crate) use structure::is_regulation_text;
pub use structure::{extract_structured, ConceptSlot, StructuredRequirement};
pub use table::{
    parse_requirement_table, parse_table_cell, read_table_csv, Comparator, SubstanceRef, TableCell, TableRequirement,
    TableRow,
};
pub use vague::{flag_vague_terms, VagueFlag, VagueLexicon, VagueTermReport, DEFAULT_VAGUE_REASON};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("sentence {index} of {doc_id} is not a requirement")]
    NotARequirement { doc_id: String, index: usize },
    #[error("cannot parse quantity {text:?}")]
    UnparsableQuantity { text: String },
    #[error("unknown unit {unit:?}")]
    UnknownUnit { unit: String },
    #[error("cannot convert {from} to {to}")]
    IncompatibleUnits { from: Unit, to: Unit },
    #[error("overflow converting {value} {from} to {to}")]
    ConversionOverflow { value: String, from: Unit, to: Unit },
    #[error("row {row}: no comparator in {cell:?}")]
    ComparatorMissing { row: usize, cell: String },
    #[error("row {row}: {stated} does not equal the parenthetical {alternative}")]
    QuantityMismatch { row: usize, stated: String, alternative: String },
    #[error("row {row}: concentration must be positive, got {value}")]
    NonPositiveConcentration { row: usize, value: String },
    #[error("row {row}: {source}")]
    Row { row: usize, source: Box<ExtractError> },
    #[error("unknown statement class {0:?}")]
    UnknownClass(String),
    #[error("lexicon file: {0}")]
    Lexicon(String),
}

/// Left-to-right longest match of token-norm phrases.
pub(crate) fn match_phrases<'p, T>(tokens: &[Token], phrases: &'p [(Vec<String>, T)]) -> Vec<(Range<usize>, &'p T)> {
    let longest = phrases.iter().map(|(p, _)| p.len()).max().unwrap_or(0);
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let hit = (1..=longest.min(tokens.len() - i)).rev().find_map(|len| {
            phrases
                .iter()
                .find(|(p, _)| p.len() == len && p.iter().zip(&tokens[i..i + len]).all(|(w, t)| *w == t.norm))
                .map(|(_, v)| (len, v))
        });
        match hit {
            Some((len, v)) => {
                out.push((i..i + len, v));
                i += len;
            }
            None => i += 1,
        }
    }
    out
}

pub(crate) fn phrase_key(phrase: &str) -> Vec<String> {
    crate::text::tokenize(phrase).into_iter().map(|t| t.norm).collect()
}
