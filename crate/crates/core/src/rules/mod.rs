//! Cascaded annotation patterns over the token stream.
//!
//! A rule file holds one or more phases:
//!
//! ```text
//! Phase: LookupRename
//! Input: Lookup
//! Options: control = appelt, scope = sentence
//!
//! Rule: RenameLookup
//! Priority: 5
//! ({Lookup.type == class}):m
//! -->
//! :m.matchOntology = { URI = :m.Lookup.URI }
//! ```
//!
//! A `{...}` element matches one token position when every constraint in it
//! is satisfied by some visible annotation covering that token. Only types
//! listed in `Input` are visible; `Token` and `Sentence` are available as
//! pseudo-types.

mod ast;
mod engine;
mod matcher;
mod parser;

use thiserror::Error;

pub use ast::{Action, ConstraintOp, Control, FeatureConstraint, FeatureSource, PatternNode, Rule, RulePhase, Scope};
pub use engine::{run_cascade, run_phase, run_phase_matches, MatchRecord, SENTENCE, TOKEN};
pub use parser::{parse_rule_file, validate_phase};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("line {line}, column {col}: expected {expected}, found {found}")]
    SyntaxError { line: usize, col: usize, expected: String, found: String },
    #[error("line {line}: unknown control {control:?}")]
    UnknownControl { line: usize, control: String },
    #[error("line {line}: unknown option {option:?}")]
    UnknownOption { line: usize, option: String },
    #[error("phase {phase}: duplicate rule name {rule}")]
    DuplicateRuleName { phase: String, rule: String },
    #[error("rule {rule}: label {label} is not bound on the left-hand side")]
    UnboundLabel { rule: String, label: String },
    #[error("rule {rule}: label {label} bound twice")]
    DuplicateBinding { rule: String, label: String },
    #[error("rule {rule}: type {ann_type} is not listed in the phase input")]
    InvisibleType { rule: String, ann_type: String },
    #[error("rule {rule}: no {ann_type} constraint under label {label}")]
    UnknownCopySource { rule: String, label: String, ann_type: String },
    #[error("rule {rule}: {detail}")]
    InvalidPattern { rule: String, detail: String },
}

impl RuleError {
    /// Source line of the error, for errors tied to a position.
    pub fn line(&self) -> Option<usize> {
        match self {
            RuleError::SyntaxError { line, .. }
            | RuleError::UnknownControl { line, .. }
            | RuleError::UnknownOption { line, .. } => Some(*line),
            _ => None,
        }
    }
}
