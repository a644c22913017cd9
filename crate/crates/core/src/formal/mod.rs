//! Formal requirement programs: RSML text and contract classes.
//!
//! An [`RsmlProgram`] holds environment ranges and named blocks of numbered
//! statements. It is built from extracted requirements by [`build_rsml`],
//! written with [`emit_rsml`], read back with [`parse_rsml`] and turned into
//! contract classes with [`emit_contracts`].

mod build;
mod contracts;
mod ident;
mod rsml;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::Comparator;

pub use build::{build_rsml, BuildConfig, TableContext};
pub use contracts::{
    emit_contracts, range_conflicts, statement_label, Bounds, ContractOptions, RangeConflict, DOCUMENTATION_FILE,
    DOMAIN_FILE,
};
pub use ident::{display_identifier, mangle_identifier, sanitize_numeral};
pub use rsml::{emit_rsml, parse_rsml};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormalError {
    #[error("cannot build an identifier from {surface:?}")]
    EmptyIdentifier { surface: String },
    #[error("cannot turn subject {subject:?} into an identifier")]
    UnmangleableSubject { subject: String },
    #[error("no state configured for table context {context:?}")]
    MissingContextState { context: String },
    #[error("line {line}: expected {expected}")]
    RsmlSyntaxError { line: usize, expected: String },
    #[error("invalid program: {detail}")]
    InvalidProgram { detail: String },
}

/// `<var> is in <lower> and <upper>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvironmentDecl {
    pub var: String,
    pub lower: Decimal,
    pub upper: Decimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StatementBody {
    ConditionalImmediate {
        state_var: String,
        state_value: String,
        subject: String,
        comparator: Comparator,
        value: Decimal,
        unit: Option<String>,
    },
    AccordingTo {
        authority: String,
        subject: String,
        comparator: Comparator,
        value: Decimal,
        unit: Option<String>,
    },
    Narrative {
        text: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalStatement {
    pub number: u32,
    pub body: StatementBody,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsmlBlock {
    pub name: String,
    pub statements: Vec<FormalStatement>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsmlProgram {
    pub environment: Vec<EnvironmentDecl>,
    pub blocks: Vec<RsmlBlock>,
}

impl RsmlProgram {
    pub fn statements(&self) -> impl Iterator<Item = (&RsmlBlock, &FormalStatement)> {
        self.blocks.iter().flat_map(|b| b.statements.iter().map(move |s| (b, s)))
    }

    pub fn statement_count(&self) -> usize {
        self.blocks.iter().map(|b| b.statements.len()).sum()
    }

    /// Numbers statements 1..N in block order.
    pub fn renumber(&mut self) {
        let mut n = 0;
        for statement in self.blocks.iter_mut().flat_map(|b| b.statements.iter_mut()) {
            n += 1;
            statement.number = n;
        }
    }

    /// Checks the structural invariants: consecutive numbering, unique block
    /// names, ordered ranges, texts that the RSML grammar can carry, and
    /// according-to subjects declared in the environment.
    pub fn validate(&self) -> Result<(), FormalError> {
        let invalid = |detail: String| Err(FormalError::InvalidProgram { detail });
        let mut declared = Vec::new();
        for decl in &self.environment {
            if decl.lower >= decl.upper {
                return invalid(format!("range of {:?} is empty", decl.var));
            }
            check_phrase(&decl.var, &[" is in ", " and "])?;
            declared.push(mangle_identifier(&decl.var)?);
        }
        let mut names = std::collections::BTreeSet::new();
        for block in &self.blocks {
            if !rsml::valid_block_name(&block.name) {
                return invalid(format!("block name {:?}", block.name));
            }
            if !names.insert(block.name.as_str()) {
                return invalid(format!("duplicate block {:?}", block.name));
            }
        }
        for (expected, (_, statement)) in (1..).zip(self.statements()) {
            if statement.number != expected {
                return invalid(format!("statement {} numbered {}", expected, statement.number));
            }
            match &statement.body {
                StatementBody::ConditionalImmediate { state_var, state_value, subject, unit, .. } => {
                    for phrase in [state_var, state_value, subject] {
                        check_phrase(phrase, &[])?;
                    }
                    check_unit(unit.as_deref())?;
                }
                StatementBody::AccordingTo { authority, subject, unit, .. } => {
                    check_phrase(authority, &[" the "])?;
                    check_phrase(subject, &[])?;
                    check_unit(unit.as_deref())?;
                    let id = mangle_identifier(subject)?;
                    if !declared.contains(&id) {
                        return invalid(format!("subject {subject:?} is not in the environment"));
                    }
                }
                StatementBody::Narrative { text } => {
                    if text.is_empty() || text.contains(['"', '\n', '\r']) {
                        return invalid(format!("narrative text {text:?}"));
                    }
                }
            }
        }
        Ok(())
    }
}

const RESERVED: &[&str] = &[" is equal to ", " then immediately ", " shall be "];

fn check_phrase(phrase: &str, also_reserved: &[&str]) -> Result<(), FormalError> {
    let ok = !phrase.is_empty()
        && phrase.trim() == phrase
        && !phrase.contains(['\n', '\r', '[', ']', '"'])
        && !phrase.contains("  ")
        && !RESERVED.iter().chain(also_reserved).any(|r| phrase.contains(r));
    if ok {
        mangle_identifier(phrase).map(|_| ())
    } else {
        Err(FormalError::InvalidProgram { detail: format!("phrase {phrase:?}") })
    }
}

fn check_unit(unit: Option<&str>) -> Result<(), FormalError> {
    match unit {
        Some(u) if u.is_empty() || u.contains(['[', ']', '\n', '\r']) || u.trim() != u => {
            Err(FormalError::InvalidProgram { detail: format!("unit {u:?}") })
        }
        _ => Ok(()),
    }
}
