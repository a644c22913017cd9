//! Requirement extraction from normative-standard text.
//!
//! The stages, in pipeline order:
//!
//! - [`text`]: tokens, sentences and the annotation store
//! - [`lexicon`]: concept glossary and gazetteer lookup
//! - [`rules`]: cascaded pattern rules over annotations
//! - [`extract`]: deontic classification, decomposition, tables, vague terms
//! - [`formal`]: RSML programs and contract classes
//! - [`index`]: BM25 index over requirement sentences
//! - [`pipeline`]: configuration and the end-to-end run
//!
//! ```
//! use normreq_core::{AnnotatedDocument, DeonticLexicon, StatementClass};
//! use normreq_core::extract::classify_sentence;
//!
//! let doc = AnnotatedDocument::new("d", "t", "The gas shall be dry.");
//! // no concept lookups yet, so the sentence is a plain statement
//! let class = classify_sentence(&doc, &doc.sentences()[0], &DeonticLexicon::default());
//! assert_eq!(class, StatementClass::Statement);
//! ```

pub mod extract;
pub mod formal;
pub mod index;
pub mod lexicon;
pub mod pipeline;
pub mod rules;
pub mod text;

pub use extract::{
    DeonticLexicon, Quantity, StatementClass, StructuredRequirement, TableRequirement, Unit, VagueLexicon,
};
pub use formal::{RsmlProgram, StatementBody};
pub use index::{IndexCandidate, IndexedSentence, RequirementIndex, SharedIndex};
pub use lexicon::{ConceptEntry, Lexicon};
pub use pipeline::{PipelineConfig, PipelineError, PipelineReport, Resources};
pub use rules::RulePhase;
pub use text::{AnnotatedDocument, Annotation, Span, Token};
