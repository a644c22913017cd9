// Shared fixtures over the bundled data directory.
#![allow(dead_code)]

use std::path::PathBuf;

use normreq_core::extract::{
    extract_structured, split_coordination, DeonticLexicon, StatementClass, StructuredRequirement,
};
use normreq_core::lexicon::Lexicon;
use normreq_core::text::AnnotatedDocument;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn lexicon() -> Lexicon {
    Lexicon::from_path(data_dir().join("glossary.csv")).expect("bundled glossary loads")
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(data_dir().join(rel)).expect("bundled file")
}

pub fn annotated(id: &str, text: &str, lex: &Lexicon) -> AnnotatedDocument {
    let mut doc = AnnotatedDocument::new(id, "IEC 60376 ED3", text);
    let lookups = lex.annotate_concepts(&doc);
    doc.merge(lookups);
    doc
}

/// Requirement atoms of every requirement-strength sentence.
pub fn atoms(doc: &AnnotatedDocument, lex: &Lexicon) -> Vec<StructuredRequirement> {
    let deontic = DeonticLexicon::default();
    doc.sentences()
        .iter()
        .filter_map(|s| extract_structured(doc, s, &deontic, lex).ok())
        .filter(|r| r.classification >= StatementClass::ExternalConstraint)
        .flat_map(|r| split_coordination(&r))
        .collect()
}
