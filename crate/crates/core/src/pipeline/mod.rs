//! End-to-end processing: annotate, extract, formalize and index a corpus.

mod config;
mod run;

use std::fs;
use std::path::Path;

use chrono::NaiveDateTime;
use thiserror::Error;

use crate::extract::{
    classify_sentence, extract_structured, find_markers, flag_vague_terms, parse_requirement_table, read_table_csv,
    split_coordination, DeonticLexicon, ExtractError, StatementClass, StructuredRequirement, TableRequirement,
    VagueLexicon, VagueTermReport,
};
use crate::formal::FormalError;
use crate::index::{IndexCandidate, IndexError, IndexOptions, RequirementIndex, EXIGENCE_FACET, REQUIREMENT_FACET};
use crate::lexicon::{Lexicon, LexiconError, LOOKUP};
use crate::rules::{parse_rule_file, run_cascade, RulePhase};
use crate::text::{AnnotatedDocument, SentenceSpan};

pub use config::{CompatFlags, DocumentSpec, PipelineConfig, TableSpec};
pub use run::{run_pipeline, PipelineReport, ReportCounts, VagueEntry, REPORT_FILE, RSML_FILE};

/// Annotation produced by the bundled rules for candidate requirement
/// sentences.
pub const REQUIREMENT_SENTENCE: &str = "RequirementSentence";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("glossary: {0}")]
    Lexicon(#[from] LexiconError),
    #[error("{context}: {source}")]
    Extract { context: String, source: ExtractError },
    #[error(transparent)]
    Formal(#[from] FormalError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl PipelineError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> PipelineError {
        PipelineError::Io { path: path.display().to_string(), source }
    }
}

/// Source of index timestamps.
pub trait Clock {
    fn now(&self) -> NaiveDateTime;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> NaiveDateTime {
        chrono::Local::now().naive_local()
    }
}

/// Always returns the same instant.
pub struct FixedClock(pub NaiveDateTime);

impl Clock for FixedClock {
    fn now(&self) -> NaiveDateTime {
        self.0
    }
}

/// Lexicons and rule phases loaded once per run.
pub struct Resources {
    pub lexicon: Lexicon,
    pub phases: Vec<RulePhase>,
    pub deontic: DeonticLexicon,
    pub vague: VagueLexicon,
}

impl Resources {
    pub fn load(config: &PipelineConfig) -> Result<Resources, PipelineError> {
        let lexicon = Lexicon::from_path(&config.glossary)?;
        let mut phases = Vec::new();
        for path in &config.rules {
            let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
            let parsed =
                parse_rule_file(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
            phases.extend(parsed);
        }
        let deontic = match &config.deontic_lexicon {
            Some(path) => {
                let file = fs::File::open(path).map_err(|e| PipelineError::io(path, e))?;
                DeonticLexicon::from_csv_reader(file)
                    .map_err(|source| PipelineError::Extract { context: path.display().to_string(), source })?
            }
            None => DeonticLexicon::default(),
        };
        let vague = match &config.vague_lexicon {
            Some(path) => VagueLexicon::from_lines(&fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?),
            None => VagueLexicon::default(),
        };
        Ok(Resources { lexicon, phases, deontic, vague })
    }
}

/// Gazetteer lookups followed by the rule cascade.
pub fn annotate_document(id: &str, title: &str, text: &str, res: &Resources) -> AnnotatedDocument {
    let mut doc = AnnotatedDocument::new(id, title, text);
    let lookups = res.lexicon.annotate_concepts(&doc);
    doc.merge(lookups);
    run_cascade(&res.phases, &doc)
}

/// Requirement atoms of every requirement-strength sentence.
pub fn extract_requirements(doc: &AnnotatedDocument, res: &Resources) -> Vec<StructuredRequirement> {
    doc.sentences()
        .iter()
        .filter(|s| classify_sentence(doc, s, &res.deontic).is_requirement_strength())
        .filter_map(|s| extract_structured(doc, s, &res.deontic, &res.lexicon).ok())
        .flat_map(|r| split_coordination(&r))
        .collect()
}

/// The sentence with its concepts, one entry per occurrence, named by their
/// preferred label, and its modal markers.
pub fn index_candidate(doc: &AnnotatedDocument, sentence: &SentenceSpan, res: &Resources) -> IndexCandidate {
    let concepts = doc
        .annotations_within(LOOKUP, sentence.span)
        .into_iter()
        .map(|a| {
            let uri = a.feature_str("URI").unwrap_or_default();
            match res.lexicon.entry(uri) {
                Some(entry) => entry.display_label().to_string(),
                None => doc.slice(a.span).to_string(),
            }
        })
        .collect();
    let markers = find_markers(doc, sentence.span, &res.deontic).into_iter().map(|m| m.phrase).collect();
    IndexCandidate { title: doc.title.clone(), sentence: doc.slice(sentence.span).to_string(), concepts, markers }
}

/// Vague-term flags of every sentence that has any.
pub fn vague_reports(doc: &AnnotatedDocument, res: &Resources) -> Vec<VagueTermReport> {
    doc.sentences()
        .iter()
        .map(|s| flag_vague_terms(doc, s.span, &res.vague))
        .filter(|r| !r.flagged.is_empty())
        .collect()
}

/// Sentences where the rule cascade and the classifier disagree on whether
/// a sentence is a candidate requirement. Empty when the rules produce no
/// `RequirementSentence` annotations at all.
pub fn rule_disagreements(doc: &AnnotatedDocument, res: &Resources) -> Vec<usize> {
    if doc.annotations_of(REQUIREMENT_SENTENCE).next().is_none() {
        return Vec::new();
    }
    doc.sentences()
        .iter()
        .filter(|s| {
            let by_rules = !doc.annotations_within(REQUIREMENT_SENTENCE, s.span).is_empty();
            let by_classifier = classify_sentence(doc, s, &res.deontic) != StatementClass::Statement;
            by_rules != by_classifier
        })
        .map(|s| s.index)
        .collect()
}

/// Index settings implied by the compatibility flags.
pub fn index_options(config: &PipelineConfig) -> IndexOptions {
    IndexOptions {
        type_facet: if config.compat.exigence_facet { EXIGENCE_FACET } else { REQUIREMENT_FACET }.to_string(),
        dedup: !config.compat.keep_duplicates,
        ..Default::default()
    }
}

/// Offers every sentence of `doc` to the index. Returns the number of
/// (sentence, concept) pairs accepted and rejected.
pub fn index_document(
    doc: &AnnotatedDocument,
    res: &Resources,
    index: &mut RequirementIndex,
    clock: &dyn Clock,
) -> (usize, usize) {
    let (mut accepted, mut rejected) = (0, 0);
    for sentence in doc.sentences() {
        for outcome in index.index_sentence(&index_candidate(doc, sentence, res), clock.now()) {
            match outcome {
                Ok(_) => accepted += 1,
                Err(reason) => {
                    log::debug!("{} sentence {}: {reason}", doc.doc_id, sentence.index);
                    rejected += 1;
                }
            }
        }
    }
    (accepted, rejected)
}

/// Reads and annotates every configured document.
pub fn annotate_corpus(config: &PipelineConfig, res: &Resources) -> Result<Vec<AnnotatedDocument>, PipelineError> {
    config
        .documents
        .iter()
        .map(|spec| {
            let text = fs::read_to_string(&spec.path).map_err(|e| PipelineError::io(&spec.path, e))?;
            let title = spec.title.as_deref().unwrap_or(&config.title);
            Ok(annotate_document(&spec.id, title, &text, res))
        })
        .collect()
}

pub fn load_table(spec: &TableSpec, lex: &Lexicon) -> Result<Vec<TableRequirement>, PipelineError> {
    let context = spec.path.display().to_string();
    let file = fs::File::open(&spec.path).map_err(|e| PipelineError::io(&spec.path, e))?;
    let rows = read_table_csv(file).map_err(|e| PipelineError::Config(format!("{context}: {e}")))?;
    parse_requirement_table(&rows, &spec.context, lex).map_err(|source| PipelineError::Extract { context, source })
}
