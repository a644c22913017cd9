use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    annotate_corpus, extract_requirements, index_document, index_options, load_table, rule_disagreements,
    vague_reports, Clock, PipelineConfig, PipelineError, Resources,
};
use crate::extract::{classify_sentence, StructuredRequirement, TableRequirement, VagueFlag};
use crate::formal::{
    build_rsml, emit_contracts, emit_rsml, range_conflicts, Bounds, BuildConfig, ContractOptions, TableContext,
};
use crate::index::{save_snapshot, RequirementIndex};
use crate::text::export_annotations_xml;

pub const RSML_FILE: &str = "requirements.rsml";
pub const REQUIREMENTS_FILE: &str = "requirements.json";
pub const TABLES_FILE: &str = "tables.json";
pub const REPORT_FILE: &str = "report.json";
const ANNOTATIONS_DIR: &str = "annotations";
const CONTRACTS_DIR: &str = "contracts";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportCounts {
    pub documents: usize,
    pub sentences: usize,
    pub requirement_sentences: usize,
    pub atoms: usize,
    pub table_rows: usize,
    pub statements: usize,
    /// Sentence and concept pairs offered to the index.
    pub candidates: usize,
    pub indexed: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VagueEntry {
    pub doc_id: String,
    pub sentence: usize,
    pub flagged: Vec<VagueFlag>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub counts: ReportCounts,
    pub vague_terms: Vec<VagueEntry>,
    pub warnings: Vec<String>,
}

fn write(path: &Path, contents: &str) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| PipelineError::io(path, e))
}

// Leaves only the contract files of this run in the contracts directory.
fn clear_contracts(dir: &Path) -> Result<(), PipelineError> {
    let Ok(entries) = fs::read_dir(dir) else { return Ok(()) };
    for entry in entries.flatten() {
        let path = entry.path();
        if path.extension().is_some_and(|e| e == "e") {
            fs::remove_file(&path).map_err(|e| PipelineError::io(&path, e))?;
        }
    }
    Ok(())
}

/// Runs every stage and writes the artifacts under `config.output_dir`:
/// per-document annotation XML, `requirements.json`, `tables.json`,
/// `requirements.rsml`, the contract classes and `report.json`. The index
/// snapshot goes to `config.index_path`. Only the index record dates depend
/// on `clock`.
pub fn run_pipeline(config: &PipelineConfig, clock: &dyn Clock) -> Result<PipelineReport, PipelineError> {
    config.validate()?;
    let res = Resources::load(config)?;
    let out = &config.output_dir;
    let mut report = PipelineReport::default();

    let mut index = RequirementIndex::new(index_options(config));
    let mut requirements: Vec<StructuredRequirement> = Vec::new();

    for doc in annotate_corpus(config, &res)? {
        let doc = &doc;
        write(&out.join(ANNOTATIONS_DIR).join(format!("{}.xml", doc.doc_id)), &export_annotations_xml(doc))?;

        report.counts.documents += 1;
        report.counts.sentences += doc.sentences().len();
        report.counts.requirement_sentences += doc
            .sentences()
            .iter()
            .filter(|s| classify_sentence(doc, s, &res.deontic).is_requirement_strength())
            .count();

        let atoms = extract_requirements(doc, &res);
        report.counts.atoms += atoms.len();
        requirements.extend(atoms);

        let (accepted, rejected) = index_document(doc, &res, &mut index, clock);
        report.counts.indexed += accepted;
        report.counts.rejected += rejected;
        report.counts.candidates += accepted + rejected;

        for vague in vague_reports(doc, &res) {
            let sentence = doc.sentence_at(vague.sentence_span.start).map_or(0, |s| s.index);
            report.vague_terms.push(VagueEntry { doc_id: doc.doc_id.clone(), sentence, flagged: vague.flagged });
        }
        for sentence in rule_disagreements(doc, &res) {
            report.warnings.push(format!("{}: rules and classifier disagree on sentence {sentence}", doc.doc_id));
        }
    }

    let mut tables: Vec<TableRequirement> = Vec::new();
    for spec in &config.tables {
        let rows = load_table(spec, &res.lexicon)?;
        for row in rows.iter().filter(|r| r.substance.uri.is_none()) {
            report
                .warnings
                .push(format!("table {:?}: {:?} is not in the glossary", spec.context, row.substance.surface));
        }
        tables.extend(rows);
    }
    report.counts.table_rows = tables.len();

    let build = BuildConfig {
        tables: config
            .tables
            .iter()
            .map(|t| TableContext {
                context: t.context.clone(),
                state: t.state.clone(),
                state_substance: t.state_substance.clone(),
            })
            .collect(),
        ..Default::default()
    };
    let program = build_rsml(&tables, &requirements, &res.lexicon, &build)?;
    report.counts.statements = program.statement_count();
    let bounds = if config.compat.inclusive_bounds { Bounds::Inclusive } else { Bounds::Strict };
    for c in range_conflicts(&program, bounds) {
        report.warnings.push(format!(
            "statement [{}] sets {} to {}, outside its declared range {} .. {}",
            c.statement, c.var, c.value, c.lower, c.upper
        ));
    }

    write(&out.join(REQUIREMENTS_FILE), &(serde_json::to_string_pretty(&requirements)? + "\n"))?;
    write(&out.join(TABLES_FILE), &(serde_json::to_string_pretty(&tables)? + "\n"))?;
    write(&out.join(RSML_FILE), &emit_rsml(&program))?;
    let contracts_dir = out.join(CONTRACTS_DIR);
    clear_contracts(&contracts_dir)?;
    let options = ContractOptions { bounds, source: RSML_FILE.to_string() };
    for (name, source) in emit_contracts(&program, &options) {
        write(&contracts_dir.join(name), &source)?;
    }

    save_snapshot(&index, &config.index_path)?;
    write(&out.join(REPORT_FILE), &(serde_json::to_string_pretty(&report)? + "\n"))?;
    log::info!(
        "{} documents, {} requirement sentences, {} statements, {} records indexed",
        report.counts.documents,
        report.counts.requirement_sentences,
        report.counts.statements,
        report.counts.indexed
    );
    Ok(report)
}
