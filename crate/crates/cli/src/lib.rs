//! Command line front end: one subcommand per pipeline stage plus the
//! HTTP service.

pub mod service;

use std::error::Error;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use normreq_core::extract::{StructuredRequirement, TableRequirement};
use normreq_core::formal::{
    build_rsml, emit_contracts, emit_rsml, parse_rsml, range_conflicts, Bounds, BuildConfig, ContractOptions,
    TableContext,
};
use normreq_core::index::{load_snapshot, save_snapshot, RequirementIndex, SharedIndex};
use normreq_core::lexicon::Lexicon;
use normreq_core::pipeline::{
    annotate_corpus, annotate_document, extract_requirements, index_document, index_options, load_table,
    rule_disagreements, run_pipeline, vague_reports, PipelineConfig, Resources, SystemClock, TableSpec,
};
use normreq_core::text::export_annotations_xml;

pub type CliResult<T> = Result<T, Box<dyn Error + Send + Sync>>;

#[derive(Debug, Parser)]
#[command(name = "normreq", version, about = "Extract, formalize and index requirements from standards text")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    /// Exit with status 1 when the command reports warnings.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Annotate a text file and print its annotation XML.
    Annotate {
        #[arg(long)]
        config: PathBuf,
        /// Document id, defaults to the file stem.
        #[arg(long)]
        id: Option<String>,
        file: PathBuf,
    },
    /// Print the requirement atoms of text files as JSON.
    Extract {
        #[arg(long)]
        config: PathBuf,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Parse a requirement table CSV into JSON records.
    Tables {
        #[arg(long)]
        context: String,
        /// Glossary used to resolve substance names.
        #[arg(long)]
        glossary: Option<PathBuf>,
        csv: PathBuf,
    },
    /// Print the RSML program for extracted requirements and tables.
    ///
    /// Without --requirements or --tables the configured documents and tables
    /// are processed.
    EmitRsml {
        #[arg(long)]
        config: PathBuf,
        /// JSON written by `extract`.
        #[arg(long)]
        requirements: Option<PathBuf>,
        /// JSON written by `tables`.
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Write the contract classes of an RSML file into a directory.
    EmitContracts {
        rsml: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        inclusive_bounds: bool,
    },
    /// Index the configured documents and save the snapshot.
    Index {
        #[arg(long)]
        config: PathBuf,
        /// Snapshot path, defaults to the configured one.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search a saved snapshot.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        concept: String,
        /// Ranking text, defaults to the concept.
        #[arg(long)]
        q: Option<String>,
    },
    /// Serve the query API over HTTP.
    Serve {
        #[arg(long)]
        index: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
    },
    /// Run every stage and print the report.
    #[command(alias = "run")]
    Report {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn load(config: &Path) -> CliResult<(PipelineConfig, Resources)> {
    let config = PipelineConfig::load(config)?;
    let res = Resources::load(&config)?;
    Ok((config, res))
}

fn doc_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "doc".into())
}

fn json_line(out: &mut dyn Write, value: &impl serde::Serialize) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn build_config(config: &PipelineConfig) -> BuildConfig {
    BuildConfig {
        tables: config
            .tables
            .iter()
            .map(|t: &TableSpec| TableContext {
                context: t.context.clone(),
                state: t.state.clone(),
                state_substance: t.state_substance.clone(),
            })
            .collect(),
        ..Default::default()
    }
}

/// Executes a command, writing its result to `out`. Returns the warnings
/// it produced.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<Vec<String>> {
    let mut warnings = Vec::new();
    match cli.command {
        Command::Annotate { config, id, file } => {
            let (config, res) = load(&config)?;
            let id = id.unwrap_or_else(|| doc_id(&file));
            let doc = annotate_document(&id, &config.title, &read(&file)?, &res);
            out.write_all(export_annotations_xml(&doc).as_bytes())?;
        }
        Command::Extract { config, files } => {
            let (config, res) = load(&config)?;
            let mut atoms = Vec::new();
            for file in &files {
                let doc = annotate_document(&doc_id(file), &config.title, &read(file)?, &res);
                atoms.extend(extract_requirements(&doc, &res));
                for report in vague_reports(&doc, &res) {
                    for flag in report.flagged {
                        warnings.push(format!("{}: vague term {:?} ({})", doc.doc_id, flag.term, flag.reason));
                    }
                }
                for sentence in rule_disagreements(&doc, &res) {
                    warnings.push(format!("{}: rules and classifier disagree on sentence {sentence}", doc.doc_id));
                }
            }
            json_line(out, &atoms)?;
        }
        Command::Tables { context, glossary, csv } => {
            let lexicon = match &glossary {
                Some(path) => Lexicon::from_path(path)?,
                None => Lexicon::default(),
            };
            let spec = TableSpec { path: csv, context, state: String::new(), state_substance: None };
            let rows = load_table(&spec, &lexicon)?;
            if glossary.is_some() {
                for row in rows.iter().filter(|r| r.substance.uri.is_none()) {
                    warnings.push(format!("{:?} is not in the glossary", row.substance.surface));
                }
            }
            json_line(out, &rows)?;
        }
        Command::EmitRsml { config, requirements, tables } => {
            let (config, res) = load(&config)?;
            let atoms: Vec<StructuredRequirement> = match &requirements {
                Some(path) => serde_json::from_str(&read(path)?)?,
                None if tables.is_none() => {
                    annotate_corpus(&config, &res)?.iter().flat_map(|doc| extract_requirements(doc, &res)).collect()
                }
                None => Vec::new(),
            };
            let rows: Vec<TableRequirement> = match &tables {
                Some(path) => serde_json::from_str(&read(path)?)?,
                None if requirements.is_none() => {
                    let mut rows = Vec::new();
                    for spec in &config.tables {
                        rows.extend(load_table(spec, &res.lexicon)?);
                    }
                    rows
                }
                None => Vec::new(),
            };
            let program = build_rsml(&rows, &atoms, &res.lexicon, &build_config(&config))?;
            let bounds = if config.compat.inclusive_bounds { Bounds::Inclusive } else { Bounds::Strict };
            for c in range_conflicts(&program, bounds) {
                warnings.push(format!(
                    "statement [{}] sets {} to {} outside {} .. {}",
                    c.statement, c.var, c.value, c.lower, c.upper
                ));
            }
            out.write_all(emit_rsml(&program).as_bytes())?;
        }
        Command::EmitContracts { rsml, out: dir, inclusive_bounds } => {
            let program = parse_rsml(&read(&rsml)?)?;
            program.validate()?;
            let source = rsml.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let bounds = if inclusive_bounds { Bounds::Inclusive } else { Bounds::Strict };
            fs::create_dir_all(&dir)?;
            for (name, text) in emit_contracts(&program, &ContractOptions { bounds, source }) {
                fs::write(dir.join(&name), text)?;
                writeln!(out, "{}", dir.join(name).display())?;
            }
        }
        Command::Index { config, out: path } => {
            let (config, res) = load(&config)?;
            let mut index = RequirementIndex::new(index_options(&config));
            let (mut accepted, mut rejected) = (0, 0);
            for doc in annotate_corpus(&config, &res)? {
                let (a, r) = index_document(&doc, &res, &mut index, &SystemClock);
                accepted += a;
                rejected += r;
            }
            let path = path.unwrap_or(config.index_path);
            save_snapshot(&index, &path)?;
            writeln!(out, "indexed {accepted}, rejected {rejected}, snapshot {}", path.display())?;
        }
        Command::Query { index, concept, q } => {
            let index = load_snapshot(&index)?;
            json_line(out, &service::search(&index, &concept, q.as_deref()))?;
        }
        Command::Serve { index, addr } => {
            let shared = Arc::new(SharedIndex::new(load_snapshot(&index)?));
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(service::serve(shared, &addr))?;
        }
        Command::Report { config } => {
            let config = PipelineConfig::load(&config)?;
            let report = run_pipeline(&config, &SystemClock)?;
            warnings.extend(report.warnings.iter().cloned());
            json_line(out, &report)?;
        }
    }
    Ok(warnings)
}
