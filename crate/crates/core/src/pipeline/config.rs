use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentSpec {
    pub id: String,
    pub path: PathBuf,
    /// Overrides the configuration-wide title.
    #[serde(default)]
    pub title: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub path: PathBuf,
    pub context: String,
    pub state: String,
    #[serde(default)]
    pub state_substance: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompatFlags {
    /// Write the `exigence` type facet instead of `requirement`.
    pub exigence_facet: bool,
    /// Contract invariants use `>=`/`<=` instead of strict bounds.
    pub inclusive_bounds: bool,
    /// Index repeated (sentence, concept, title) records instead of skipping them.
    pub keep_duplicates: bool,
}

/// Pipeline settings. Relative paths are resolved against the directory of
/// the configuration file by [`PipelineConfig::load`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_title")]
    pub title: String,
    pub glossary: PathBuf,
    #[serde(default)]
    pub rules: Vec<PathBuf>,
    #[serde(default)]
    pub deontic_lexicon: Option<PathBuf>,
    #[serde(default)]
    pub vague_lexicon: Option<PathBuf>,
    #[serde(default)]
    pub documents: Vec<DocumentSpec>,
    #[serde(default)]
    pub tables: Vec<TableSpec>,
    pub output_dir: PathBuf,
    pub index_path: PathBuf,
    #[serde(default)]
    pub compat: CompatFlags,
}

fn default_title() -> String {
    "document".to_string()
}

impl PipelineConfig {
    pub fn from_json(text: &str, base: &Path) -> Result<PipelineConfig, PipelineError> {
        let mut config: PipelineConfig =
            serde_json::from_str(text).map_err(|e| PipelineError::Config(format!("invalid configuration: {e}")))?;
        config.resolve(base);
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<PipelineConfig, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::from_json(&text, base)
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.glossary);
        self.rules.iter_mut().for_each(join);
        self.deontic_lexicon.iter_mut().for_each(join);
        self.vague_lexicon.iter_mut().for_each(join);
        self.documents.iter_mut().for_each(|d| join(&mut d.path));
        self.tables.iter_mut().for_each(|t| join(&mut t.path));
        join(&mut self.output_dir);
        join(&mut self.index_path);
    }

    /// Checks that every input exists and that ids and contexts are unique.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let inputs = std::iter::once(&self.glossary)
            .chain(&self.rules)
            .chain(&self.deontic_lexicon)
            .chain(&self.vague_lexicon)
            .chain(self.documents.iter().map(|d| &d.path))
            .chain(self.tables.iter().map(|t| &t.path));
        for path in inputs {
            if !path.is_file() {
                return Err(PipelineError::Config(format!("{} does not exist", path.display())));
            }
        }
        let mut ids = BTreeSet::new();
        if let Some(d) = self.documents.iter().find(|d| !ids.insert(&d.id)) {
            return Err(PipelineError::Config(format!("duplicate document id {:?}", d.id)));
        }
        let mut contexts = BTreeSet::new();
        if let Some(t) = self.tables.iter().find(|t| !contexts.insert(&t.context)) {
            return Err(PipelineError::Config(format!("duplicate table context {:?}", t.context)));
        }
        Ok(())
    }
}
