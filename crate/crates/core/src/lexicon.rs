//! Bilingual glossary of domain concepts and gazetteer-style concept lookup.
//!
//! The glossary is a CSV file with header `uri,class,lang,label,preferred,parent_uri`.
//! A concept may span several rows (one per language, or one per label); the
//! `label` cell may also hold `|`-separated alternatives, in which case only
//! the first inherits the row's `preferred` flag. Rows sharing a uri must agree
//! on `class` and `parent_uri`.

use std::collections::{BTreeMap, HashMap};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{tokenize, AnnotatedDocument, Annotation, Features};

pub const LOOKUP: &str = "Lookup";

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("duplicate uri {uri}: {detail}")]
    DuplicateUri { uri: String, detail: String },
    #[error("concept {uri} has no English label")]
    MissingEnglishLabel { uri: String },
    #[error("concept {uri} names parent {parent}, which is not defined")]
    DanglingParent { uri: String, parent: String },
    #[error("concept {uri} is part of a parent cycle")]
    CyclicHierarchy { uri: String },
    #[error("label {label:?} is shared by {uri} and {other}")]
    AmbiguousLabel { label: String, uri: String, other: String },
    #[error("concept {uri}: unknown language {lang:?}")]
    UnknownLanguage { uri: String, lang: String },
    #[error("concept {uri}: empty label")]
    EmptyLabel { uri: String },
    #[error("glossary row {row}: empty uri")]
    EmptyUri { row: usize },
    #[error("unknown concept {uri}")]
    UnknownUri { uri: String },
    #[error("glossary csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("glossary {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    Fr,
}

impl Language {
    pub fn parse(s: &str) -> Option<Language> {
        match s.trim().to_ascii_lowercase().as_str() {
            "en" => Some(Language::En),
            "fr" => Some(Language::Fr),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::Fr => "fr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Label {
    pub language: Language,
    pub text: String,
    pub preferred: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptEntry {
    pub uri: String,
    pub class_name: String,
    pub labels: Vec<Label>,
    pub parent_uri: Option<String>,
}

impl ConceptEntry {
    /// The preferred label in `lang`, else the first label in `lang`.
    pub fn preferred_label(&self, lang: Language) -> Option<&str> {
        let in_lang = || self.labels.iter().filter(|l| l.language == lang);
        in_lang().find(|l| l.preferred).or_else(|| in_lang().next()).map(|l| l.text.as_str())
    }

    /// Preferred English label; every entry has at least one English label.
    pub fn display_label(&self) -> &str {
        self.preferred_label(Language::En).unwrap_or(&self.uri)
    }
}

/// One raw glossary record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlossaryRow {
    pub uri: String,
    pub class: String,
    pub lang: String,
    pub label: String,
    #[serde(default)]
    pub preferred: String,
    #[serde(default)]
    pub parent_uri: String,
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, ConceptEntry>,
    // normalized token sequence -> (uri, label index within the entry)
    label_index: HashMap<Vec<String>, (String, usize)>,
    max_label_tokens: usize,
}

fn label_key(label: &str) -> Vec<String> {
    tokenize(label).into_iter().map(|t| t.norm).collect()
}

fn parse_flag(s: &str) -> bool {
    matches!(s.trim().to_ascii_lowercase().as_str(), "true" | "yes" | "y" | "1" | "x")
}

impl Lexicon {
    pub fn from_rows(rows: impl IntoIterator<Item = GlossaryRow>) -> Result<Lexicon, LexiconError> {
        load_glossary(rows)
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Lexicon, LexiconError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let rows = rdr.deserialize().collect::<Result<Vec<GlossaryRow>, _>>()?;
        load_glossary(rows)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|source| LexiconError::Io { path: path.display().to_string(), source })?;
        Lexicon::from_csv_reader(file)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &ConceptEntry> {
        self.entries.values()
    }

    pub fn entry(&self, uri: &str) -> Option<&ConceptEntry> {
        self.entries.get(uri)
    }

    /// Concept whose label matches the whole of `surface` after normalization.
    pub fn resolve(&self, surface: &str) -> Option<&ConceptEntry> {
        let key = label_key(surface);
        self.label_index.get(&key).and_then(|(uri, _)| self.entries.get(uri))
    }

    /// True iff `descendant` reaches `ancestor` through parent links.
    /// Reflexive.
    pub fn subsumes(&self, ancestor: &str, descendant: &str) -> Result<bool, LexiconError> {
        for uri in [ancestor, descendant] {
            if !self.entries.contains_key(uri) {
                return Err(LexiconError::UnknownUri { uri: uri.to_string() });
            }
        }
        let mut current = Some(descendant);
        while let Some(uri) = current {
            if uri == ancestor {
                return Ok(true);
            }
            current = self.entries.get(uri).and_then(|e| e.parent_uri.as_deref());
        }
        Ok(false)
    }

    /// Left-to-right longest-match lookup over token norms.
    ///
    /// Each match yields a `Lookup` annotation with features `URI`, `class`,
    /// `type` (always `"class"`), `label` (preferred English label) and `lang`
    /// (language of the matched label). Returned annotations carry provisional
    /// ids following `doc.next_id()`.
    pub fn annotate_concepts(&self, doc: &AnnotatedDocument) -> Vec<Annotation> {
        let norms: Vec<String> = doc.tokens().iter().map(|t| t.norm.clone()).collect();
        let mut out = Vec::new();
        let mut i = 0;
        while i < norms.len() {
            let longest = (1..=self.max_label_tokens.min(norms.len() - i))
                .rev()
                .find_map(|len| self.label_index.get(&norms[i..i + len]).map(|hit| (len, hit)));
            let Some((len, (uri, label_idx))) = longest else {
                i += 1;
                continue;
            };
            let entry = &self.entries[uri];
            let mut features = Features::new();
            features.insert("URI".into(), uri.as_str().into());
            features.insert("class".into(), entry.class_name.as_str().into());
            features.insert("type".into(), "class".into());
            features.insert("label".into(), entry.display_label().into());
            features.insert("lang".into(), entry.labels[*label_idx].language.as_str().into());
            out.push(Annotation {
                id: doc.next_id() + out.len() as u64,
                type_name: LOOKUP.to_string(),
                span: doc.tokens_span(i..i + len),
                features,
            });
            i += len;
        }
        out
    }
}

/// Builds a lexicon from glossary rows, checking every structural invariant.
pub fn load_glossary(rows: impl IntoIterator<Item = GlossaryRow>) -> Result<Lexicon, LexiconError> {
    let mut entries: BTreeMap<String, ConceptEntry> = BTreeMap::new();

    for (row_no, row) in rows.into_iter().enumerate() {
        let uri = row.uri.trim().to_string();
        if uri.is_empty() {
            return Err(LexiconError::EmptyUri { row: row_no + 1 });
        }
        let language = Language::parse(&row.lang)
            .ok_or_else(|| LexiconError::UnknownLanguage { uri: uri.clone(), lang: row.lang.clone() })?;
        let parent = Some(row.parent_uri.trim()).filter(|p| !p.is_empty()).map(str::to_string);
        let class = row.class.trim().to_string();

        let entry = entries.entry(uri.clone()).or_insert_with(|| ConceptEntry {
            uri: uri.clone(),
            class_name: class.clone(),
            labels: Vec::new(),
            parent_uri: parent.clone(),
        });
        if entry.class_name != class {
            return Err(LexiconError::DuplicateUri {
                uri,
                detail: format!("class {:?} conflicts with {:?}", class, entry.class_name),
            });
        }
        if entry.parent_uri != parent {
            return Err(LexiconError::DuplicateUri {
                uri,
                detail: format!("parent {:?} conflicts with {:?}", parent, entry.parent_uri),
            });
        }

        let preferred = parse_flag(&row.preferred);
        for (k, text) in row.label.split('|').map(str::trim).enumerate() {
            if text.is_empty() {
                return Err(LexiconError::EmptyLabel { uri });
            }
            let duplicate = entry.labels.iter().any(|l| l.language == language && l.text == text);
            if duplicate {
                return Err(LexiconError::DuplicateUri {
                    uri,
                    detail: format!("label {text:?} ({}) defined twice", language.as_str()),
                });
            }
            entry.labels.push(Label { language, text: text.to_string(), preferred: preferred && k == 0 });
        }
    }

    for entry in entries.values() {
        if !entry.labels.iter().any(|l| l.language == Language::En) {
            return Err(LexiconError::MissingEnglishLabel { uri: entry.uri.clone() });
        }
        if let Some(parent) = &entry.parent_uri {
            if !entries.contains_key(parent) {
                return Err(LexiconError::DanglingParent { uri: entry.uri.clone(), parent: parent.clone() });
            }
        }
    }

    for entry in entries.values() {
        let mut current = entry.parent_uri.as_deref();
        let mut steps = 0;
        while let Some(uri) = current {
            if uri == entry.uri || steps > entries.len() {
                return Err(LexiconError::CyclicHierarchy { uri: entry.uri.clone() });
            }
            current = entries[uri].parent_uri.as_deref();
            steps += 1;
        }
    }

    let mut label_index: HashMap<Vec<String>, (String, usize)> = HashMap::new();
    let mut max_label_tokens = 0;
    for entry in entries.values() {
        for (idx, label) in entry.labels.iter().enumerate() {
            let key = label_key(&label.text);
            if key.is_empty() {
                return Err(LexiconError::EmptyLabel { uri: entry.uri.clone() });
            }
            if let Some((other, _)) = label_index.get(&key) {
                if *other != entry.uri {
                    return Err(LexiconError::AmbiguousLabel {
                        label: label.text.clone(),
                        uri: entry.uri.clone(),
                        other: other.clone(),
                    });
                }
                continue;
            }
            max_label_tokens = max_label_tokens.max(key.len());
            label_index.insert(key, (entry.uri.clone(), idx));
        }
    }

    Ok(Lexicon { entries, label_index, max_label_tokens })
}
