use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IndexError, IndexOptions, IndexedSentence, Posting, RequirementIndex};

pub const FORMAT_VERSION: u32 = 1;

/// On-disk form of an index. Postings and lengths are stored for external
/// readers and checked against the records on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub format_version: u32,
    pub options: IndexOptions,
    pub records: Vec<IndexedSentence>,
    pub lengths: Vec<u32>,
    pub postings: BTreeMap<String, Vec<Posting>>,
}

impl Snapshot {
    pub fn of(index: &RequirementIndex) -> Snapshot {
        Snapshot {
            format_version: FORMAT_VERSION,
            options: index.options().clone(),
            records: index.search_all().into_iter().cloned().collect(),
            lengths: index.lengths().to_vec(),
            postings: index.postings().clone(),
        }
    }

    pub fn into_index(self) -> Result<RequirementIndex, IndexError> {
        if self.format_version != FORMAT_VERSION {
            return Err(IndexError::UnsupportedVersion { found: self.format_version, expected: FORMAT_VERSION });
        }
        let index = RequirementIndex::from_records(self.options, self.records)?;
        if index.lengths() != self.lengths.as_slice() || index.postings() != &self.postings {
            return Err(IndexError::Corrupt("postings do not match the records".into()));
        }
        Ok(index)
    }
}

/// Writes the snapshot through a temporary file and a rename, so readers
/// never see a partial file.
pub fn save_snapshot(index: &RequirementIndex, path: &Path) -> Result<(), IndexError> {
    let io = |source| IndexError::Io { path: path.display().to_string(), source };
    let json = serde_json::to_string_pretty(&Snapshot::of(index))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, json + "\n").map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

pub fn load_snapshot(path: &Path) -> Result<RequirementIndex, IndexError> {
    let text =
        fs::read_to_string(path).map_err(|source| IndexError::Io { path: path.display().to_string(), source })?;
    let snapshot: Snapshot = serde_json::from_str(&text)?;
    snapshot.into_index()
}
