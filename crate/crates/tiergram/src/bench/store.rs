//! Append-only trial store: one JSON line per trial in `trials.jsonl`.
//! Records are keyed by (model_id, sentence_id, trial_index); resuming a run
//! loads the key set and never re-queries a completed trial.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store io error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("corrupt record at line {line}: {reason}")]
    Corrupt { line: usize, reason: String },
}

/// One LM query outcome. `accepted` is derived from `raw_response` by
/// `parse_response` only; unparseable replies carry `accepted: None`.
/// Failed trials (retries exhausted) carry `failed: true` and are excluded
/// from statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub model_id: String,
    pub sentence_id: String,
    pub grammar_id: String,
    pub trial_index: u32,
    pub raw_response: String,
    pub accepted: Option<bool>,
    #[serde(default)]
    pub failed: bool,
    /// Unix epoch milliseconds.
    pub timestamp_ms: u64,
    pub latency_ms: u64,
    #[serde(default)]
    pub retries: u32,
}

impl TrialRecord {
    pub fn key(&self) -> (String, String, u32) {
        (
            self.model_id.clone(),
            self.sentence_id.clone(),
            self.trial_index,
        )
    }
}

pub struct TrialStore {
    path: PathBuf,
    file: File,
    keys: HashSet<(String, String, u32)>,
}

impl TrialStore {
    pub fn trials_path(dir: &Path) -> PathBuf {
        dir.join("trials.jsonl")
    }

    /// Open (creating the directory and file if needed) and index existing
    /// records for resume.
    pub fn open(dir: &Path) -> Result<TrialStore, StoreError> {
        fs::create_dir_all(dir).map_err(|e| StoreError::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
        let path = Self::trials_path(dir);
        let mut keys = HashSet::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path).map_err(|e| StoreError::Io {
                path: path.clone(),
                source: e,
            })?);
            for (i, line) in reader.lines().enumerate() {
                let line = line.map_err(|e| StoreError::Io {
                    path: path.clone(),
                    source: e,
                })?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: TrialRecord =
                    serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                        line: i + 1,
                        reason: e.to_string(),
                    })?;
                keys.insert(rec.key());
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| StoreError::Io {
                path: path.clone(),
                source: e,
            })?;
        Ok(TrialStore { path, file, keys })
    }

    pub fn contains(&self, model_id: &str, sentence_id: &str, trial_index: u32) -> bool {
        self.keys.contains(&(
            model_id.to_string(),
            sentence_id.to_string(),
            trial_index,
        ))
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Append one record and flush it to disk before returning.
    pub fn append(&mut self, rec: &TrialRecord) -> Result<(), StoreError> {
        let line = serde_json::to_string(rec).expect("record serializes");
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.write_all(b"\n"))
            .and_then(|_| self.file.flush())
            .map_err(|e| StoreError::Io {
                path: self.path.clone(),
                source: e,
            })?;
        self.keys.insert(rec.key());
        Ok(())
    }

    /// Read every record back (for statistics).
    pub fn read_all(dir: &Path) -> Result<Vec<TrialRecord>, StoreError> {
        let path = Self::trials_path(dir);
        let reader = BufReader::new(File::open(&path).map_err(|e| StoreError::Io {
            path: path.clone(),
            source: e,
        })?);
        let mut out = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| StoreError::Io {
                path: path.clone(),
                source: e,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(
                serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                    line: i + 1,
                    reason: e.to_string(),
                })?,
            );
        }
        Ok(out)
    }
}
