//! Run configuration for the benchmark harness: model list, sentence files,
//! store and output directories. TOML on disk; flags override.

use crate::bench::ModelSpec;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("referenced path does not exist: {0}")]
    MissingPath(PathBuf),
    #[error("config has no models")]
    NoModels,
}

/// Per-tier generation defaults. The CSG tier defaults to the selection
/// caps (depth 10, expansion 20).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenDefaults {
    pub max_expansion_per_symbol: u32,
    pub max_recursion_depth: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    /// Sentence files (JSON-lines with provenance or plain text), one per
    /// grammar, consumed by `bench run`.
    #[serde(default)]
    pub sentences: Vec<PathBuf>,
    pub store_dir: PathBuf,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub grammar_paths: Option<GrammarPaths>,
    #[serde(rename = "model", default)]
    pub models: Vec<ModelSpec>,
}

/// Overrides for the bundled grammar documents.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrammarPaths {
    pub cfg: Option<PathBuf>,
    pub ixg: Option<PathBuf>,
    pub csg: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let cfg: RunConfig = toml::from_str(&text)?;
        Ok(cfg)
    }

    /// Paths must exist at validation time; models must be present for
    /// bench runs.
    pub fn validate_for_bench(&self) -> Result<(), ConfigError> {
        if self.models.is_empty() {
            return Err(ConfigError::NoModels);
        }
        for p in &self.sentences {
            if !p.exists() {
                return Err(ConfigError::MissingPath(p.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_config() {
        let text = r#"
store_dir = "store"
out_dir = "out"
sentences = []

[[model]]
model_id = "mock-yes"
provider = "mock"
mock_p_yes = 1.0
mock_seed = 1
trials = 3
"#;
        let cfg: RunConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.models.len(), 1);
        assert_eq!(cfg.models[0].model_id, "mock-yes");
        assert_eq!(cfg.models[0].trials, 3);
        assert_eq!(cfg.models[0].temperature, 0.2);
        assert_eq!(cfg.models[0].max_output_tokens, Some(128));
    }

    #[test]
    fn no_models_fails_bench_validation() {
        let cfg: RunConfig = toml::from_str(
            "store_dir = \"s\"\nout_dir = \"o\"\n",
        )
        .unwrap();
        assert!(matches!(
            cfg.validate_for_bench(),
            Err(ConfigError::NoModels)
        ));
    }
}
