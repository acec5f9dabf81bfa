//! JSON run configuration.
//!
//! ```json
//! {
//!   "data": {"path": "heart.csv", "missing_values": ["?"], "exclude": ["num"]},
//!   "splitter": {"type": "kfold", "params": {"n_splits": 5}},
//!   "imputers": [
//!     {"id": "mean", "type": "simple", "params": {"strategy": "mean"}},
//!     {"id": "knn5", "type": "knn", "params": {"n_neighbors": 5}}
//!   ],
//!   "threshold": 0.9,
//!   "dependency_graph": {"auto": {"top_n": 8, "min_importance": 0.01}},
//!   "seed": 0
//! }
//! ```
//!
//! Unknown keys are rejected; errors carry the path of the offending key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::depgraph::{DependencyDict, GraphParams};
use crate::engine::{AssessOptions, Scorers};
use crate::error::{IqaError, Result};
use crate::imputers::{ImputerFamily, ImputerSpec};
use crate::stats::DEFAULT_ALPHA;
use crate::table::{ColumnKind, CsvOptions, DEFAULT_MISSING_TOKENS};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    /// Relative paths resolve against the config file's directory.
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default = "default_missing")]
    pub missing_values: Vec<String>,
    #[serde(default)]
    pub kinds: BTreeMap<String, ColumnKind>,
    /// Columns read but left out of the assessment, e.g. a label.
    #[serde(default)]
    pub exclude: Vec<String>,
}

fn default_missing() -> Vec<String> {
    DEFAULT_MISSING_TOKENS.iter().map(|s| s.to_string()).collect()
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            path: None,
            missing_values: default_missing(),
            kinds: BTreeMap::new(),
            exclude: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitterKind {
    Kfold,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitterParams {
    #[serde(default = "default_splits")]
    pub n_splits: usize,
    /// Defaults to the top-level seed.
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_splits() -> usize {
    5
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitterConfig {
    #[serde(rename = "type")]
    pub kind: SplitterKind,
    #[serde(default = "default_splitter_params")]
    pub params: SplitterParams,
}

fn default_splitter_params() -> SplitterParams {
    SplitterParams {
        n_splits: default_splits(),
        seed: None,
    }
}

impl Default for SplitterConfig {
    fn default() -> Self {
        SplitterConfig {
            kind: SplitterKind::Kfold,
            params: default_splitter_params(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DependencySource {
    /// Build the graph from the data.
    Auto(GraphParams),
    /// Read a dependency dictionary from a JSON file.
    Path(PathBuf),
    Inline(DependencyDict),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderKind {
    Label,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderConfig {
    #[serde(rename = "type")]
    pub kind: EncoderKind,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        EncoderConfig {
            kind: EncoderKind::Label,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub splitter: SplitterConfig,
    #[serde(default)]
    pub scorers: Scorers,
    pub imputers: Vec<ImputerSpec>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub dependency_graph: Option<DependencySource>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub encoder: EncoderConfig,
    /// Notes added during validation, e.g. an appended random imputer.
    #[serde(skip)]
    pub flags: Vec<String>,
}

fn default_version() -> u32 {
    CONFIG_SCHEMA_VERSION
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn schema_error(path: &str, message: impl Into<String>) -> IqaError {
    IqaError::Schema {
        path: path.to_string(),
        message: message.into(),
    }
}

impl Config {
    /// Minimal valid config for an imputer roster.
    pub fn with_imputers(imputers: Vec<ImputerSpec>) -> Result<Self> {
        let mut c = Config {
            schema_version: CONFIG_SCHEMA_VERSION,
            data: DataConfig::default(),
            splitter: SplitterConfig::default(),
            scorers: Scorers::default(),
            imputers,
            threshold: None,
            alpha: DEFAULT_ALPHA,
            dependency_graph: None,
            seed: 0,
            encoder: EncoderConfig::default(),
            flags: Vec::new(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut c: Config = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            schema_error(&path, e.inner().to_string())
        })?;
        c.validate()?;
        Ok(c)
    }

    /// Reads and validates a config file; a relative data path is resolved
    /// against the file's directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| IqaError::io(path, e))?;
        let mut c = Config::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(p) = &c.data.path {
            if p.is_relative() {
                c.data.path = Some(base.join(p));
            }
        }
        if let Some(DependencySource::Path(p)) = &c.dependency_graph {
            if p.is_relative() {
                c.dependency_graph = Some(DependencySource::Path(base.join(p)));
            }
        }
        Ok(c)
    }

    /// Checks ranges and fills derived defaults.
    pub fn validate(&mut self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(IqaError::VersionMismatch {
                found: self.schema_version,
                expected: CONFIG_SCHEMA_VERSION,
            });
        }
        if self.imputers.is_empty() {
            return Err(schema_error("imputers", "at least one imputer is required"));
        }
        for (i, s) in self.imputers.iter().enumerate() {
            if self.imputers[..i].iter().any(|o| o.id == s.id) {
                return Err(schema_error(&format!("imputers[{i}].id"), format!("duplicate id {:?}", s.id)));
            }
        }
        if let Some(tau) = self.threshold {
            if !(0.0..=1.0).contains(&tau) {
                return Err(schema_error("threshold", format!("{tau} is outside [0, 1]")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(schema_error("alpha", format!("{} is outside (0, 1)", self.alpha)));
        }
        if self.splitter.params.n_splits < 2 {
            return Err(schema_error("splitter.params.n_splits", "need at least 2 folds"));
        }
        match &self.dependency_graph {
            Some(DependencySource::Auto(g)) => {
                if !(g.holdout > 0.0 && g.holdout < 1.0) {
                    return Err(schema_error("dependency_graph.auto.holdout", "must be in (0, 1)"));
                }
                g.estimator
                    .validate()
                    .map_err(|e| schema_error("dependency_graph.auto.estimator", e.to_string()))?;
            }
            Some(DependencySource::Inline(d)) => {
                d.validate()
                    .map_err(|e| schema_error("dependency_graph.inline", e.to_string()))?;
            }
            _ => {}
        }
        if !self
            .imputers
            .iter()
            .any(|s| matches!(s.family, ImputerFamily::AppRandom))
        {
            let mut random = ImputerSpec::random();
            while self.imputers.iter().any(|s| s.id == random.id) {
                random.id.push('_');
            }
            self.imputers.push(random);
            if !self.flags.iter().any(|f| f == "random_imputer_appended") {
                self.flags.push("random_imputer_appended".into());
            }
        }
        Ok(())
    }

    pub fn csv_options(&self) -> CsvOptions {
        CsvOptions {
            missing_tokens: self.data.missing_values.clone(),
            kind_hints: self.data.kinds.clone(),
        }
    }

    pub fn split_seed(&self) -> u64 {
        self.splitter.params.seed.unwrap_or(self.seed)
    }

    /// Graph settings when the dependency graph is built from data.
    pub fn graph_params(&self) -> Option<GraphParams> {
        match &self.dependency_graph {
            Some(DependencySource::Auto(g)) => Some(GraphParams {
                seed: self.seed,
                ..g.clone()
            }),
            _ => None,
        }
    }

    pub fn assess_options(&self, dependencies: Option<DependencyDict>) -> AssessOptions {
        AssessOptions {
            imputers: self.imputers.clone(),
            n_splits: self.splitter.params.n_splits,
            split_seed: self.split_seed(),
            scorers: self.scorers.clone(),
            threshold: self.threshold,
            alpha: self.alpha,
            dependencies,
            seed: self.seed,
        }
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serialises");
        hex::encode(Sha256::digest(bytes))
    }
}
