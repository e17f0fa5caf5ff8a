use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chains::EccConfig;
use crate::dataset::{dataset_name_from_path, load_dataset, Dataset, DatasetFormat};
use crate::error::{Error, Result};
use crate::learner::LearnerConfig;

/// Multi-label algorithms the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Algorithm {
    /// Chain ordered greedily over the CR matrix.
    Gocc,
    /// Chain ordered by trigram conditionals.
    Tocc,
    /// Chain ordered by n-gram conditionals.
    Ngram(usize),
    /// Chain over a seeded random order.
    CcRandom,
    Br,
    Ecc,
}

impl Algorithm {
    /// Whether the algorithm trains a single chain whose order is recorded.
    pub fn has_order(&self) -> bool {
        !matches!(self, Algorithm::Br | Algorithm::Ecc)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Gocc => f.write_str("gocc"),
            Algorithm::Tocc => f.write_str("tocc"),
            Algorithm::Ngram(n) => write!(f, "ngram({n})"),
            Algorithm::CcRandom => f.write_str("cc_random"),
            Algorithm::Br => f.write_str("br"),
            Algorithm::Ecc => f.write_str("ecc"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let parsed = match s.as_str() {
            "gocc" => Some(Algorithm::Gocc),
            "tocc" => Some(Algorithm::Tocc),
            "cc_random" | "cc-random" | "cc" => Some(Algorithm::CcRandom),
            "br" => Some(Algorithm::Br),
            "ecc" => Some(Algorithm::Ecc),
            other => other
                .strip_prefix("ngram")
                .map(|rest| {
                    rest.trim_start_matches([':', '(', '='])
                        .trim_end_matches(')')
                })
                .and_then(|n| n.parse().ok())
                .filter(|&n: &usize| n >= 1)
                .map(Algorithm::Ngram),
        };
        parsed.ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

impl TryFrom<String> for Algorithm {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<DatasetFormat>,
    /// ARFF label spec (MEKA `-C` convention) or CSV label count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl DatasetSpec {
    pub fn display_name(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| dataset_name_from_path(&self.path))
    }

    /// Loads the dataset; relative paths resolve against `base`.
    pub fn load(&self, base: Option<&Path>) -> Result<Dataset> {
        let path = match base {
            Some(b) if self.path.is_relative() => b.join(&self.path),
            _ => self.path.clone(),
        };
        Ok(load_dataset(&path, self.format, self.labels)?.with_name(self.display_name()))
    }
}

fn default_folds() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub datasets: Vec<DatasetSpec>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_folds")]
    pub n_folds: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub learner: LearnerConfig,
    #[serde(default)]
    pub ecc: EccConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(algorithms: Vec<Algorithm>) -> Self {
        Self {
            datasets: Vec::new(),
            algorithms,
            n_folds: default_folds(),
            master_seed: 0,
            learner: LearnerConfig::default(),
            ecc: EccConfig::default(),
            output_dir: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks everything except the dataset list, which in-memory runs supply separately.
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms configured".into()));
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algorithms.len() {
            return Err(Error::Config("duplicate algorithm in config".into()));
        }
        if self.n_folds < 2 {
            return Err(Error::Config("n_folds must be at least 2".into()));
        }
        if self.ecc.n_members == 0 {
            return Err(Error::Config("ecc.n_members must be positive".into()));
        }
        self.learner.validate()
    }

    pub fn load_datasets(&self, base: Option<&Path>) -> Result<Vec<Dataset>> {
        if self.datasets.is_empty() {
            return Err(Error::Config("no datasets configured".into()));
        }
        self.datasets.iter().map(|s| s.load(base)).collect()
    }
}
