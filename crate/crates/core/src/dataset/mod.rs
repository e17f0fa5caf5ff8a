//! Multi-label datasets: a real-valued feature matrix paired with a binary
//! label matrix, plus loaders for MULAN/MEKA-style ARFF and a plain CSV layout.

mod arff;
mod csv_io;
mod folds;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub use arff::{load_arff, parse_arff};
pub use csv_io::{load_csv, parse_csv, write_csv};
pub use folds::{split_kfold, FoldPlan};

/// Feature matrix (n × k) plus binary label matrix (n × q).
///
/// Immutable after construction. The constructor accepts any q ≥ 1 so that
/// single-label chains can be built programmatically; the file loaders and the
/// ordering routines require q ≥ 2.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    features: Matrix<f64>,
    labels: Matrix<u8>,
    feature_names: Vec<String>,
    label_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: Matrix<f64>,
        labels: Matrix<u8>,
        feature_names: Vec<String>,
        label_names: Vec<String>,
    ) -> Result<Self> {
        let n = features.rows();
        if n == 0 {
            return Err(Error::InvalidDataset("dataset has no instances".into()));
        }
        if labels.rows() != n {
            return Err(Error::InvalidDataset(format!(
                "feature rows ({n}) and label rows ({}) differ",
                labels.rows()
            )));
        }
        if features.cols() == 0 {
            return Err(Error::InvalidDataset("dataset has no features".into()));
        }
        if labels.cols() == 0 {
            return Err(Error::InvalidDataset("dataset has no labels".into()));
        }
        if feature_names.len() != features.cols() || label_names.len() != labels.cols() {
            return Err(Error::InvalidDataset(
                "name lists do not match matrix widths".into(),
            ));
        }
        for (r, row) in features.iter_rows().enumerate() {
            if let Some(c) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
        for row in labels.iter_rows() {
            if let Some(j) = row.iter().position(|&v| v > 1) {
                return Err(Error::InvalidLabel {
                    label: label_names[j].clone(),
                    value: row[j].to_string(),
                });
            }
        }
        Ok(Self {
            name: name.into(),
            features,
            labels,
            feature_names,
            label_names,
        })
    }

    /// Builds a dataset with generated names `f0..`, `l0..`.
    pub fn from_rows(
        name: impl Into<String>,
        features: &[Vec<f64>],
        labels: &[Vec<u8>],
    ) -> Result<Self> {
        let features = Matrix::from_rows(features)
            .ok_or_else(|| Error::InvalidDataset("ragged feature rows".into()))?;
        let labels = Matrix::from_rows(labels)
            .ok_or_else(|| Error::InvalidDataset("ragged label rows".into()))?;
        let feature_names = (0..features.cols()).map(|i| format!("f{i}")).collect();
        let label_names = (0..labels.cols()).map(|i| format!("l{i}")).collect();
        Self::new(name, features, labels, feature_names, label_names)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_instances(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn n_labels(&self) -> usize {
        self.labels.cols()
    }

    pub fn features(&self) -> &Matrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &Matrix<u8> {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    #[inline]
    pub fn label(&self, instance: usize, label: usize) -> u8 {
        self.labels.get(instance, label)
    }

    /// Dataset made of the given instances (repeats allowed, as in bootstrap samples).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.features.select_rows(indices),
            self.labels.select_rows(indices),
            self.feature_names.clone(),
            self.label_names.clone(),
        )
    }

    /// Same features and names, different label matrix.
    pub fn with_labels(&self, labels: Matrix<u8>) -> Result<Self> {
        Self::new(
            self.name.clone(),
            self.features.clone(),
            labels,
            self.feature_names.clone(),
            self.label_names.clone(),
        )
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub(crate) fn require_multi_label(&self) -> Result<()> {
        if self.n_labels() < 2 {
            return Err(Error::InvalidDataset(format!(
                "dataset `{}` has {} label(s); at least 2 are required",
                self.name,
                self.n_labels()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelStats {
    pub n: usize,
    pub k: usize,
    pub q: usize,
    /// Label cardinality: mean number of relevant labels per instance.
    pub lcard: f64,
}

pub fn label_stats(d: &Dataset) -> LabelStats {
    let total: u64 = d.labels().as_slice().iter().map(|&v| u64::from(v)).sum();
    LabelStats {
        n: d.n_instances(),
        k: d.n_features(),
        q: d.n_labels(),
        lcard: total as f64 / d.n_instances() as f64,
    }
}

/// On-disk dataset formats understood by [`load_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Arff,
    Csv,
}

impl DatasetFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "arff" => Some(Self::Arff),
            "csv" => Some(Self::Csv),
            _ => None,
        }
    }
}

/// Loads a dataset, picking the format from `format` or the file extension.
///
/// `labels` is the ARFF label spec (MEKA `-C` convention) or the CSV label count.
pub fn load_dataset(
    path: &Path,
    format: Option<DatasetFormat>,
    labels: Option<i64>,
) -> Result<Dataset> {
    let format = format
        .or_else(|| DatasetFormat::from_path(path))
        .ok_or_else(|| {
            Error::Config(format!(
                "cannot infer dataset format of {}; pass it explicitly",
                path.display()
            ))
        })?;
    match format {
        DatasetFormat::Arff => load_arff(path, labels),
        DatasetFormat::Csv => {
            let q = labels
                .ok_or_else(|| Error::Config("CSV datasets need an explicit label count".into()))?;
            if q <= 0 {
                return Err(Error::Config(format!(
                    "CSV label count must be positive, got {q}"
                )));
            }
            load_csv(path, q as usize)
        }
    }
}

pub(crate) fn dataset_name_from_path(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string()
}
