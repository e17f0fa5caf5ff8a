use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Algorithm, ExperimentConfig};
use crate::chains::{train_br, train_cc, train_ecc, EccConfig, MultiLabelPredictor, TrainedModel};
use crate::cooccurrence::{build_cr_matrix, determine_head};
use crate::dataset::{split_kfold, Dataset};
use crate::error::{Error, Result};
use crate::learner::LearnerConfig;
use crate::metrics::{normalize, timed, BenchTable, MetricsReport, PredictionSet};
use crate::ordering::{
    gocc_order, ngram_order, random_order, tocc_order, ChainOrder, ChainOrderRecord,
};
use crate::seed::{derive, derive_str};

pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Seed of the fold plan for a dataset.
pub fn fold_seed(master: u64, dataset: &str) -> u64 {
    derive_str(derive_str(master, "folds"), dataset)
}

/// Seed used by `algorithm` on `fold` of `dataset` (random orders, ECC members).
pub fn algorithm_seed(master: u64, dataset: &str, algorithm: Algorithm, fold: usize) -> u64 {
    let base = derive_str(derive_str(master, dataset), &algorithm.to_string());
    derive(base, fold as u64)
}

/// Chain order an algorithm uses on `train`; `None` for BR and ECC.
pub fn compute_order(
    train: &Dataset,
    algorithm: Algorithm,
    seed: u64,
) -> Result<Option<ChainOrder>> {
    let head = || -> Result<_> { determine_head(&build_cr_matrix(train)?) };
    Ok(match algorithm {
        Algorithm::Gocc => {
            let m = build_cr_matrix(train)?;
            Some(gocc_order(&m, &determine_head(&m)?)?)
        }
        Algorithm::Tocc => Some(tocc_order(train, &head()?)?),
        Algorithm::Ngram(n) => Some(ngram_order(train, &head()?, n)?),
        Algorithm::CcRandom => Some(random_order(train.n_labels(), seed)?),
        Algorithm::Br | Algorithm::Ecc => None,
    })
}

pub struct Fitted {
    pub model: TrainedModel,
    pub order: Option<ChainOrder>,
    pub order_seconds: f64,
    pub train_seconds: f64,
}

/// Computes the order (if any) and trains `algorithm` on `train`.
pub fn fit_algorithm(
    train: &Dataset,
    algorithm: Algorithm,
    learner: &LearnerConfig,
    ecc: &EccConfig,
    seed: u64,
) -> Result<Fitted> {
    train.require_multi_label()?;
    let (order, order_seconds) = timed(|| compute_order(train, algorithm, seed));
    let order = order?;
    let (model, train_seconds) = timed(|| -> Result<TrainedModel> {
        Ok(match (&order, algorithm) {
            (Some(o), _) => TrainedModel::Chain(train_cc(train, o, learner)?),
            (None, Algorithm::Br) => TrainedModel::Br(train_br(train, learner)?),
            (None, _) => TrainedModel::Ecc(train_ecc(train, ecc, learner, seed)?),
        })
    });
    Ok(Fitted {
        model: model?,
        order,
        order_seconds,
        train_seconds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// `wall_time_seconds` is `order_seconds + train_predict_seconds`.
    pub metrics: MetricsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<ChainOrderRecord>,
    pub order_seconds: f64,
    pub train_predict_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub dataset: String,
    pub algorithm: Algorithm,
    pub folds: Vec<FoldResult>,
    /// Fold means of the quality metrics; `wall_time_seconds` is the total over folds.
    pub summary: MetricsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: u32,
    pub created_at: String,
    pub config: ExperimentConfig,
    pub fold_seeds: BTreeMap<String, u64>,
    pub cells: Vec<CellResult>,
}

impl RunReport {
    pub fn cell(&self, dataset: &str, algorithm: Algorithm) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.dataset == dataset && c.algorithm == algorithm)
    }
}

#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339()
}

#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
fn now_rfc3339() -> String {
    String::new()
}

fn check_datasets(datasets: &[Dataset], cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate()?;
    if datasets.is_empty() {
        return Err(Error::Config("no datasets to evaluate".into()));
    }
    let mut names = BTreeSet::new();
    for d in datasets {
        if !names.insert(d.name()) {
            return Err(Error::Config(format!(
                "duplicate dataset name `{}`",
                d.name()
            )));
        }
        d.require_multi_label()?;
        if d.n_instances() < cfg.n_folds {
            return Err(Error::InvalidDataset(format!(
                "dataset `{}` has fewer instances than folds",
                d.name()
            )));
        }
    }
    Ok(())
}

fn run_cell(d: &Dataset, algorithm: Algorithm, cfg: &ExperimentConfig) -> Result<CellResult> {
    let plan = split_kfold(
        d.n_instances(),
        cfg.n_folds,
        fold_seed(cfg.master_seed, d.name()),
    )?;
    let mut folds = Vec::with_capacity(cfg.n_folds);
    for f in 0..cfg.n_folds {
        let (train_idx, test_idx) = plan.split(f);
        let train = d.subset(&train_idx)?;
        let test = d.subset(&test_idx)?;
        let seed = algorithm_seed(cfg.master_seed, d.name(), algorithm, f);
        let fitted = fit_algorithm(&train, algorithm, &cfg.learner, &cfg.ecc, seed)?;
        let (predicted, predict_seconds) = timed(|| fitted.model.predict_all(test.features()));
        let predictions = PredictionSet::new(test.labels().clone(), predicted?)?;
        let train_predict_seconds = fitted.train_seconds + predict_seconds;
        folds.push(FoldResult {
            fold: f,
            n_train: train.n_instances(),
            n_test: test.n_instances(),
            metrics: MetricsReport::evaluate(
                &predictions,
                fitted.order_seconds + train_predict_seconds,
            ),
            order: fitted.order.as_ref().map(|o| o.record(d.label_names())),
            order_seconds: fitted.order_seconds,
            train_predict_seconds,
        });
    }
    let k = folds.len() as f64;
    let mean = |f: fn(&MetricsReport) -> f64| folds.iter().map(|r| f(&r.metrics)).sum::<f64>() / k;
    let summary = MetricsReport {
        accuracy: mean(|m| m.accuracy),
        f1: mean(|m| m.f1),
        hamming_loss: mean(|m| m.hamming_loss),
        wall_time_seconds: folds.iter().map(|r| r.metrics.wall_time_seconds).sum(),
    };
    Ok(CellResult {
        dataset: d.name().to_string(),
        algorithm,
        folds,
        summary,
    })
}

/// Cross-validates every configured algorithm on in-memory datasets.
///
/// Orders and models of each fold are built from that fold's training
/// instances only.
pub fn run_cv_on(datasets: &[Dataset], cfg: &ExperimentConfig) -> Result<RunReport> {
    check_datasets(datasets, cfg)?;
    let mut cells = Vec::new();
    let mut fold_seeds = BTreeMap::new();
    for d in datasets {
        fold_seeds.insert(d.name().to_string(), fold_seed(cfg.master_seed, d.name()));
        for &alg in &cfg.algorithms {
            cells.push(run_cell(d, alg, cfg)?);
        }
    }
    Ok(RunReport {
        format_version: REPORT_FORMAT_VERSION,
        created_at: now_rfc3339(),
        config: cfg.clone(),
        fold_seeds,
        cells,
    })
}

/// Loads the configured datasets (relative paths against `base`) and runs [`run_cv_on`].
pub fn run_cv(cfg: &ExperimentConfig, base: Option<&Path>) -> Result<RunReport> {
    cfg.validate()?;
    run_cv_on(&cfg.load_datasets(base)?, cfg)
}

/// Table of fold-averaged results; normalised columns are filled when at
/// least two algorithms ran.
pub fn bench_table(report: &RunReport) -> Result<BenchTable> {
    let algorithms: Vec<String> = report
        .config
        .algorithms
        .iter()
        .map(|a| a.to_string())
        .collect();
    let mut datasets: Vec<String> = Vec::new();
    let mut cells: BTreeMap<String, BTreeMap<String, MetricsReport>> = BTreeMap::new();
    for c in &report.cells {
        if !datasets.contains(&c.dataset) {
            datasets.push(c.dataset.clone());
        }
        cells
            .entry(c.algorithm.to_string())
            .or_default()
            .insert(c.dataset.clone(), c.summary);
    }
    let table = BenchTable::new(algorithms, datasets, cells)?;
    if table.algorithms.len() >= 2 {
        normalize(table)
    } else {
        Ok(table)
    }
}

pub fn run_bench_on(
    datasets: &[Dataset],
    cfg: &ExperimentConfig,
) -> Result<(BenchTable, RunReport)> {
    let report = run_cv_on(datasets, cfg)?;
    Ok((bench_table(&report)?, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub dataset: String,
    pub n: usize,
    pub accuracy: f64,
    pub f1: f64,
    pub hamming_loss: f64,
}

/// Cross-validated n-gram ordered chains for each `n`; one row per (dataset, n).
pub fn run_nsweep_on(
    datasets: &[Dataset],
    cfg: &ExperimentConfig,
    n_values: &[usize],
) -> Result<(Vec<SweepRow>, RunReport)> {
    if n_values.is_empty() || n_values.contains(&0) {
        return Err(Error::Config(
            "n values must be a non-empty list of integers >= 1".into(),
        ));
    }
    let mut sweep_cfg = cfg.clone();
    sweep_cfg.algorithms = n_values.iter().map(|&n| Algorithm::Ngram(n)).collect();
    let report = run_cv_on(datasets, &sweep_cfg)?;
    let mut rows = Vec::new();
    for d in datasets {
        for &n in n_values {
            let cell = report
                .cell(d.name(), Algorithm::Ngram(n))
                .expect("cell for every dataset and n");
            rows.push(SweepRow {
                dataset: d.name().to_string(),
                n,
                accuracy: cell.summary.accuracy,
                f1: cell.summary.f1,
                hamming_loss: cell.summary.hamming_loss,
            });
        }
    }
    Ok((rows, report))
}
