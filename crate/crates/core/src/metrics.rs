//! Evaluation: example-based accuracy, macro F1, Hamming loss, cross-dataset
//! averages, min-max normalisation across algorithms, and timing.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Ground truth and predictions for the same instances.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    truth: Matrix<u8>,
    predicted: Matrix<u8>,
}

impl PredictionSet {
    pub fn new(truth: Matrix<u8>, predicted: Matrix<u8>) -> Result<Self> {
        if truth.rows() != predicted.rows() || truth.cols() != predicted.cols() {
            return Err(Error::InvalidArgument(format!(
                "truth is {}x{} but predictions are {}x{}",
                truth.rows(),
                truth.cols(),
                predicted.rows(),
                predicted.cols()
            )));
        }
        if truth.rows() == 0 || truth.cols() == 0 {
            return Err(Error::InvalidArgument("empty prediction set".into()));
        }
        if truth
            .as_slice()
            .iter()
            .chain(predicted.as_slice())
            .any(|&v| v > 1)
        {
            return Err(Error::InvalidArgument("label values must be 0/1".into()));
        }
        Ok(Self { truth, predicted })
    }

    pub fn truth(&self) -> &Matrix<u8> {
        &self.truth
    }

    pub fn predicted(&self) -> &Matrix<u8> {
        &self.predicted
    }

    fn n(&self) -> usize {
        self.truth.rows()
    }

    fn q(&self) -> usize {
        self.truth.cols()
    }

    fn pairs(&self, i: usize) -> impl Iterator<Item = (u8, u8)> + '_ {
        self.truth
            .row(i)
            .iter()
            .copied()
            .zip(self.predicted.row(i).iter().copied())
    }
}

/// Mean per-instance Jaccard index; an instance with no true and no predicted
/// labels scores 1.
pub fn example_accuracy(p: &PredictionSet) -> f64 {
    let total: f64 = (0..p.n())
        .map(|i| {
            let (mut inter, mut union) = (0usize, 0usize);
            for (t, y) in p.pairs(i) {
                inter += usize::from(t & y);
                union += usize::from(t | y);
            }
            if union == 0 {
                1.0
            } else {
                inter as f64 / union as f64
            }
        })
        .sum();
    total / p.n() as f64
}

fn f1_term(tp: usize, truth: usize, pred: usize) -> f64 {
    if truth == 0 && pred == 0 {
        return 1.0;
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let (prec, rec) = (ratio(tp, truth), ratio(tp, pred));
    if prec + rec == 0.0 {
        0.0
    } else {
        2.0 * prec * rec / (prec + rec)
    }
}

/// F1 computed per label over instances, then averaged over labels.
///
/// A label that is neither present nor predicted anywhere contributes 1.
pub fn macro_f1(p: &PredictionSet) -> f64 {
    let q = p.q();
    let mut tp = vec![0usize; q];
    let mut truth = vec![0usize; q];
    let mut pred = vec![0usize; q];
    for i in 0..p.n() {
        for (j, (t, y)) in p.pairs(i).enumerate() {
            tp[j] += usize::from(t & y);
            truth[j] += usize::from(t);
            pred[j] += usize::from(y);
        }
    }
    (0..q)
        .map(|j| f1_term(tp[j], truth[j], pred[j]))
        .sum::<f64>()
        / q as f64
}

/// F1 computed per instance over labels, then averaged over instances.
pub fn example_f1(p: &PredictionSet) -> f64 {
    let total: f64 = (0..p.n())
        .map(|i| {
            let (mut tp, mut t_count, mut p_count) = (0, 0, 0);
            for (t, y) in p.pairs(i) {
                tp += usize::from(t & y);
                t_count += usize::from(t);
                p_count += usize::from(y);
            }
            f1_term(tp, t_count, p_count)
        })
        .sum();
    total / p.n() as f64
}

/// Fraction of label slots predicted wrongly.
pub fn hamming_loss(p: &PredictionSet) -> f64 {
    let wrong: usize = (0..p.n())
        .map(|i| p.pairs(i).filter(|(t, y)| t != y).count())
        .sum();
    wrong as f64 / (p.n() * p.q()) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub f1: f64,
    pub hamming_loss: f64,
    pub wall_time_seconds: f64,
}

impl MetricsReport {
    pub fn evaluate(p: &PredictionSet, wall_time_seconds: f64) -> Self {
        Self {
            accuracy: example_accuracy(p),
            f1: macro_f1(p),
            hamming_loss: hamming_loss(p),
            wall_time_seconds,
        }
    }
}

/// Unweighted means over datasets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub avg_accuracy: f64,
    pub avg_f1: f64,
    pub avg_hloss: f64,
    pub avg_time: f64,
}

pub fn aggregate(reports: &[MetricsReport]) -> Result<Averages> {
    if reports.is_empty() {
        return Err(Error::InvalidArgument("nothing to aggregate".into()));
    }
    let n = reports.len() as f64;
    let mean = |f: fn(&MetricsReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    Ok(Averages {
        avg_accuracy: mean(|r| r.accuracy),
        avg_f1: mean(|r| r.f1),
        avg_hloss: mean(|r| r.hamming_loss),
        avg_time: mean(|r| r.wall_time_seconds),
    })
}

/// Min-max normalised averages. Hamming loss keeps its direction: lower is better.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalized {
    pub time: f64,
    pub accuracy: f64,
    pub f1: f64,
    pub hloss: f64,
}

/// `(v - min) / (max - min)` for each value; all zeros (and `true`) when max = min.
pub fn min_max(values: &[f64]) -> (Vec<f64>, bool) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return (vec![0.0; values.len()], true);
    }
    (
        values.iter().map(|v| (v - min) / (max - min)).collect(),
        false,
    )
}

/// Results of several algorithms over several datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub algorithms: Vec<String>,
    pub datasets: Vec<String>,
    /// `cells[algorithm][dataset]`.
    pub cells: BTreeMap<String, BTreeMap<String, MetricsReport>>,
    pub averages: BTreeMap<String, Averages>,
    pub normalized: BTreeMap<String, Normalized>,
    /// Quantities whose spread across algorithms was zero, so every normalised value is 0.
    pub degenerate: Vec<String>,
}

impl BenchTable {
    /// Builds the table and its averages; call [`normalize`] for the normalised columns.
    pub fn new(
        algorithms: Vec<String>,
        datasets: Vec<String>,
        cells: BTreeMap<String, BTreeMap<String, MetricsReport>>,
    ) -> Result<Self> {
        let mut averages = BTreeMap::new();
        for alg in &algorithms {
            let reports: Vec<MetricsReport> = datasets
                .iter()
                .map(|d| {
                    cells
                        .get(alg)
                        .and_then(|row| row.get(d))
                        .copied()
                        .ok_or_else(|| Error::InvalidArgument(format!("missing cell ({alg}, {d})")))
                })
                .collect::<Result<_>>()?;
            averages.insert(alg.clone(), aggregate(&reports)?);
        }
        Ok(Self {
            algorithms,
            datasets,
            cells,
            averages,
            normalized: BTreeMap::new(),
            degenerate: Vec::new(),
        })
    }

    pub fn cell(&self, algorithm: &str, dataset: &str) -> Option<&MetricsReport> {
        self.cells.get(algorithm)?.get(dataset)
    }
}

pub fn normalize(mut bench: BenchTable) -> Result<BenchTable> {
    if bench.algorithms.len() < 2 {
        return Err(Error::InvalidArgument(
            "normalisation needs at least 2 algorithms".into(),
        ));
    }
    let column = |f: fn(&Averages) -> f64| -> Vec<f64> {
        bench
            .algorithms
            .iter()
            .map(|a| f(&bench.averages[a]))
            .collect()
    };
    let (time, dt) = min_max(&column(|a| a.avg_time));
    let (acc, da) = min_max(&column(|a| a.avg_accuracy));
    let (f1, df) = min_max(&column(|a| a.avg_f1));
    let (hl, dh) = min_max(&column(|a| a.avg_hloss));
    bench.degenerate = [("time", dt), ("accuracy", da), ("f1", df), ("hloss", dh)]
        .iter()
        .filter(|(_, d)| *d)
        .map(|(n, _)| n.to_string())
        .collect();
    bench.normalized = bench
        .algorithms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            (
                a.clone(),
                Normalized {
                    time: time[i],
                    accuracy: acc[i],
                    f1: f1[i],
                    hloss: hl[i],
                },
            )
        })
        .collect();
    Ok(bench)
}

/// Runs `f` and returns its result with the elapsed monotonic wall time in seconds.
#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
pub fn timed<R>(f: impl FnOnce() -> R) -> (R, f64) {
    let start = std::time::Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

/// Browsers expose no monotonic clock to `std`; times are reported as 0.
#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
pub fn timed<R>(f: impl FnOnce() -> R) -> (R, f64) {
    (f(), 0.0)
}
