//! Independent reference implementations used by the integration and
//! acceptance tests. Everything here scans rows directly and shares no code
//! with the library's packed-bit routines.

#![allow(dead_code)]

use ccorder::{CrMatrix, Dataset, HeadPair, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_dataset(seed: u64, max_n: usize, max_q: usize) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let q = rng.gen_range(2..=max_q);
    let density: f64 = rng.gen_range(0.05..0.95);
    let features: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-1.0..1.0)]).collect();
    let labels: Vec<Vec<u8>> = (0..n)
        .map(|_| (0..q).map(|_| u8::from(rng.gen_bool(density))).collect())
        .collect();
    Dataset::from_rows(format!("rand-{seed}"), &features, &labels).unwrap()
}

/// Agreement count of labels `i` and `j`, by scanning every instance.
pub fn agreements(d: &Dataset, i: usize, j: usize) -> usize {
    let mut count = 0;
    for r in 0..d.n_instances() {
        let (a, b) = (d.labels().get(r, i), d.labels().get(r, j));
        if (a == 1 && b == 1) || (a == 0 && b == 0) {
            count += 1;
        }
    }
    count
}

pub fn cr_oracle(d: &Dataset) -> Vec<Vec<Option<f64>>> {
    let q = d.n_labels();
    let n = d.n_instances() as f64;
    (0..q)
        .map(|i| {
            (0..q)
                .map(|j| (i != j).then(|| agreements(d, i, j) as f64 / n))
                .collect()
        })
        .collect()
}

pub fn cr_equals_oracle(m: &CrMatrix, oracle: &[Vec<Option<f64>>]) -> bool {
    (0..m.q()).all(|i| (0..m.q()).all(|j| m.get(i, j) == oracle[i][j]))
}

/// Rows where every label in `context` is 1 (all rows for an empty context),
/// and how many of those also have `target` = 1.
fn conditional_counts(d: &Dataset, context: &[usize], target: usize) -> (usize, usize) {
    let (mut base, mut hit) = (0, 0);
    for r in 0..d.n_instances() {
        if context.iter().all(|&c| d.labels().get(r, c) == 1) {
            base += 1;
            if d.labels().get(r, target) == 1 {
                hit += 1;
            }
        }
    }
    (base, hit)
}

/// Smoothed conditional `|B ∩ S_target| / (|B| + 1)`.
pub fn conditional(d: &Dataset, context: &[usize], target: usize) -> f64 {
    let (base, hit) = conditional_counts(d, context, target);
    hit as f64 / (base as f64 + 1.0)
}

/// Greedy n-gram ordering recomputed from scratch at every step.
pub fn ngram_oracle(d: &Dataset, head: &HeadPair, n: usize) -> Vec<usize> {
    let q = d.n_labels();
    let mut order = vec![head.first, head.second];
    while order.len() < q {
        let window = (n - 1).min(order.len());
        let context: Vec<usize> = order[order.len() - window..].to_vec();
        let mut best: Option<usize> = None;
        let mut max = 0.0;
        for j in 0..q {
            if order.contains(&j) {
                continue;
            }
            let p = conditional(d, &context, j);
            if p > max {
                max = p;
                best = Some(j);
            }
        }
        let next = best.unwrap_or_else(|| {
            let last = *order.last().unwrap();
            let mut pick = None;
            let mut top = -1.0;
            for j in 0..q {
                if order.contains(&j) {
                    continue;
                }
                let v = agreements(d, last, j) as f64 / d.n_instances() as f64;
                if v > top {
                    top = v;
                    pick = Some(j);
                }
            }
            pick.unwrap()
        });
        order.push(next);
    }
    order
}

pub fn tocc_oracle(d: &Dataset, head: &HeadPair) -> Vec<usize> {
    ngram_oracle(d, head, 3)
}

/// Per-step exhaustive argmax over a CR row.
pub fn gocc_oracle(m: &CrMatrix, first: usize, second: usize) -> Vec<usize> {
    let q = m.q();
    let mut order = vec![first, second];
    while order.len() < q {
        let last = *order.last().unwrap();
        let candidates: Vec<usize> = (0..q).filter(|j| !order.contains(j)).collect();
        let best_value = candidates
            .iter()
            .map(|&j| m.get(last, j).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let pick = candidates
            .into_iter()
            .find(|&j| m.get(last, j).unwrap() == best_value)
            .unwrap();
        order.push(pick);
    }
    order
}

/// Metrics recomputed element by element with explicit set construction.
pub struct MetricOracle {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub hamming: f64,
}

pub fn metric_oracle(truth: &Matrix<u8>, pred: &Matrix<u8>) -> MetricOracle {
    let (n, q) = (truth.rows(), truth.cols());
    let mut acc_sum = 0.0;
    let mut wrong = 0usize;
    for i in 0..n {
        let y: Vec<usize> = (0..q).filter(|&j| truth.get(i, j) == 1).collect();
        let p: Vec<usize> = (0..q).filter(|&j| pred.get(i, j) == 1).collect();
        let inter = y.iter().filter(|j| p.contains(j)).count();
        let union = y.len() + p.len() - inter;
        acc_sum += if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        };
        wrong += (0..q)
            .filter(|&j| truth.get(i, j) != pred.get(i, j))
            .count();
    }
    let mut f1_sum = 0.0;
    for j in 0..q {
        let y: Vec<usize> = (0..n).filter(|&i| truth.get(i, j) == 1).collect();
        let p: Vec<usize> = (0..n).filter(|&i| pred.get(i, j) == 1).collect();
        let inter = y.iter().filter(|i| p.contains(i)).count();
        f1_sum += if y.is_empty() && p.is_empty() {
            1.0
        } else {
            let prec = if y.is_empty() {
                0.0
            } else {
                inter as f64 / y.len() as f64
            };
            let rec = if p.is_empty() {
                0.0
            } else {
                inter as f64 / p.len() as f64
            };
            if prec + rec == 0.0 {
                0.0
            } else {
                2.0 * prec * rec / (prec + rec)
            }
        };
    }
    MetricOracle {
        accuracy: acc_sum / n as f64,
        macro_f1: f1_sum / q as f64,
        hamming: wrong as f64 / (n * q) as f64,
    }
}

pub fn random_prediction_pair(seed: u64) -> (Matrix<u8>, Matrix<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..40);
    let q = rng.gen_range(1..10);
    let dt: f64 = rng.gen_range(0.0..1.0);
    let dp: f64 = rng.gen_range(0.0..1.0);
    let t: Vec<u8> = (0..n * q).map(|_| u8::from(rng.gen_bool(dt))).collect();
    let p: Vec<u8> = (0..n * q).map(|_| u8::from(rng.gen_bool(dp))).collect();
    (Matrix::from_vec(n, q, t), Matrix::from_vec(n, q, p))
}

pub fn five_label_fixture() -> CrMatrix {
    CrMatrix::from_values(&[
        vec![0.0, 0.255, 0.063, 0.045, 0.035],
        vec![0.255, 0.0, 0.232, 0.073, 0.063],
        vec![0.063, 0.232, 0.0, 0.246, 0.051],
        vec![0.045, 0.073, 0.246, 0.0, 0.135],
        vec![0.035, 0.063, 0.051, 0.135, 0.0],
    ])
    .unwrap()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    }
}

/// Cross-validated example accuracy of a classifier chain on `d` for each
/// order rule; each rule sees only the training part of every fold.
pub fn cv_chain_accuracy(
    d: &Dataset,
    n_folds: usize,
    seed: u64,
    order_of: impl Fn(&Dataset) -> ccorder::ChainOrder,
) -> f64 {
    use ccorder::{example_accuracy, train_cc, LearnerConfig, MultiLabelPredictor, PredictionSet};
    let plan = ccorder::split_kfold(d.n_instances(), n_folds, seed).unwrap();
    let mut total = 0.0;
    for f in 0..n_folds {
        let (tr, te) = plan.split(f);
        let (train, test) = (d.subset(&tr).unwrap(), d.subset(&te).unwrap());
        let chain = train_cc(&train, &order_of(&train), &LearnerConfig::default()).unwrap();
        let pred = chain.predict_all(test.features()).unwrap();
        total += example_accuracy(&PredictionSet::new(test.labels().clone(), pred).unwrap());
    }
    total / n_folds as f64
}

/// Per-seed accuracies on the planted generator: (tocc, gocc, random orders).
pub fn planted_accuracies(seed: u64, n_random: usize) -> (f64, f64, Vec<f64>) {
    use ccorder::seed::derive;
    use ccorder::synth::PlantedChain;
    use ccorder::{build_cr_matrix, determine_head, gocc_order, random_order, tocc_order};
    let d = PlantedChain {
        seed,
        ..PlantedChain::default()
    }
    .generate()
    .unwrap();
    let fold_seed = derive(seed, 1000);
    let tocc = cv_chain_accuracy(&d, 5, fold_seed, |t| {
        tocc_order(t, &determine_head(&build_cr_matrix(t).unwrap()).unwrap()).unwrap()
    });
    let gocc = cv_chain_accuracy(&d, 5, fold_seed, |t| {
        let m = build_cr_matrix(t).unwrap();
        gocc_order(&m, &determine_head(&m).unwrap()).unwrap()
    });
    let random = (0..n_random as u64)
        .map(|r| {
            let order = random_order(d.n_labels(), derive(seed, r)).unwrap();
            cv_chain_accuracy(&d, 5, fold_seed, |_| order.clone())
        })
        .collect();
    (tocc, gocc, random)
}
