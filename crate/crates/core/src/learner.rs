//! Binary base classifiers.
//!
//! [`Learner`] and [`BinaryClassifier`] are the contract the chain trainers
//! depend on. The built-in implementation is L2-regularised logistic regression
//! fitted by full-batch gradient descent from a zero start, so training is
//! fully deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub trait BinaryClassifier {
    /// Number of inputs the model was trained on.
    fn input_width(&self) -> usize;

    /// Probability that the target is 1.
    fn predict_proba(&self, x: &[f64]) -> Result<f64>;

    /// 1 iff `predict_proba(x) >= 0.5`.
    fn predict_label(&self, x: &[f64]) -> Result<u8> {
        Ok(u8::from(self.predict_proba(x)? >= 0.5))
    }
}

pub trait Learner {
    type Model: BinaryClassifier;

    fn fit(&self, features: &Matrix<f64>, targets: &[u8]) -> Result<Self::Model>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearnerConfig {
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2: f64,
    /// Unused by the deterministic learner; kept so stochastic learners can share the config.
    pub seed: u64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            iterations: 200,
            l2: 1e-4,
            seed: 0,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be positive".into()));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::Config("l2 must be non-negative".into()));
        }
        Ok(())
    }
}

/// Logistic model over internally standardised inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Per-input training mean.
    pub means: Vec<f64>,
    /// Per-input training standard deviation; 0 marks a constant column,
    /// which is mapped to 0 after standardisation.
    pub scales: Vec<f64>,
    pub config: LearnerConfig,
}

impl BinaryModel {
    /// Model that always returns 0.5.
    pub fn zero(width: usize) -> Self {
        Self {
            weights: vec![0.0; width],
            bias: 0.0,
            means: vec![0.0; width],
            scales: vec![1.0; width],
            config: LearnerConfig::default(),
        }
    }

    fn score(&self, x: &[f64]) -> f64 {
        let mut z = self.bias;
        for (c, &v) in x.iter().enumerate() {
            z += self.weights[c] * standardize(v, self.means[c], self.scales[c]);
        }
        z
    }
}

impl BinaryClassifier for BinaryModel {
    fn input_width(&self) -> usize {
        self.weights.len()
    }

    fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.weights.len() {
            return Err(Error::WidthMismatch {
                expected: self.weights.len(),
                got: x.len(),
            });
        }
        Ok(sigmoid(self.score(x)))
    }
}

impl Learner for LearnerConfig {
    type Model = BinaryModel;

    fn fit(&self, features: &Matrix<f64>, targets: &[u8]) -> Result<BinaryModel> {
        train_binary(features, targets, self)
    }
}

#[inline]
fn standardize(v: f64, mean: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        (v - mean) / scale
    } else {
        0.0
    }
}

/// Numerically stable logistic function.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
#[inline]
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean regularised log-loss and its gradient at `params = [weights.., bias]`.
///
/// Loss: `(1/n) Σ [ln(1 + e^{z_i}) − y_i z_i] + (l2/2)‖w‖²`, with the bias
/// unregularised. `x` must already be standardised.
pub fn objective(x: &Matrix<f64>, y: &[u8], params: &[f64], l2: f64) -> (f64, Vec<f64>) {
    let w = x.cols();
    let n = x.rows() as f64;
    let (weights, bias) = (&params[..w], params[w]);
    let mut loss = 0.0;
    let mut grad = vec![0.0; w + 1];
    for (row, &t) in x.iter_rows().zip(y) {
        let z = bias + row.iter().zip(weights).map(|(a, b)| a * b).sum::<f64>();
        let t = f64::from(t);
        loss += softplus(z) - t * z;
        let r = sigmoid(z) - t;
        for (g, &v) in grad[..w].iter_mut().zip(row) {
            *g += r * v;
        }
        grad[w] += r;
    }
    loss /= n;
    for g in grad.iter_mut() {
        *g /= n;
    }
    loss += 0.5 * l2 * weights.iter().map(|v| v * v).sum::<f64>();
    for (g, &wt) in grad[..w].iter_mut().zip(weights) {
        *g += l2 * wt;
    }
    (loss, grad)
}

/// Column means and standard deviations (population form).
fn column_stats(x: &Matrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = x.rows() as f64;
    let mut means = vec![0.0; x.cols()];
    for row in x.iter_rows() {
        for (m, &v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in means.iter_mut() {
        *m /= n;
    }
    let mut var = vec![0.0; x.cols()];
    for row in x.iter_rows() {
        for ((s, &v), &m) in var.iter_mut().zip(row).zip(&means) {
            *s += (v - m) * (v - m);
        }
    }
    let scales = var
        .into_iter()
        .map(|s| {
            let sd = (s / n).sqrt();
            if sd > 1e-12 {
                sd
            } else {
                0.0
            }
        })
        .collect();
    (means, scales)
}

pub fn train_binary(
    features: &Matrix<f64>,
    targets: &[u8],
    cfg: &LearnerConfig,
) -> Result<BinaryModel> {
    train_binary_traced(features, targets, cfg).map(|(m, _)| m)
}

/// Like [`train_binary`], also returning the objective value before every step
/// and after the last one (`iterations + 1` entries).
pub fn train_binary_traced(
    features: &Matrix<f64>,
    targets: &[u8],
    cfg: &LearnerConfig,
) -> Result<(BinaryModel, Vec<f64>)> {
    cfg.validate()?;
    let (n, w) = (features.rows(), features.cols());
    if n == 0 || w == 0 {
        return Err(Error::InvalidArgument(
            "training needs at least one instance and one feature".into(),
        ));
    }
    if targets.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{n} feature rows but {} targets",
            targets.len()
        )));
    }
    if let Some(bad) = targets.iter().find(|&&t| t > 1) {
        return Err(Error::InvalidArgument(format!("target {bad} is not 0/1")));
    }
    for (r, row) in features.iter_rows().enumerate() {
        if let Some(c) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { row: r, col: c });
        }
    }

    let (means, scales) = column_stats(features);
    let mut std = features.clone();
    for r in 0..n {
        for (c, v) in std.row_mut(r).iter_mut().enumerate() {
            *v = standardize(*v, means[c], scales[c]);
        }
    }

    let mut params = vec![0.0; w + 1];
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    for _ in 0..cfg.iterations {
        let (loss, grad) = objective(&std, targets, &params, cfg.l2);
        trace.push(loss);
        for (p, g) in params.iter_mut().zip(&grad) {
            *p -= cfg.learning_rate * g;
        }
    }
    trace.push(objective(&std, targets, &params, cfg.l2).0);

    let bias = params.pop().expect("bias slot");
    Ok((
        BinaryModel {
            weights: params,
            bias,
            means,
            scales,
            config: *cfg,
        },
        trace,
    ))
}
