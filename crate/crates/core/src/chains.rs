//! Binary relevance, classifier chains and ensembles of classifier chains.

use std::path::Path;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::learner::{BinaryClassifier, BinaryModel, Learner};
use crate::matrix::Matrix;
use crate::ordering::{check_permutation, random_order, ChainOrder};
use crate::seed::{derive, rng_from_seed};

/// Version tag written into saved model documents.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// What a chain feeds into predecessor slots at prediction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Augmentation {
    /// Hard 0/1 predictions.
    #[default]
    Hard,
    /// Predicted probabilities.
    Soft,
}

pub trait MultiLabelPredictor {
    fn n_features(&self) -> usize;
    fn n_labels(&self) -> usize;

    /// 0/1 prediction for every label, in the dataset's label order.
    fn predict(&self, x: &[f64]) -> Result<Vec<u8>>;

    fn predict_all(&self, x: &Matrix<f64>) -> Result<Matrix<u8>> {
        let mut out = Matrix::zeros(x.rows(), self.n_labels());
        for r in 0..x.rows() {
            out.row_mut(r).copy_from_slice(&self.predict(x.row(r))?);
        }
        Ok(out)
    }
}

fn check_width(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(Error::WidthMismatch {
            expected,
            got: x.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedChain<M = BinaryModel> {
    pub order: ChainOrder,
    /// `models[c]` predicts label `order.order[c]` from the features followed
    /// by the `c` preceding labels in chain order.
    pub models: Vec<M>,
    pub label_names: Vec<String>,
    pub n_features: usize,
    #[serde(default)]
    pub augmentation: Augmentation,
}

/// Trains one model per chain position on the original features plus the
/// ground-truth values of the preceding labels.
pub fn train_cc<L: Learner>(
    d: &Dataset,
    order: &ChainOrder,
    learner: &L,
) -> Result<TrainedChain<L::Model>> {
    let q = d.n_labels();
    check_permutation(&order.order, q)?;
    let (n, k) = (d.n_instances(), d.n_features());
    let mut models = Vec::with_capacity(q);
    for (c, &label) in order.order.iter().enumerate() {
        let width = k + c;
        let mut x = Matrix::zeros(n, width);
        for i in 0..n {
            let row = x.row_mut(i);
            row[..k].copy_from_slice(d.features().row(i));
            for (slot, &prev) in order.order[..c].iter().enumerate() {
                row[k + slot] = f64::from(d.label(i, prev));
            }
        }
        let targets = d.labels().column(label);
        models.push(learner.fit(&x, &targets)?);
    }
    Ok(TrainedChain {
        order: order.clone(),
        models,
        label_names: d.label_names().to_vec(),
        n_features: k,
        augmentation: Augmentation::Hard,
    })
}

impl<M: BinaryClassifier> MultiLabelPredictor for TrainedChain<M> {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn n_labels(&self) -> usize {
        self.models.len()
    }

    fn predict(&self, x: &[f64]) -> Result<Vec<u8>> {
        check_width(self.n_features, x)?;
        let mut input = Vec::with_capacity(self.n_features + self.models.len());
        input.extend_from_slice(x);
        let mut out = vec![0u8; self.models.len()];
        for (model, &label) in self.models.iter().zip(&self.order.order) {
            let p = model.predict_proba(&input)?;
            let hard = u8::from(p >= 0.5);
            out[label] = hard;
            input.push(match self.augmentation {
                Augmentation::Hard => f64::from(hard),
                Augmentation::Soft => p,
            });
        }
        Ok(out)
    }
}

pub fn predict_cc<M: BinaryClassifier>(chain: &TrainedChain<M>, x: &[f64]) -> Result<Vec<u8>> {
    chain.predict(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedBr<M = BinaryModel> {
    pub models: Vec<M>,
    pub label_names: Vec<String>,
    pub n_features: usize,
}

/// One independent model per label on the raw features.
pub fn train_br<L: Learner>(d: &Dataset, learner: &L) -> Result<TrainedBr<L::Model>> {
    let models = (0..d.n_labels())
        .map(|j| learner.fit(d.features(), &d.labels().column(j)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrainedBr {
        models,
        label_names: d.label_names().to_vec(),
        n_features: d.n_features(),
    })
}

impl<M: BinaryClassifier> MultiLabelPredictor for TrainedBr<M> {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn n_labels(&self) -> usize {
        self.models.len()
    }

    fn predict(&self, x: &[f64]) -> Result<Vec<u8>> {
        check_width(self.n_features, x)?;
        self.models.iter().map(|m| m.predict_label(x)).collect()
    }
}

pub fn predict_br<M: BinaryClassifier>(br: &TrainedBr<M>, x: &[f64]) -> Result<Vec<u8>> {
    br.predict(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EccConfig {
    pub n_members: usize,
    /// Train each member on a full-size bootstrap resample.
    pub bootstrap: bool,
    pub vote_threshold: f64,
}

impl Default for EccConfig {
    fn default() -> Self {
        Self {
            n_members: 4,
            bootstrap: true,
            vote_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedEcc<M = BinaryModel> {
    pub members: Vec<TrainedChain<M>>,
    /// Per-member seeds derived from the master seed.
    pub seeds: Vec<u64>,
    pub vote_threshold: f64,
}

/// Seed of ensemble member `e`. Its chain order uses `derive(s, 0)` and its
/// bootstrap sample `derive(s, 1)`.
pub fn ecc_member_seed(seed: u64, e: usize) -> u64 {
    derive(seed, e as u64)
}

/// `n` draws with replacement from `0..n`.
pub fn bootstrap_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

pub fn train_ecc<L: Learner>(
    d: &Dataset,
    cfg: &EccConfig,
    learner: &L,
    seed: u64,
) -> Result<TrainedEcc<L::Model>> {
    if cfg.n_members == 0 {
        return Err(Error::InvalidArgument(
            "ECC needs at least one member".into(),
        ));
    }
    let mut members = Vec::with_capacity(cfg.n_members);
    let mut seeds = Vec::with_capacity(cfg.n_members);
    for e in 0..cfg.n_members {
        let s = ecc_member_seed(seed, e);
        let order = random_order(d.n_labels(), derive(s, 0))?;
        let chain = if cfg.bootstrap {
            let sample = d.subset(&bootstrap_indices(d.n_instances(), derive(s, 1)))?;
            train_cc(&sample, &order, learner)?
        } else {
            train_cc(d, &order, learner)?
        };
        members.push(chain);
        seeds.push(s);
    }
    Ok(TrainedEcc {
        members,
        seeds,
        vote_threshold: cfg.vote_threshold,
    })
}

impl<M: BinaryClassifier> MultiLabelPredictor for TrainedEcc<M> {
    fn n_features(&self) -> usize {
        self.members[0].n_features
    }

    fn n_labels(&self) -> usize {
        self.members[0].models.len()
    }

    fn predict(&self, x: &[f64]) -> Result<Vec<u8>> {
        let mut votes = vec![0usize; self.n_labels()];
        for m in &self.members {
            for (v, p) in votes.iter_mut().zip(m.predict(x)?) {
                *v += usize::from(p);
            }
        }
        let total = self.members.len() as f64;
        Ok(votes
            .into_iter()
            .map(|v| u8::from(v as f64 / total >= self.vote_threshold))
            .collect())
    }
}

pub fn predict_ecc<M: BinaryClassifier>(ecc: &TrainedEcc<M>, x: &[f64]) -> Result<Vec<u8>> {
    ecc.predict(x)
}

/// Any trained multi-label model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrainedModel {
    Chain(TrainedChain),
    Br(TrainedBr),
    Ecc(TrainedEcc),
}

impl TrainedModel {
    pub fn label_names(&self) -> &[String] {
        match self {
            TrainedModel::Chain(c) => &c.label_names,
            TrainedModel::Br(b) => &b.label_names,
            TrainedModel::Ecc(e) => &e.members[0].label_names,
        }
    }
}

impl MultiLabelPredictor for TrainedModel {
    fn n_features(&self) -> usize {
        match self {
            TrainedModel::Chain(c) => c.n_features(),
            TrainedModel::Br(b) => b.n_features(),
            TrainedModel::Ecc(e) => e.n_features(),
        }
    }

    fn n_labels(&self) -> usize {
        match self {
            TrainedModel::Chain(c) => c.n_labels(),
            TrainedModel::Br(b) => b.n_labels(),
            TrainedModel::Ecc(e) => e.n_labels(),
        }
    }

    fn predict(&self, x: &[f64]) -> Result<Vec<u8>> {
        match self {
            TrainedModel::Chain(c) => c.predict(x),
            TrainedModel::Br(b) => b.predict(x),
            TrainedModel::Ecc(e) => e.predict(x),
        }
    }
}

/// Saved-model JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    pub model: TrainedModel,
}

impl ModelDocument {
    pub fn new(model: TrainedModel) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text)?;
        if doc.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported model format_version {}",
                doc.format_version
            )));
        }
        Ok(doc)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::{train_binary, LearnerConfig};

    fn fixture() -> Dataset {
        // label 1 copies label 0; label 0 follows the sign of feature 0
        let xs = [-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0];
        let features: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, 0.3 * x * x, 1.0]).collect();
        let labels: Vec<Vec<u8>> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let a = u8::from(x > 0.0);
                vec![a, a, (i % 2) as u8]
            })
            .collect();
        Dataset::from_rows("fx", &features, &labels).unwrap()
    }

    #[test]
    fn widths_grow_along_chain() {
        let d = fixture();
        let order = ChainOrder::given(vec![2, 0, 1]).unwrap();
        let chain = train_cc(&d, &order, &LearnerConfig::default()).unwrap();
        let widths: Vec<usize> = chain.models.iter().map(|m| m.input_width()).collect();
        assert_eq!(widths, vec![3, 4, 5]);
    }

    #[test]
    fn single_label_chain_is_plain_binary_model() {
        let base = fixture();
        let labels: Vec<Vec<u8>> = base
            .labels()
            .column(0)
            .into_iter()
            .map(|v| vec![v])
            .collect();
        let rows: Vec<Vec<f64>> = base.features().iter_rows().map(<[f64]>::to_vec).collect();
        let d1 = Dataset::from_rows("one", &rows, &labels).unwrap();
        let cfg = LearnerConfig::default();
        let chain = train_cc(&d1, &ChainOrder::given(vec![0]).unwrap(), &cfg).unwrap();
        let single = train_binary(d1.features(), &d1.labels().column(0), &cfg).unwrap();
        assert_eq!(chain.models[0], single);
        let br = train_br(&d1, &cfg).unwrap();
        for row in d1.features().iter_rows() {
            let p = chain.predict(row).unwrap();
            assert_eq!(p, vec![single.predict_label(row).unwrap()]);
            assert_eq!(p, br.predict(row).unwrap());
        }
    }

    #[test]
    fn copied_label_is_learned_from_predecessor_slot() {
        let d = fixture();
        let order = ChainOrder::given(vec![0, 1, 2]).unwrap();
        let chain = train_cc(&d, &order, &LearnerConfig::default()).unwrap();
        // training accuracy of the position-1 model with ground-truth inputs
        for i in 0..d.n_instances() {
            let mut x = d.features().row(i).to_vec();
            x.push(f64::from(d.label(i, 0)));
            assert_eq!(chain.models[1].predict_label(&x).unwrap(), d.label(i, 1));
        }
        for i in 0..d.n_instances() {
            let p = chain.predict(d.features().row(i)).unwrap();
            assert_eq!(p[0], p[1]);
            assert!(p.iter().all(|&v| v <= 1));
        }
    }

    #[test]
    fn order_mismatch_and_width_errors() {
        let d = fixture();
        let cfg = LearnerConfig::default();
        assert!(train_cc(&d, &ChainOrder::given(vec![0, 1]).unwrap(), &cfg).is_err());
        let chain = train_cc(&d, &ChainOrder::given(vec![0, 1, 2]).unwrap(), &cfg).unwrap();
        assert!(chain.predict(&[1.0]).is_err());
        let br = train_br(&d, &cfg).unwrap();
        assert!(br.predict(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn single_member_ecc_without_bootstrap_is_cc() {
        let d = fixture();
        let cfg = LearnerConfig::default();
        let ecc_cfg = EccConfig {
            n_members: 1,
            bootstrap: false,
            ..EccConfig::default()
        };
        let ecc = train_ecc(&d, &ecc_cfg, &cfg, 17).unwrap();
        let order = random_order(3, derive(ecc_member_seed(17, 0), 0)).unwrap();
        assert_eq!(ecc.members[0].order, order);
        let chain = train_cc(&d, &order, &cfg).unwrap();
        for row in d.features().iter_rows() {
            assert_eq!(ecc.predict(row).unwrap(), chain.predict(row).unwrap());
        }
    }

    #[test]
    fn default_ecc_has_four_distinct_seeds() {
        let d = fixture();
        let ecc = train_ecc(&d, &EccConfig::default(), &LearnerConfig::default(), 5).unwrap();
        assert_eq!(ecc.members.len(), 4);
        let mut s = ecc.seeds.clone();
        s.sort_unstable();
        s.dedup();
        assert_eq!(s.len(), 4);
        let again = train_ecc(&d, &EccConfig::default(), &LearnerConfig::default(), 5).unwrap();
        assert_eq!(ecc, again);
        assert_eq!(bootstrap_indices(20, 3), bootstrap_indices(20, 3));
    }

    #[test]
    fn vote_boundary_maps_to_one() {
        let d = fixture();
        let cfg = LearnerConfig::default();
        let order = ChainOrder::given(vec![0, 1, 2]).unwrap();
        let template = train_cc(&d, &order, &cfg).unwrap();
        // members that output constant 1 or constant 0 for every label
        let constant = |bias: f64| {
            let mut c = template.clone();
            for m in c.models.iter_mut() {
                *m = BinaryModel {
                    bias,
                    ..BinaryModel::zero(m.input_width())
                };
            }
            c
        };
        let ecc = TrainedEcc {
            members: vec![constant(5.0), constant(5.0), constant(-5.0), constant(-5.0)],
            seeds: vec![0, 1, 2, 3],
            vote_threshold: 0.5,
        };
        assert_eq!(ecc.predict(d.features().row(0)).unwrap(), vec![1, 1, 1]);
        let unanimous = TrainedEcc {
            members: vec![constant(-5.0); 4],
            ..ecc
        };
        assert_eq!(
            unanimous.predict(d.features().row(0)).unwrap(),
            vec![0, 0, 0]
        );
    }

    #[test]
    fn soft_augmentation_runs() {
        let d = fixture();
        let mut chain = train_cc(
            &d,
            &ChainOrder::given(vec![0, 1, 2]).unwrap(),
            &LearnerConfig::default(),
        )
        .unwrap();
        chain.augmentation = Augmentation::Soft;
        let p = chain.predict(d.features().row(7)).unwrap();
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn saved_document_round_trip_is_exact() {
        let d = fixture();
        let cfg = LearnerConfig::default();
        let ecc = train_ecc(&d, &EccConfig::default(), &cfg, 2).unwrap();
        let doc = ModelDocument::new(TrainedModel::Ecc(ecc));
        let back = ModelDocument::from_json(&doc.to_json().unwrap()).unwrap();
        assert_eq!(doc, back);
        let mut bad: serde_json::Value = serde_json::from_str(&doc.to_json().unwrap()).unwrap();
        bad["format_version"] = 99.into();
        assert!(ModelDocument::from_json(&bad.to_string()).is_err());
    }
}
