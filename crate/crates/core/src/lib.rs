//! Label-order optimisation for classifier chains.
//!
//! The pipeline has three phases: measure pairwise label co-occurrence
//! ([`cooccurrence`]), derive a chain order from it ([`ordering`]), then train
//! and evaluate chains over that order ([`chains`], [`metrics`]). [`harness`]
//! wires the phases into cross-validated benchmarks.

pub mod chains;
pub mod cooccurrence;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod learner;
pub mod matrix;
pub mod metrics;
pub mod ordering;
pub mod seed;
pub mod synth;

pub use chains::{
    predict_br, predict_cc, predict_ecc, train_br, train_cc, train_ecc, EccConfig, ModelDocument,
    MultiLabelPredictor, TrainedBr, TrainedChain, TrainedEcc, TrainedModel,
};
pub use cooccurrence::{
    build_cr_matrix, determine_head, head_candidates, select_head_pair, CrMatrix, HeadPair,
};
pub use dataset::{
    label_stats, load_arff, load_csv, load_dataset, split_kfold, Dataset, FoldPlan, LabelStats,
};
pub use error::{Error, Result};
pub use learner::{train_binary, BinaryClassifier, BinaryModel, Learner, LearnerConfig};
pub use matrix::Matrix;
pub use metrics::{example_accuracy, hamming_loss, macro_f1, MetricsReport, PredictionSet};
pub use ordering::{
    chain_log_probability, gocc_order, ngram_order, random_order, tocc_order, ChainOrder,
    OrderMethod,
};
