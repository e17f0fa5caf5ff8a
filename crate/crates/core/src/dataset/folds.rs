use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Assignment of every instance to one of `n_folds` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub n_folds: usize,
    pub seed: u64,
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    /// `(train, test)` instance indices for `fold`, both ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &f) in self.assignments.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (train, test)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_folds];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Seeded shuffle of `0..n` dealt round-robin into `n_folds` folds.
///
/// Only the instance count matters, so the plan for a dataset is unaffected by
/// its label values.
pub fn split_kfold(n: usize, n_folds: usize, seed: u64) -> Result<FoldPlan> {
    if n_folds < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 folds, got {n_folds}"
        )));
    }
    if n_folds > n {
        return Err(Error::InvalidArgument(format!(
            "{n_folds} folds requested for {n} instances"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng_from_seed(seed));
    let mut assignments = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        assignments[i] = pos % n_folds;
    }
    Ok(FoldPlan {
        n_folds,
        seed,
        assignments,
    })
}
