//! Synthetic datasets with a planted chain dependency between labels.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed::rng_from_seed;

/// Features are uniform on `[0, 1)`. Label 0 is `feature 0 > 0.5`; label `j`
/// copies label `j - 1` and is flipped with probability `noise`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantedChain {
    pub n: usize,
    pub q: usize,
    pub k: usize,
    pub noise: f64,
    pub seed: u64,
}

impl Default for PlantedChain {
    fn default() -> Self {
        Self {
            n: 600,
            q: 8,
            k: 4,
            noise: 0.1,
            seed: 0,
        }
    }
}

impl PlantedChain {
    pub fn generate(&self) -> Result<Dataset> {
        if self.n == 0 || self.q < 2 || self.k == 0 {
            return Err(Error::InvalidArgument(
                "planted chain needs n >= 1, q >= 2, k >= 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::InvalidArgument("noise must lie in [0, 1]".into()));
        }
        let mut rng = rng_from_seed(self.seed);
        let mut features = Matrix::zeros(self.n, self.k);
        let mut labels = Matrix::zeros(self.n, self.q);
        for i in 0..self.n {
            for c in 0..self.k {
                features.set(i, c, rng.gen::<f64>());
            }
            let mut y = u8::from(features.get(i, 0) > 0.5);
            labels.set(i, 0, y);
            for j in 1..self.q {
                if rng.gen::<f64>() < self.noise {
                    y ^= 1;
                }
                labels.set(i, j, y);
            }
        }
        Dataset::new(
            format!("planted-{}", self.seed),
            features,
            labels,
            (0..self.k).map(|c| format!("x{c}")).collect(),
            (0..self.q).map(|j| format!("y{j}")).collect(),
        )
    }
}
