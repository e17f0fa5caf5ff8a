//! Chain orders: greedy CR extension, trigram and general n-gram extension,
//! and seeded random permutations.
//!
//! All deterministic orderings start from a [`HeadPair`] and break every tie
//! toward the smallest label index.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::cooccurrence::{popcount, CrMatrix, HeadPair, LabelBits};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Guard against `ln(0)` in [`chain_log_probability`].
pub const LOG_PROB_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OrderMethod {
    Gocc,
    Tocc,
    Ngram { n: usize },
    Random { seed: u64 },
    Given,
}

impl OrderMethod {
    pub fn name(&self) -> &'static str {
        match self {
            OrderMethod::Gocc => "gocc",
            OrderMethod::Tocc => "tocc",
            OrderMethod::Ngram { .. } => "ngram",
            OrderMethod::Random { .. } => "random",
            OrderMethod::Given => "given",
        }
    }
}

/// A permutation of label indices; `order[c]` is the label at chain position `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainOrder {
    pub order: Vec<usize>,
    pub method: OrderMethod,
    pub head: Option<HeadPair>,
}

/// JSON form of a chain order with label names in chain order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainOrderRecord {
    pub method: String,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub order: Vec<String>,
}

impl ChainOrder {
    /// Wraps a caller-supplied permutation.
    pub fn given(order: Vec<usize>) -> Result<Self> {
        check_permutation(&order, order.len())?;
        Ok(Self {
            order,
            method: OrderMethod::Given,
            head: None,
        })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn is_permutation(&self) -> bool {
        check_permutation(&self.order, self.order.len()).is_ok()
    }

    pub fn record(&self, label_names: &[String]) -> ChainOrderRecord {
        let (n, seed) = match self.method {
            OrderMethod::Gocc => (None, None),
            OrderMethod::Tocc => (Some(3), None),
            OrderMethod::Ngram { n } => (Some(n), None),
            OrderMethod::Random { seed } => (None, Some(seed)),
            OrderMethod::Given => (None, None),
        };
        ChainOrderRecord {
            method: self.method.name().to_string(),
            n,
            seed,
            order: self
                .order
                .iter()
                .map(|&j| label_names.get(j).cloned().unwrap_or_else(|| j.to_string()))
                .collect(),
        }
    }
}

pub(crate) fn check_permutation(order: &[usize], q: usize) -> Result<()> {
    if order.len() != q {
        return Err(Error::InvalidArgument(format!(
            "order has {} entries for {q} labels",
            order.len()
        )));
    }
    let mut seen = vec![false; q];
    for &j in order {
        if j >= q || std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidArgument(format!(
                "order is not a permutation of 0..{q}"
            )));
        }
    }
    Ok(())
}

fn check_head(head: &HeadPair, q: usize) -> Result<()> {
    if head.first == head.second || head.first >= q || head.second >= q {
        return Err(Error::InvalidArgument(format!(
            "invalid head pair ({}, {}) for {q} labels",
            head.first, head.second
        )));
    }
    Ok(())
}

/// Unplaced label with the largest value of `score`; smallest index on ties.
/// `None` if nothing is unplaced.
fn argmax_unplaced(placed: &[bool], mut score: impl FnMut(usize) -> f64) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (j, _) in placed.iter().enumerate().filter(|(_, &p)| !p) {
        let v = score(j);
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((j, v));
        }
    }
    best
}

/// Greedy extension over the CR matrix: each next label is the unplaced one
/// with the largest rate against the label placed last.
pub fn gocc_order(m: &CrMatrix, head: &HeadPair) -> Result<ChainOrder> {
    let q = m.q();
    check_head(head, q)?;
    let mut order = vec![head.first, head.second];
    let mut placed = vec![false; q];
    placed[head.first] = true;
    placed[head.second] = true;
    while order.len() < q {
        let last = order[order.len() - 1];
        let (next, _) = argmax_unplaced(&placed, |j| m.at(last, j)).expect("unplaced label");
        placed[next] = true;
        order.push(next);
    }
    Ok(ChainOrder {
        order,
        method: OrderMethod::Gocc,
        head: Some(head.clone()),
    })
}

/// Extension by smoothed trigram conditionals.
///
/// With `a`, `b` the last two placed labels and `B` the instances where both
/// are relevant, each unplaced `j` scores `|B ∩ S_j| / (|B| + 1)`. When every
/// score is zero the CR rate against `b` decides instead.
pub fn tocc_order(d: &Dataset, head: &HeadPair) -> Result<ChainOrder> {
    let q = d.n_labels();
    d.require_multi_label()?;
    check_head(head, q)?;
    let bits = LabelBits::from_dataset(d);
    let n = bits.n_instances() as f64;
    let mut order = vec![head.first, head.second];
    let mut placed = vec![false; q];
    placed[head.first] = true;
    placed[head.second] = true;
    while order.len() < q {
        let a = order[order.len() - 2];
        let b = order[order.len() - 1];
        let both: Vec<u64> = bits
            .column(a)
            .iter()
            .zip(bits.column(b))
            .map(|(x, y)| x & y)
            .collect();
        let denom = (popcount(&both) + 1) as f64;
        let (mut next, p) = argmax_unplaced(&placed, |j| bits.overlap(&both, j) as f64 / denom)
            .expect("unplaced label");
        if p == 0.0 {
            next = argmax_unplaced(&placed, |j| bits.agreements(b, j) as f64 / n)
                .expect("unplaced label")
                .0;
        }
        placed[next] = true;
        order.push(next);
    }
    Ok(ChainOrder {
        order,
        method: OrderMethod::Tocc,
        head: Some(head.clone()),
    })
}

/// Generalized n-gram extension: conditions on the last `min(n - 1, placed)`
/// labels (all instances when `n = 1`). `n = 3` reproduces [`tocc_order`].
pub fn ngram_order(d: &Dataset, head: &HeadPair, n: usize) -> Result<ChainOrder> {
    if n < 1 {
        return Err(Error::InvalidArgument("n-gram order needs n >= 1".into()));
    }
    let q = d.n_labels();
    d.require_multi_label()?;
    check_head(head, q)?;
    let bits = LabelBits::from_dataset(d);
    let n_inst = bits.n_instances() as f64;
    let mut order = vec![head.first, head.second];
    let mut placed = vec![false; q];
    placed[head.first] = true;
    placed[head.second] = true;
    while order.len() < q {
        let window = (n - 1).min(order.len());
        let context = &order[order.len() - window..];
        let mask = bits.all_of(context);
        let denom = (popcount(&mask) + 1) as f64;
        let (mut next, p) = argmax_unplaced(&placed, |j| bits.overlap(&mask, j) as f64 / denom)
            .expect("unplaced label");
        if p == 0.0 {
            let last = order[order.len() - 1];
            next = argmax_unplaced(&placed, |j| bits.agreements(last, j) as f64 / n_inst)
                .expect("unplaced label")
                .0;
        }
        placed[next] = true;
        order.push(next);
    }
    Ok(ChainOrder {
        order,
        method: OrderMethod::Ngram { n },
        head: Some(head.clone()),
    })
}

/// Seeded uniform permutation of `0..q`.
pub fn random_order(q: usize, seed: u64) -> Result<ChainOrder> {
    if q == 0 {
        return Err(Error::InvalidArgument("random order needs q >= 1".into()));
    }
    let mut order: Vec<usize> = (0..q).collect();
    order.shuffle(&mut rng_from_seed(seed));
    Ok(ChainOrder {
        order,
        method: OrderMethod::Random { seed },
        head: None,
    })
}

/// Diagnostic score of an order under the smoothed n-gram model: the sum over
/// chain positions `c ≥ 2` of `ln(p_c + ε)`.
pub fn chain_log_probability(d: &Dataset, order: &ChainOrder, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "chain log-probability needs n >= 2".into(),
        ));
    }
    check_permutation(&order.order, d.n_labels())?;
    let bits = LabelBits::from_dataset(d);
    let mut total = 0.0;
    for c in 2..order.len() {
        let window = (n - 1).min(c);
        let mask = bits.all_of(&order.order[c - window..c]);
        let p = bits.overlap(&mask, order.order[c]) as f64 / (popcount(&mask) + 1) as f64;
        total += (p + LOG_PROB_EPSILON).ln();
    }
    Ok(total)
}
