//! Label co-occurrence rate (CR) matrix and head-pair selection.
//!
//! `M[i][j]` is the fraction of instances on which labels `i` and `j` agree,
//! counting both joint presence and joint absence. The head pair of a chain is
//! the pair with the largest rate; ties and the orientation inside the pair are
//! settled by comparing each endpoint's best rate against the remaining labels.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Label columns packed into 64-bit words, one bit per instance.
#[derive(Debug, Clone)]
pub struct LabelBits {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl LabelBits {
    pub fn from_dataset(d: &Dataset) -> Self {
        let n = d.n_instances();
        let q = d.n_labels();
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; words * q];
        for i in 0..n {
            let row = d.labels().row(i);
            let (w, b) = (i / 64, i % 64);
            for (j, &v) in row.iter().enumerate() {
                if v == 1 {
                    bits[j * words + w] |= 1 << b;
                }
            }
        }
        Self { n, words, bits }
    }

    pub fn n_instances(&self) -> usize {
        self.n
    }

    pub fn n_labels(&self) -> usize {
        self.bits.len().checked_div(self.words).unwrap_or(0)
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[u64] {
        &self.bits[j * self.words..(j + 1) * self.words]
    }

    /// Instances where every listed label is 1; all instances for an empty list.
    pub fn all_of(&self, labels: &[usize]) -> Vec<u64> {
        let mut acc: Vec<u64> = match labels.first() {
            Some(&j) => self.column(j).to_vec(),
            None => self.full_mask(),
        };
        for &j in labels.iter().skip(1) {
            for (a, c) in acc.iter_mut().zip(self.column(j)) {
                *a &= c;
            }
        }
        acc
    }

    fn full_mask(&self) -> Vec<u64> {
        let mut mask = vec![u64::MAX; self.words];
        let tail = self.n % 64;
        if tail != 0 {
            if let Some(last) = mask.last_mut() {
                *last = (1u64 << tail) - 1;
            }
        }
        mask
    }

    /// Instances on which labels `i` and `j` take the same value.
    #[inline]
    pub fn agreements(&self, i: usize, j: usize) -> usize {
        let differing: u32 = self
            .column(i)
            .iter()
            .zip(self.column(j))
            .map(|(a, b)| (a ^ b).count_ones())
            .sum();
        self.n - differing as usize
    }

    /// Size of `mask ∩ column(j)`.
    #[inline]
    pub fn overlap(&self, mask: &[u64], j: usize) -> usize {
        mask.iter()
            .zip(self.column(j))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }
}

pub(crate) fn popcount(mask: &[u64]) -> usize {
    mask.iter().map(|w| w.count_ones() as usize).sum()
}

/// Symmetric q × q co-occurrence-rate matrix; the diagonal is undefined.
#[derive(Debug, Clone)]
pub struct CrMatrix {
    q: usize,
    values: Vec<f64>,
}

impl PartialEq for CrMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
            && (0..self.q).all(|i| (0..self.q).all(|j| self.get(i, j) == other.get(i, j)))
    }
}

impl CrMatrix {
    /// Wraps explicit values (for instance a published matrix). Diagonal
    /// entries are ignored.
    pub fn from_values(rows: &[Vec<f64>]) -> Result<Self> {
        let q = rows.len();
        if q < 2 || rows.iter().any(|r| r.len() != q) {
            return Err(Error::InvalidArgument(
                "CR matrix must be square with at least 2 labels".into(),
            ));
        }
        let mut values = vec![f64::NAN; q * q];
        for i in 0..q {
            for j in 0..q {
                if i == j {
                    continue;
                }
                let v = rows[i][j];
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidArgument(format!(
                        "CR value {v} at ({i},{j}) outside [0,1]"
                    )));
                }
                if v != rows[j][i] {
                    return Err(Error::InvalidArgument(format!(
                        "CR matrix not symmetric at ({i},{j})"
                    )));
                }
                values[i * q + j] = v;
            }
        }
        Ok(Self { q, values })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// `None` on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        (i != j).then(|| self.values[i * self.q + j])
    }

    /// Raw entry; NaN on the diagonal.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.q + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.q..(i + 1) * self.q]
    }

    /// Largest `M[a][r]` over `r ∉ {i, j}`; `None` when no such `r` exists.
    fn best_excluding(&self, a: usize, i: usize, j: usize) -> Option<f64> {
        (0..self.q)
            .filter(|&r| r != i && r != j)
            .map(|r| self.at(a, r))
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |m| m.max(v)))
            })
    }
}

#[derive(Serialize, Deserialize)]
struct CrMatrixJson {
    q: usize,
    values: Vec<Option<f64>>,
}

impl Serialize for CrMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CrMatrixJson {
            q: self.q,
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(idx, &v)| (idx / self.q != idx % self.q).then_some(v))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CrMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CrMatrixJson::deserialize(d)?;
        if raw.values.len() != raw.q * raw.q {
            return Err(serde::de::Error::custom("CR matrix value count mismatch"));
        }
        let rows: Vec<Vec<f64>> = raw
            .values
            .chunks(raw.q.max(1))
            .map(|r| r.iter().map(|v| v.unwrap_or(f64::NAN)).collect())
            .collect();
        CrMatrix::from_values(&rows).map_err(serde::de::Error::custom)
    }
}

/// Builds the CR matrix in O(n · q² / 64) via packed label columns.
pub fn build_cr_matrix(d: &Dataset) -> Result<CrMatrix> {
    d.require_multi_label()?;
    Ok(build_from_bits(&LabelBits::from_dataset(d)))
}

pub(crate) fn build_from_bits(bits: &LabelBits) -> CrMatrix {
    let q = bits.n_labels();
    let n = bits.n_instances() as f64;
    let mut values = vec![f64::NAN; q * q];
    for i in 0..q {
        for j in i + 1..q {
            let v = bits.agreements(i, j) as f64 / n;
            values[i * q + j] = v;
            values[j * q + i] = v;
        }
    }
    CrMatrix { q, values }
}

/// First two labels of a chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadPair {
    pub first: usize,
    pub second: usize,
    /// Every pair that attained the maximal rate (i < j).
    pub tied_candidates: Vec<(usize, usize)>,
    /// Set when q = 2: no third label exists, so the pair keeps index order.
    pub no_third_label: bool,
}

/// All pairs `(i, j)`, `i < j`, attaining the largest off-diagonal rate.
pub fn head_candidates(m: &CrMatrix) -> Vec<(usize, usize)> {
    let mut best = f64::NEG_INFINITY;
    let mut out = Vec::new();
    for i in 0..m.q() {
        for j in i + 1..m.q() {
            let v = m.at(i, j);
            if v > best {
                best = v;
                out.clear();
                out.push((i, j));
            } else if v == best {
                out.push((i, j));
            }
        }
    }
    out
}

/// Picks the head pair from the tied candidates `h` and orients it.
///
/// With several candidates, each pair is scored by the sum of its endpoints'
/// best rates against labels outside the pair; the highest score wins, then the
/// lexicographically smallest pair. Inside the winner, the endpoint with the
/// larger such best rate goes first (the smaller index on equality).
pub fn select_head_pair(m: &CrMatrix, h: &[(usize, usize)]) -> Result<HeadPair> {
    let mut candidates: Vec<(usize, usize)> =
        h.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
    candidates.sort_unstable();
    candidates.dedup();
    if candidates.is_empty() {
        return Err(Error::InvalidArgument("no head candidates".into()));
    }
    if let Some(&(i, j)) = candidates.iter().find(|&&(i, j)| i == j || j >= m.q()) {
        return Err(Error::InvalidArgument(format!(
            "invalid head candidate ({i},{j}) for {} labels",
            m.q()
        )));
    }

    if m.q() == 2 {
        let (i, j) = candidates[0];
        return Ok(HeadPair {
            first: i,
            second: j,
            tied_candidates: candidates,
            no_third_label: true,
        });
    }

    let ends = |i: usize, j: usize| {
        // q >= 3 guarantees a third label
        let bi = m.best_excluding(i, i, j).unwrap_or(f64::NEG_INFINITY);
        let bj = m.best_excluding(j, i, j).unwrap_or(f64::NEG_INFINITY);
        (bi, bj)
    };

    let mut winner = candidates[0];
    if candidates.len() > 1 {
        let (a, b) = ends(winner.0, winner.1);
        let mut best_score = a + b;
        for &(i, j) in &candidates[1..] {
            let (a, b) = ends(i, j);
            if a + b > best_score {
                best_score = a + b;
                winner = (i, j);
            }
        }
    }

    let (i, j) = winner;
    let (bi, bj) = ends(i, j);
    let (first, second) = if bi >= bj { (i, j) } else { (j, i) };
    Ok(HeadPair {
        first,
        second,
        tied_candidates: candidates,
        no_third_label: false,
    })
}

/// `select_head_pair(m, &head_candidates(m))`.
pub fn determine_head(m: &CrMatrix) -> Result<HeadPair> {
    select_head_pair(m, &head_candidates(m))
}
