//! Banded dynamic time warping and nearest-neighbour voting.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Sakoe-Chiba band around the slope-normalised diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum Band {
    Unbounded,
    /// Fixed radius in samples.
    Radius(usize),
    /// Radius as a fraction of the longer sequence, rounded up.
    Fraction(f64),
}

impl Band {
    pub fn radius(self, n: usize, m: usize) -> Option<usize> {
        match self {
            Band::Unbounded => None,
            Band::Radius(r) => Some(r),
            Band::Fraction(f) => Some((f * n.max(m) as f64).ceil() as usize),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DtwConfig {
    pub band: Band,
    pub k: usize,
}

impl Default for DtwConfig {
    fn default() -> Self {
        Self {
            band: Band::Fraction(0.1),
            k: 1,
        }
    }
}

impl DtwConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if let Band::Fraction(f) = self.band {
            if !(f >= 0.0 && f.is_finite()) {
                return Err(Error::Config(format!("band fraction {f} must be nonnegative")));
            }
        }
        Ok(())
    }
}

/// True when cell `(i, j)` lies inside the band for lengths `n x m`.
///
/// Uses `|i (m-1) - j (n-1)| <= r max(n-1, m-1)`, which reduces to
/// `|i - j| <= r` for equal lengths and is symmetric in the two sequences.
fn in_band(i: usize, j: usize, n: usize, m: usize, radius: Option<usize>) -> bool {
    let Some(r) = radius else { return true };
    let lhs = (i * (m - 1)).abs_diff(j * (n - 1));
    lhs <= r * (n - 1).max(m - 1)
}

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Cumulative squared-Euclidean warping cost, `+inf` if the band admits no path.
pub fn dtw_distance<T: Scalar, V: AsRef<[T]>>(a: &[V], b: &[V], cfg: &DtwConfig) -> Result<T> {
    let (n, m) = (a.len(), b.len());
    if n == 0 || m == 0 {
        return Err(Error::Empty("DTW input sequence"));
    }
    let width = a[0].as_ref().len();
    if let Some(bad) = a.iter().chain(b).map(|v| v.as_ref().len()).find(|&w| w != width) {
        return Err(Error::DimensionMismatch {
            expected: width,
            got: bad,
        });
    }
    let radius = cfg.band.radius(n, m);
    let inf = T::infinity();
    let mut prev = vec![inf; m];
    let mut cur = vec![inf; m];
    for i in 0..n {
        for j in 0..m {
            cur[j] = if !in_band(i, j, n, m, radius) {
                inf
            } else {
                let best = match (i, j) {
                    (0, 0) => T::zero(),
                    (0, _) => cur[j - 1],
                    (_, 0) => prev[0],
                    _ => prev[j].min(cur[j - 1]).min(prev[j - 1]),
                };
                best + sq_dist(a[i].as_ref(), b[j].as_ref())
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m - 1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Neighbor<T> {
    /// Position in the training set.
    pub index: usize,
    pub label: String,
    pub distance: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct KnnResult<T> {
    pub label: String,
    /// Every training sequence, nearest first.
    pub neighbors: Vec<Neighbor<T>>,
}

/// K-nearest-neighbour vote under DTW distance.
///
/// Vote ties go to the label with the smaller summed distance, then to the
/// lexicographically smaller label.
pub fn knn_classify<T: Scalar, V: AsRef<[T]> + Sync>(
    test: &[V],
    train: &[(String, Vec<V>)],
    cfg: &DtwConfig,
) -> Result<KnnResult<T>> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::Empty("training set"));
    }
    if cfg.k > train.len() {
        return Err(Error::Config(format!(
            "k = {} exceeds the {} training sequences",
            cfg.k,
            train.len()
        )));
    }
    let mut neighbors = train
        .par_iter()
        .enumerate()
        .map(|(index, (label, seq))| {
            Ok(Neighbor {
                index,
                label: label.clone(),
                distance: dtw_distance(test, seq, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    neighbors.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.index.cmp(&b.index))
    });

    let mut votes: BTreeMap<&str, (usize, T)> = BTreeMap::new();
    for nb in &neighbors[..cfg.k] {
        let e = votes.entry(nb.label.as_str()).or_insert((0, T::zero()));
        e.0 += 1;
        e.1 += nb.distance;
    }
    // BTreeMap iteration is label-ordered, so the first maximum wins label ties
    let mut best: Option<(&str, usize, T)> = None;
    for (&label, &(count, sum)) in &votes {
        let better = match best {
            None => true,
            Some((_, c, s)) => count > c || (count == c && sum < s),
        };
        if better {
            best = Some((label, count, sum));
        }
    }
    let label = best.expect("k >= 1").0.to_string();
    Ok(KnnResult { label, neighbors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    /// Minimum over every monotone warping path, enumerated recursively.
    fn brute(a: &[Vec<f64>], b: &[Vec<f64>], i: usize, j: usize) -> f64 {
        let c = sq_dist(&a[i], &b[j]);
        if i + 1 == a.len() && j + 1 == b.len() {
            return c;
        }
        let mut best = f64::INFINITY;
        if i + 1 < a.len() {
            best = best.min(brute(a, b, i + 1, j));
        }
        if j + 1 < b.len() {
            best = best.min(brute(a, b, i, j + 1));
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            best = best.min(brute(a, b, i + 1, j + 1));
        }
        c + best
    }

    const FREE: DtwConfig = DtwConfig {
        band: Band::Unbounded,
        k: 1,
    };

    #[test]
    fn basics() {
        let a = one_d(&[1.0, 2.0, 3.0]);
        assert_eq!(dtw_distance(&a, &a, &DtwConfig::default()).unwrap(), 0.0);
        assert_eq!(dtw_distance(&one_d(&[0.0]), &one_d(&[3.0]), &FREE).unwrap(), 9.0);
    }

    #[test]
    fn matches_brute_force() {
        let seqs = [
            one_d(&[0.0, 1.0, 2.0]),
            one_d(&[0.5, 0.5, 2.5, 3.0, -1.0]),
            one_d(&[4.0]),
            one_d(&[1.0, -2.0, 0.0, 0.3, 2.2, 1.1]),
            vec![vec![0.0, 1.0], vec![2.0, 1.0], vec![1.0, -1.0], vec![0.2, 0.2]],
            vec![vec![1.0, 1.0], vec![0.0, 0.0]],
        ];
        for a in &seqs {
            for b in &seqs {
                if a[0].len() != b[0].len() {
                    continue;
                }
                let d = dtw_distance(a, b, &FREE).unwrap();
                assert!((d - brute(a, b, 0, 0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_band_disconnects_unequal_lengths() {
        let cfg = DtwConfig {
            band: Band::Radius(0),
            k: 1,
        };
        let d = dtw_distance(&one_d(&[0.0, 1.0, 2.0]), &one_d(&[0.0, 1.0, 1.5, 2.0]), &cfg).unwrap();
        assert!(d.is_infinite());
        let same = dtw_distance(&one_d(&[0.0, 1.0]), &one_d(&[1.0, 1.0]), &cfg).unwrap();
        assert_eq!(same, 1.0);
    }

    #[test]
    fn dimension_mismatch() {
        let a = vec![vec![0.0, 1.0]];
        let b = vec![vec![0.0]];
        assert!(matches!(
            dtw_distance::<f64, _>(&a, &b, &FREE),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn knn_rules() {
        let train = vec![
            ("a".to_string(), one_d(&[0.0, 0.0])),
            ("b".to_string(), one_d(&[1.0, 1.0])),
            ("a".to_string(), one_d(&[0.1, 0.1])),
            ("b".to_string(), one_d(&[5.0, 5.0])),
        ];
        let exact = knn_classify(&one_d(&[1.0, 1.0]), &train, &FREE).unwrap();
        assert_eq!(exact.label, "b");
        assert_eq!(exact.neighbors[0].distance, 0.0);

        let k3 = DtwConfig { k: 3, ..FREE };
        assert_eq!(knn_classify(&one_d(&[0.4, 0.4]), &train, &k3).unwrap().label, "a");

        // {a, b} with summed distances favouring b
        let k2 = DtwConfig { k: 2, ..FREE };
        let pair = vec![
            ("a".to_string(), one_d(&[0.0])),
            ("b".to_string(), one_d(&[1.5])),
        ];
        assert_eq!(knn_classify(&one_d(&[1.0]), &pair, &k2).unwrap().label, "b");
        // equal sums fall back to the label order
        assert_eq!(knn_classify(&one_d(&[0.75]), &pair, &k2).unwrap().label, "a");
    }

    #[test]
    fn knn_errors() {
        let empty: Vec<(String, Vec<Vec<f64>>)> = vec![];
        assert!(knn_classify(&one_d(&[0.0]), &empty, &FREE).is_err());
        let one = vec![("a".to_string(), one_d(&[0.0]))];
        assert!(knn_classify(&one_d(&[0.0]), &one, &DtwConfig { k: 2, ..FREE }).is_err());
    }
}
