//! Cross-validation splits.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Indices into the dataset used for training and testing in one round.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// Every class spread evenly over the folds.
    #[default]
    Stratified,
    /// All samples of a user land in the same test fold.
    User,
}

fn folds_from_assignment(assign: &[usize], k: usize) -> Vec<Fold> {
    (0..k)
        .map(|f| Fold {
            train: (0..assign.len()).filter(|&i| assign[i] != f).collect(),
            test: (0..assign.len()).filter(|&i| assign[i] == f).collect(),
        })
        .collect()
}

fn group_indices<S: AsRef<str>>(keys: &[S]) -> BTreeMap<&str, Vec<usize>> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, k) in keys.iter().enumerate() {
        groups.entry(k.as_ref()).or_default().push(i);
    }
    groups
}

/// Stratified, seeded k-fold split over class labels.
///
/// With `k` equal to the number of samples every fold tests exactly one
/// sample (leave-one-out), whatever the class sizes.
pub fn kfold_split<S: AsRef<str>>(labels: &[S], k: usize, seed: u64) -> Result<Vec<Fold>> {
    let n = labels.len();
    if k < 2 || k > n {
        return Err(Error::Config(format!("cannot split {n} samples into {k} folds")));
    }
    if k == n {
        return Ok(folds_from_assignment(&(0..n).collect::<Vec<_>>(), k));
    }
    let groups = group_indices(labels);
    if let Some((label, members)) = groups.iter().find(|(_, m)| m.len() < k) {
        return Err(Error::ClassTooSmall {
            label: (*label).to_string(),
            count: members.len(),
            k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assign = vec![0; n];
    let mut offset = 0;
    for members in groups.values() {
        let mut m = members.clone();
        m.shuffle(&mut rng);
        for (j, &i) in m.iter().enumerate() {
            assign[i] = (offset + j) % k;
        }
        // start the next class where this one stopped so fold sizes stay level
        offset = (offset + m.len()) % k;
    }
    Ok(folds_from_assignment(&assign, k))
}

/// Seeded split that keeps every user's samples together.
pub fn group_kfold_split<S: AsRef<str>>(groups: &[S], k: usize, seed: u64) -> Result<Vec<Fold>> {
    let by_group = group_indices(groups);
    if k < 2 || k > by_group.len() {
        return Err(Error::Config(format!(
            "cannot split {} users into {k} folds",
            by_group.len()
        )));
    }
    let mut names: Vec<&str> = by_group.keys().copied().collect();
    names.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assign = vec![0; groups.len()];
    for (g, name) in names.iter().enumerate() {
        for &i in &by_group[name] {
            assign[i] = g % k;
        }
    }
    Ok(folds_from_assignment(&assign, k))
}
