//! Model initialisation and Baum-Welch re-estimation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::forward::{backward_from_table, forward_from_table, log_matrix};
use super::kmeans::kmeans;
use super::{Gmm, HmmModel, DEFAULT_VARIANCE_FLOOR, INIT_SELF_LOOP};
use crate::error::{Error, Result};
use crate::features::{FeatureDim, FeatureSequence};
use crate::scalar::{log_sum_exp, Scalar};

/// Stopping rule and variance clamp for [`train_model`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub max_iter: usize,
    /// Relative log-likelihood improvement below which training stops.
    pub tol: f64,
    pub variance_floor: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_iter: 20,
            tol: 1e-4,
            variance_floor: DEFAULT_VARIANCE_FLOOR,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InitOutcome<T> {
    pub model: HmmModel<T>,
    /// Human-readable notes about mixtures that had to be shrunk.
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct TrainReport<T> {
    pub model: HmmModel<T>,
    /// Total training log-likelihood before each re-estimation, plus the final value.
    pub log_likelihoods: Vec<T>,
    /// Number of re-estimation steps applied.
    pub iterations: usize,
    pub converged: bool,
}

fn check_training_set<T: Scalar>(seqs: &[FeatureSequence<T>]) -> Result<FeatureDim> {
    let first = seqs.first().ok_or(Error::Empty("training set"))?;
    for s in seqs {
        if s.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: first.width(),
                got: s.width(),
            });
        }
        if s.is_empty() {
            return Err(Error::Empty("training sequence"));
        }
    }
    Ok(first.dim)
}

fn moments<T: Scalar>(points: &[&[T]], floor: T) -> (Vec<T>, Vec<T>) {
    let width = points[0].len();
    let n = T::from_usize_lossy(points.len());
    let mut mean = vec![T::zero(); width];
    for p in points {
        for (m, &v) in mean.iter_mut().zip(p.iter()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![T::zero(); width];
    for p in points {
        for ((s, &v), &m) in var.iter_mut().zip(p.iter()).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    var.iter_mut().for_each(|s| *s = (*s / n).max(floor));
    (mean, var)
}

/// Builds a starting left-to-right model.
///
/// Every sequence is cut into `states` equal-duration chunks; the vectors of
/// chunk `j` across all sequences seed state `j`'s mixture through seeded
/// k-means. States with fewer than `2 * gaussians` vectors get a smaller mixture.
pub fn init_model<T: Scalar>(
    seqs: &[FeatureSequence<T>],
    states: usize,
    gaussians: usize,
    seed: u64,
) -> Result<InitOutcome<T>> {
    let dim = check_training_set(seqs)?;
    if states == 0 || gaussians == 0 {
        return Err(Error::Config("states and gaussians must be at least 1".into()));
    }
    let floor = T::lit(DEFAULT_VARIANCE_FLOOR);
    let mut pools: Vec<Vec<&[T]>> = vec![Vec::new(); states];
    for s in seqs {
        let n = s.len();
        for j in 0..states {
            let (lo, hi) = (j * n / states, (j + 1) * n / states);
            pools[j].extend(s.rows[lo..hi].iter().map(Vec::as_slice));
        }
    }

    let mut warnings = Vec::new();
    let mut gmms = Vec::with_capacity(states);
    for (j, pool) in pools.iter().enumerate() {
        if pool.is_empty() {
            return Err(Error::TooShort {
                needed: states,
                got: seqs.iter().map(FeatureSequence::len).max().unwrap_or(0),
            });
        }
        let m = gaussians.min((pool.len() / 2).max(1));
        if m < gaussians {
            let msg = format!(
                "state {j}: {} vectors, mixture reduced from {gaussians} to {m} components",
                pool.len()
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
        let (state_mean, state_var) = moments(pool, floor);
        if m == 1 {
            gmms.push(Gmm {
                weights: vec![T::one()],
                means: vec![state_mean],
                variances: vec![state_var],
            });
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(j as u64);
        let assign = kmeans(pool, m, &mut rng);
        let total = T::from_usize_lossy(pool.len());
        let mut gmm = Gmm {
            weights: Vec::with_capacity(m),
            means: Vec::with_capacity(m),
            variances: Vec::with_capacity(m),
        };
        for c in 0..m {
            let members: Vec<&[T]> = pool
                .iter()
                .zip(&assign)
                .filter(|(_, &a)| a == c)
                .map(|(p, _)| *p)
                .collect();
            let (mean, var) = moments(&members, floor);
            gmm.weights.push(T::from_usize_lossy(members.len()) / total);
            gmm.means.push(mean);
            // a singleton cluster has no spread of its own
            gmm.variances.push(if members.len() < 2 { state_var.clone() } else { var });
        }
        gmms.push(gmm);
    }

    let mut transitions = vec![vec![T::zero(); states]; states];
    for (i, row) in transitions.iter_mut().enumerate() {
        if i + 1 < states {
            row[i] = T::lit(INIT_SELF_LOOP);
            row[i + 1] = T::one() - T::lit(INIT_SELF_LOOP);
        } else {
            row[i] = T::one();
        }
    }
    let mut initial = vec![T::zero(); states];
    initial[0] = T::one();
    Ok(InitOutcome {
        model: HmmModel {
            dim,
            initial,
            transitions,
            states: gmms,
        },
        warnings,
    })
}

/// Per-sequence E-step output.
struct Posteriors<T> {
    /// `gamma[t][j]`, linear domain.
    gamma: Vec<Vec<T>>,
    /// Component responsibilities within the state, `resp[t][j][k]`.
    resp: Vec<Vec<Vec<T>>>,
    /// `log Σ_t ξ_t(i, j)`.
    log_xi: Vec<Vec<T>>,
    log_likelihood: T,
}

fn e_step<T: Scalar>(
    model: &HmmModel<T>,
    obs: &FeatureSequence<T>,
    index: usize,
) -> Result<Posteriors<T>> {
    let s = model.n_states();
    let prepared: Vec<_> = model.states.iter().map(Gmm::prepare).collect();
    let mut comp: Vec<Vec<Vec<T>>> = Vec::with_capacity(obs.len());
    let mut emis: Vec<Vec<T>> = Vec::with_capacity(obs.len());
    for x in &obs.rows {
        let mut row_c = Vec::with_capacity(s);
        let mut row_e = Vec::with_capacity(s);
        for g in &prepared {
            let mut buf = Vec::with_capacity(g.n_components());
            g.component_log_densities(x, &mut buf);
            row_e.push(log_sum_exp(&buf));
            row_c.push(buf);
        }
        comp.push(row_c);
        emis.push(row_e);
    }
    let (log_pi, log_a) = log_matrix(model);
    let alpha = forward_from_table(&emis, &log_pi, &log_a);
    let beta = backward_from_table(&emis, &log_a);
    let ll = log_sum_exp(alpha.last().expect("non-empty"));
    if !ll.is_finite() {
        return Err(Error::Underflow { sequence: index });
    }

    let gamma: Vec<Vec<T>> = alpha
        .iter()
        .zip(&beta)
        .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| (x + y - ll).exp()).collect())
        .collect();
    let resp = comp
        .iter()
        .zip(&emis)
        .map(|(cs, es)| {
            cs.iter()
                .zip(es)
                .map(|(c, &e)| {
                    c.iter()
                        .map(|&v| if e.is_finite() { (v - e).exp() } else { T::zero() })
                        .collect()
                })
                .collect()
        })
        .collect();

    let mut log_xi = vec![vec![T::neg_infinity(); s]; s];
    let mut terms: Vec<T> = Vec::with_capacity(obs.len());
    for i in 0..s {
        for j in 0..s {
            if log_a[i][j] == T::neg_infinity() {
                continue;
            }
            terms.clear();
            terms.extend(
                (0..obs.len() - 1)
                    .map(|t| alpha[t][i] + log_a[i][j] + emis[t + 1][j] + beta[t + 1][j] - ll),
            );
            log_xi[i][j] = log_sum_exp(&terms);
        }
    }
    Ok(Posteriors {
        gamma,
        resp,
        log_xi,
        log_likelihood: ll,
    })
}

fn m_step<T: Scalar>(
    model: &HmmModel<T>,
    seqs: &[FeatureSequence<T>],
    posts: &[Posteriors<T>],
    floor: T,
) -> HmmModel<T> {
    let s = model.n_states();
    let width = model.width();
    let mut next = model.clone();

    for i in 0..s {
        let row: Vec<T> = (0..s)
            .map(|j| log_sum_exp(&posts.iter().map(|p| p.log_xi[i][j]).collect::<Vec<_>>()))
            .collect();
        let total = log_sum_exp(&row);
        // a state never left within any sequence keeps its old outgoing row
        if total.is_finite() {
            next.transitions[i] = row.iter().map(|&v| (v - total).exp()).collect();
        }
    }

    for j in 0..s {
        let m = model.states[j].n_components();
        let mut occ = vec![T::zero(); m];
        let mut sums = vec![vec![T::zero(); width]; m];
        for (seq, p) in seqs.iter().zip(posts) {
            for (t, x) in seq.rows.iter().enumerate() {
                let g = p.gamma[t][j];
                if g == T::zero() {
                    continue;
                }
                for k in 0..m {
                    let w = g * p.resp[t][j][k];
                    occ[k] += w;
                    for (acc, &v) in sums[k].iter_mut().zip(x) {
                        *acc += w * v;
                    }
                }
            }
        }
        let state_occ: T = occ.iter().copied().sum();
        if !(state_occ > T::zero()) {
            continue;
        }
        let gmm = &mut next.states[j];
        for k in 0..m {
            gmm.weights[k] = occ[k] / state_occ;
            if occ[k] > T::zero() {
                gmm.means[k] = sums[k].iter().map(|&v| v / occ[k]).collect();
            }
        }
        let mut sq = vec![vec![T::zero(); width]; m];
        for (seq, p) in seqs.iter().zip(posts) {
            for (t, x) in seq.rows.iter().enumerate() {
                let g = p.gamma[t][j];
                if g == T::zero() {
                    continue;
                }
                for k in 0..m {
                    let w = g * p.resp[t][j][k];
                    for ((acc, &v), &mu) in sq[k].iter_mut().zip(x).zip(&gmm.means[k]) {
                        *acc += w * (v - mu) * (v - mu);
                    }
                }
            }
        }
        for k in 0..m {
            if occ[k] > T::zero() {
                gmm.variances[k] = sq[k].iter().map(|&v| (v / occ[k]).max(floor)).collect();
            }
        }
        // renormalise away rounding so the simplex check stays tight
        let wsum: T = gmm.weights.iter().copied().sum();
        gmm.weights.iter_mut().for_each(|w| *w /= wsum);
    }
    next
}

/// Baum-Welch re-estimation of a left-to-right model.
///
/// Structural zeros in `π` and `A` stay zero. Training stops after
/// `config.max_iter` re-estimations or once the relative improvement of the
/// total log-likelihood drops below `config.tol`.
pub fn train_model<T: Scalar>(
    model: HmmModel<T>,
    seqs: &[FeatureSequence<T>],
    config: &TrainConfig,
) -> Result<TrainReport<T>> {
    let dim = check_training_set(seqs)?;
    if dim != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.width(),
            got: dim.len(),
        });
    }
    model.validate()?;
    let floor = T::lit(config.variance_floor);
    let tol = T::lit(config.tol);
    let mut model = model;
    let mut lls: Vec<T> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    loop {
        let posts = seqs
            .iter()
            .enumerate()
            .map(|(i, s)| e_step(&model, s, i))
            .collect::<Result<Vec<_>>>()?;
        let ll: T = posts.iter().map(|p| p.log_likelihood).sum();
        if let Some(&prev) = lls.last() {
            let rel = (ll - prev) / prev.abs().max(T::min_positive_value());
            lls.push(ll);
            if rel < tol {
                converged = true;
                break;
            }
        } else {
            lls.push(ll);
        }
        if iterations == config.max_iter {
            break;
        }
        model = m_step(&model, seqs, &posts, floor);
        iterations += 1;
    }
    Ok(TrainReport {
        model,
        log_likelihoods: lls,
        iterations,
        converged,
    })
}
