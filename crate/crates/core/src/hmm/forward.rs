//! Log-space forward and backward recursions.

use super::HmmModel;
use crate::error::{Error, Result};
use crate::features::FeatureSequence;
use crate::scalar::{log_sum_exp, Scalar};

fn check_obs<T: Scalar>(obs: &FeatureSequence<T>, model: &HmmModel<T>) -> Result<()> {
    if obs.dim != model.dim {
        return Err(Error::DimensionMismatch {
            expected: model.width(),
            got: obs.width(),
        });
    }
    if obs.is_empty() {
        return Err(Error::Empty("observation sequence"));
    }
    Ok(())
}

/// Emission log-densities `log b_j(O_t)` as a `T x S` table.
pub(crate) fn emission_table<T: Scalar>(obs: &[Vec<T>], model: &HmmModel<T>) -> Vec<Vec<T>> {
    let prepared: Vec<_> = model.states.iter().map(|g| g.prepare()).collect();
    obs.iter()
        .map(|x| prepared.iter().map(|g| g.log_density(x)).collect())
        .collect()
}

pub(crate) fn log_matrix<T: Scalar>(model: &HmmModel<T>) -> (Vec<T>, Vec<Vec<T>>) {
    let log_pi = model.initial.iter().map(|p| p.ln()).collect();
    let log_a = model
        .transitions
        .iter()
        .map(|row| row.iter().map(|a| a.ln()).collect())
        .collect();
    (log_pi, log_a)
}

pub(crate) fn forward_from_table<T: Scalar>(
    emis: &[Vec<T>],
    log_pi: &[T],
    log_a: &[Vec<T>],
) -> Vec<Vec<T>> {
    let s = log_pi.len();
    let mut alpha: Vec<Vec<T>> = Vec::with_capacity(emis.len());
    alpha.push((0..s).map(|j| log_pi[j] + emis[0][j]).collect());
    let mut terms = Vec::with_capacity(s);
    for e in &emis[1..] {
        let prev = alpha.last().expect("seeded");
        let row = (0..s)
            .map(|j| {
                terms.clear();
                terms.extend((0..s).map(|i| prev[i] + log_a[i][j]));
                log_sum_exp(&terms) + e[j]
            })
            .collect();
        alpha.push(row);
    }
    alpha
}

pub(crate) fn backward_from_table<T: Scalar>(emis: &[Vec<T>], log_a: &[Vec<T>]) -> Vec<Vec<T>> {
    let s = log_a.len();
    let n = emis.len();
    let mut beta = vec![vec![T::zero(); s]; n];
    let mut terms = Vec::with_capacity(s);
    for t in (0..n - 1).rev() {
        for i in 0..s {
            terms.clear();
            terms.extend((0..s).map(|j| log_a[i][j] + emis[t + 1][j] + beta[t + 1][j]));
            beta[t][i] = log_sum_exp(&terms);
        }
    }
    beta
}

/// Forward variables `log α_t(j)`.
pub fn forward_log<T: Scalar>(obs: &FeatureSequence<T>, model: &HmmModel<T>) -> Result<Vec<Vec<T>>> {
    check_obs(obs, model)?;
    let (log_pi, log_a) = log_matrix(model);
    Ok(forward_from_table(&emission_table(&obs.rows, model), &log_pi, &log_a))
}

/// Backward variables `log β_t(i)`.
pub fn backward_log<T: Scalar>(obs: &FeatureSequence<T>, model: &HmmModel<T>) -> Result<Vec<Vec<T>>> {
    check_obs(obs, model)?;
    let (_, log_a) = log_matrix(model);
    Ok(backward_from_table(&emission_table(&obs.rows, model), &log_a))
}

/// `log P(O | λ)`, summed over all state paths.
pub fn forward_log_likelihood<T: Scalar>(obs: &FeatureSequence<T>, model: &HmmModel<T>) -> Result<T> {
    let alpha = forward_log(obs, model)?;
    Ok(log_sum_exp(alpha.last().expect("non-empty")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureDim;
    use crate::hmm::Gmm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seq(rows: Vec<Vec<f64>>) -> FeatureSequence<f64> {
        FeatureSequence::from_rows(FeatureDim::Raw3, rows).unwrap()
    }

    fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    }

    fn random_model(rng: &mut ChaCha8Rng, s: usize, m: usize) -> HmmModel<f64> {
        let states = (0..s)
            .map(|_| Gmm {
                weights: random_simplex(rng, m),
                means: (0..m)
                    .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
                    .collect(),
                variances: (0..m)
                    .map(|_| (0..3).map(|_| rng.random_range(0.2..2.0)).collect())
                    .collect(),
            })
            .collect();
        HmmModel {
            dim: FeatureDim::Raw3,
            initial: random_simplex(rng, s),
            transitions: (0..s).map(|_| random_simplex(rng, s)).collect(),
            states,
        }
    }

    /// Exhaustive sum over all S^T state paths in the linear domain.
    fn brute_force(obs: &FeatureSequence<f64>, model: &HmmModel<f64>) -> f64 {
        let s = model.n_states();
        let t = obs.len();
        let b = |j: usize, x: &[f64]| model.states[j].prepare().log_density(x).exp();
        let mut total = 0.0;
        for code in 0..s.pow(t as u32) {
            let mut path = Vec::with_capacity(t);
            let mut c = code;
            for _ in 0..t {
                path.push(c % s);
                c /= s;
            }
            let mut p = model.initial[path[0]] * b(path[0], &obs.rows[0]);
            for k in 1..t {
                p *= model.transitions[path[k - 1]][path[k]] * b(path[k], &obs.rows[k]);
            }
            total += p;
        }
        total.ln()
    }

    #[test]
    fn single_state_is_sum_of_emissions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut model = random_model(&mut rng, 1, 2);
        model.initial = vec![1.0];
        model.transitions = vec![vec![1.0]];
        let obs = seq((0..5).map(|i| vec![i as f64 * 0.1, 0.0, -0.3]).collect());
        let expected: f64 = obs.rows.iter().map(|x| model.states[0].prepare().log_density(x)).sum();
        let got = forward_log_likelihood(&obs, &model).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn single_observation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut model = random_model(&mut rng, 3, 2);
        model.initial = vec![1.0, 0.0, 0.0];
        let obs = seq(vec![vec![0.1, 0.2, 0.3]]);
        let expected = model.states[0].prepare().log_density(&obs.rows[0]);
        assert!((forward_log_likelihood(&obs, &model).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn matches_path_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let model = random_model(&mut rng, 3, 2);
            let obs = seq(
                (0..6)
                    .map(|_| (0..3).map(|_| rng.random_range(-1.5..1.5)).collect())
                    .collect(),
            );
            let oracle = brute_force(&obs, &model);
            let got = forward_log_likelihood(&obs, &model).unwrap();
            assert!(((got - oracle) / oracle).abs() < 1e-9, "{got} vs {oracle}");
        }
    }

    #[test]
    fn forward_backward_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let model = random_model(&mut rng, 3, 2);
        let obs = seq((0..8).map(|i| vec![i as f64 * 0.2, -0.1, 0.4]).collect());
        let alpha = forward_log(&obs, &model).unwrap();
        let beta = backward_log(&obs, &model).unwrap();
        let ll = forward_log_likelihood(&obs, &model).unwrap();
        for t in 0..obs.len() {
            let v: Vec<f64> = (0..3).map(|j| alpha[t][j] + beta[t][j]).collect();
            assert!((log_sum_exp(&v) - ll).abs() < 1e-10);
        }
    }

    #[test]
    fn dim_mismatch_and_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let model = random_model(&mut rng, 2, 1);
        let f7 = FeatureSequence::from_rows(FeatureDim::F7, vec![vec![0.0; 7]]).unwrap();
        assert!(matches!(
            forward_log_likelihood(&f7, &model),
            Err(Error::DimensionMismatch { .. })
        ));
        let empty = seq(vec![]);
        assert!(matches!(forward_log_likelihood(&empty, &model), Err(Error::Empty(_))));
    }
}
