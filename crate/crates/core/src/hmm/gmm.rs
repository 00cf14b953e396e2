use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::scalar::{log_sum_exp, Scalar};

/// Diagonal-covariance Gaussian mixture `b(x) = Σ_k c_k N(x; μ_k, Σ_k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Gmm<T> {
    pub weights: Vec<T>,
    pub means: Vec<Vec<T>>,
    pub variances: Vec<Vec<T>>,
}

impl<T: Scalar> Gmm<T> {
    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        let m = self.weights.len();
        if m == 0 {
            return Err(Error::Empty("mixture"));
        }
        if self.means.len() != m || self.variances.len() != m {
            return Err(Error::Corrupt("mixture component count mismatch".into()));
        }
        for (mu, var) in self.means.iter().zip(&self.variances) {
            if mu.len() != width || var.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    got: mu.len().min(var.len()),
                });
            }
            if var.iter().any(|&v| !(v > T::zero()) || !v.is_finite()) {
                return Err(Error::Corrupt("non-positive variance".into()));
            }
        }
        let sum: T = self.weights.iter().copied().sum();
        if (sum - T::one()).abs() > T::lit(1e-9) || self.weights.iter().any(|&w| w < T::zero()) {
            return Err(Error::Corrupt("mixture weights are not on the simplex".into()));
        }
        Ok(())
    }

    /// Precomputes log weights, precisions and normalising constants.
    pub fn prepare(&self) -> PreparedGmm<T> {
        let half = T::lit(0.5);
        let two_pi = T::lit(2.0) * T::PI();
        let comps = self
            .weights
            .iter()
            .zip(&self.means)
            .zip(&self.variances)
            .map(|((&w, mu), var)| {
                let log_norm: T = var.iter().map(|&v| (two_pi * v).ln()).sum::<T>() * half;
                PreparedComponent {
                    log_weight_norm: w.ln() - log_norm,
                    mean: mu.clone(),
                    precision: var.iter().map(|&v| T::one() / v).collect(),
                }
            })
            .collect();
        PreparedGmm { comps }
    }
}

#[derive(Clone, Debug)]
struct PreparedComponent<T> {
    log_weight_norm: T,
    mean: Vec<T>,
    precision: Vec<T>,
}

/// Scoring form of a [`Gmm`].
#[derive(Clone, Debug)]
pub struct PreparedGmm<T> {
    comps: Vec<PreparedComponent<T>>,
}

impl<T: Scalar> PreparedGmm<T> {
    pub fn n_components(&self) -> usize {
        self.comps.len()
    }

    /// Per-component `log(c_k N(x; μ_k, Σ_k))` written into `out`.
    pub fn component_log_densities(&self, x: &[T], out: &mut Vec<T>) {
        let half = T::lit(0.5);
        out.clear();
        out.extend(self.comps.iter().map(|c| {
            let q: T = x
                .iter()
                .zip(&c.mean)
                .zip(&c.precision)
                .map(|((&xi, &mi), &pi)| {
                    let d = xi - mi;
                    d * d * pi
                })
                .sum();
            c.log_weight_norm - half * q
        }));
    }

    pub fn log_density(&self, x: &[T]) -> T {
        let mut buf = Vec::with_capacity(self.comps.len());
        self.component_log_densities(x, &mut buf);
        log_sum_exp(&buf)
    }
}

/// Log of the mixture density at `x`.
pub fn gmm_log_density<T: Scalar>(x: &FeatureVector<T>, gmm: &Gmm<T>) -> Result<T> {
    let width = gmm.means.first().map_or(0, Vec::len);
    if x.values.len() != width {
        return Err(Error::DimensionMismatch {
            expected: width,
            got: x.values.len(),
        });
    }
    Ok(gmm.prepare().log_density(&x.values))
}
