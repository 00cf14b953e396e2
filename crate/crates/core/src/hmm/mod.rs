//! Left-to-right continuous-density HMMs with diagonal-covariance GMM emissions.

mod bank;
mod forward;
mod gmm;
mod kmeans;
mod train;

use serde::{Deserialize, Serialize};

pub use bank::{
    apply_rejection, load_bank, recognize, save_bank, ClassifierBank, RecognitionResult,
    TrainingSnapshot, BANK_FORMAT, BANK_VERSION,
};
pub use forward::{backward_log, forward_log, forward_log_likelihood};
pub use gmm::{gmm_log_density, Gmm, PreparedGmm};
pub use train::{init_model, train_model, InitOutcome, TrainConfig, TrainReport};

use crate::error::{Error, Result};
use crate::features::FeatureDim;
use crate::scalar::Scalar;

/// Self-loop probability of a freshly initialised state.
pub const INIT_SELF_LOOP: f64 = 0.6;

/// Default emission variance floor.
pub const DEFAULT_VARIANCE_FLOOR: f64 = 1e-4;

/// HMM `λ = (π, A, B)` with one GMM per state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct HmmModel<T> {
    pub dim: FeatureDim,
    pub initial: Vec<T>,
    /// Row-stochastic `S x S` transition matrix.
    pub transitions: Vec<Vec<T>>,
    pub states: Vec<Gmm<T>>,
}

impl<T: Scalar> HmmModel<T> {
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn width(&self) -> usize {
        self.dim.len()
    }

    /// Checks shapes, stochasticity and the emission invariants.
    pub fn validate(&self) -> Result<()> {
        let s = self.states.len();
        if s == 0 {
            return Err(Error::Empty("state set"));
        }
        if self.initial.len() != s || self.transitions.len() != s {
            return Err(Error::DimensionMismatch {
                expected: s,
                got: self.initial.len().min(self.transitions.len()),
            });
        }
        let tol = T::lit(1e-9);
        let pi_sum: T = self.initial.iter().copied().sum();
        if (pi_sum - T::one()).abs() > tol {
            return Err(Error::Corrupt("initial distribution does not sum to 1".into()));
        }
        for (i, row) in self.transitions.iter().enumerate() {
            if row.len() != s {
                return Err(Error::DimensionMismatch {
                    expected: s,
                    got: row.len(),
                });
            }
            let sum: T = row.iter().copied().sum();
            if (sum - T::one()).abs() > tol || row.iter().any(|&a| a < T::zero()) {
                return Err(Error::Corrupt(format!("transition row {i} is not stochastic")));
            }
        }
        for g in &self.states {
            g.validate(self.width())?;
        }
        Ok(())
    }

    /// True when `π = (1, 0, ...)` and every state only self-loops or advances by one.
    pub fn is_left_to_right(&self) -> bool {
        let pi_ok = self
            .initial
            .iter()
            .enumerate()
            .all(|(i, &p)| if i == 0 { p == T::one() } else { p == T::zero() });
        let a_ok = self.transitions.iter().enumerate().all(|(i, row)| {
            row.iter()
                .enumerate()
                .all(|(j, &a)| (j == i || j == i + 1) || a == T::zero())
        });
        pi_ok && a_ok
    }
}
