//! Finger-trajectory gesture recognition.
//!
//! Spots gestures in hand-tracking recordings, turns them into per-point
//! direction/curvature/aspect/curliness/lineness/slope feature sequences,
//! classifies them with a bank of left-to-right GMM-HMMs (or a DTW + K-NN
//! baseline), evaluates classifiers with cross-validation, generates
//! synthetic gesture data and renders recognised shapes as meshes or vector
//! drawings.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dataset;
pub mod dtw;
pub mod error;
pub mod eval;
pub mod scalar;
pub mod shapes;
pub mod synth;
pub mod features;
pub mod hmm;
pub mod pipeline;
pub mod recognizer;
pub mod render;
pub mod trajectory;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default scalar type.
pub type Real = f64;

pub type Point3 = trajectory::Point3<Real>;
pub type Trajectory = trajectory::Trajectory<Real>;
pub type Frame = trajectory::Frame<Real>;
pub type Recording = trajectory::Recording<Real>;
pub type GestureSample = trajectory::GestureSample<Real>;
