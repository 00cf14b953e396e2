//! Npen++-style per-point features in 2D (`f7`) and 3D (`f12`), plus a
//! curvature-moments summary used as a baseline.

mod local;
mod moments;

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use local::{
    aspect_2d, aspect_3d, curliness, curvature_2d, curvature_3d, direction_2d, direction_3d,
    lineness, slope_3d, Dims, Flagged, WindowExtents, WINDOW_RADIUS,
};
pub use moments::curvature_moments;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trajectory::{project_to_plane, Trajectory, MIN_TRAJECTORY_LEN};

/// Layout tag of a feature vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureDim {
    /// Raw `(x, y, z)` coordinates.
    Raw3,
    F7,
    F12,
    Moments6,
}

impl FeatureDim {
    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> usize {
        match self {
            FeatureDim::Raw3 => 3,
            FeatureDim::F7 => 7,
            FeatureDim::F12 => 12,
            FeatureDim::Moments6 => 6,
        }
    }

    pub fn column_names(self) -> &'static [&'static str] {
        match self {
            FeatureDim::Raw3 => &["x", "y", "z"],
            FeatureDim::F7 => &[
                "cos_theta",
                "sin_theta",
                "cos_beta",
                "sin_beta",
                "aspect",
                "curliness",
                "slope_m",
            ],
            FeatureDim::F12 => &[
                "cos_alpha",
                "cos_beta",
                "cos_gamma",
                "curvature",
                "aspect1",
                "aspect2",
                "aspect3",
                "curliness",
                "lineness",
                "slope_l",
                "slope_m",
                "slope_n",
            ],
            FeatureDim::Moments6 => &["pos_m0", "pos_m1", "pos_m2", "vel_m0", "vel_m1", "vel_m2"],
        }
    }
}

impl FromStr for FeatureDim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" | "raw3" => Ok(FeatureDim::Raw3),
            "f7" => Ok(FeatureDim::F7),
            "f12" => Ok(FeatureDim::F12),
            "moments6" => Ok(FeatureDim::Moments6),
            other => Err(Error::Config(format!("unknown feature set `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FeatureVector<T> {
    pub values: Vec<T>,
    pub dim: FeatureDim,
}

impl<T: Scalar> FeatureVector<T> {
    pub fn new(values: Vec<T>, dim: FeatureDim) -> Result<Self> {
        if values.len() != dim.len() {
            return Err(Error::DimensionMismatch {
                expected: dim.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Degenerate("non-finite feature value".into()));
        }
        Ok(Self { values, dim })
    }
}

/// Per-point feature rows of one sample, all of the same layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FeatureSequence<T> {
    pub dim: FeatureDim,
    pub rows: Vec<Vec<T>>,
    /// Rows holding at least one degenerate-case sentinel.
    pub flagged: Vec<bool>,
    pub source_id: String,
}

impl<T: Scalar> FeatureSequence<T> {
    /// Wraps rows of a uniform width with no flags.
    pub fn from_rows(dim: FeatureDim, rows: Vec<Vec<T>>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != dim.len()) {
            return Err(Error::DimensionMismatch {
                expected: dim.len(),
                got: bad.len(),
            });
        }
        let flagged = vec![false; rows.len()];
        Ok(Self {
            dim,
            rows,
            flagged,
            source_id: String::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn width(&self) -> usize {
        self.dim.len()
    }

    pub fn frame(&self, i: usize) -> FeatureVector<T> {
        FeatureVector {
            values: self.rows[i].clone(),
            dim: self.dim,
        }
    }

    pub fn with_source(mut self, id: impl Into<String>) -> Self {
        self.source_id = id.into();
        self
    }

    /// Tab-separated dump: a header of column names plus a `flagged` column.
    pub fn write_table<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}\tflagged", self.dim.column_names().join("\t"))?;
        for (row, flag) in self.rows.iter().zip(&self.flagged) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{}\t{}", cells.join("\t"), u8::from(*flag))?;
        }
        Ok(())
    }
}

fn check_len<T: Scalar>(trajectory: &Trajectory<T>) -> Result<()> {
    if trajectory.len() < MIN_TRAJECTORY_LEN {
        return Err(Error::TooShort {
            needed: MIN_TRAJECTORY_LEN,
            got: trajectory.len(),
        });
    }
    Ok(())
}

/// Evaluates `row` at every point with a full window and replicates the first
/// and last computed rows over the edges.
fn padded<T, F>(trajectory: &Trajectory<T>, dim: FeatureDim, row: F) -> Result<FeatureSequence<T>>
where
    T: Scalar,
    F: Fn(&Trajectory<T>, usize) -> Result<(Vec<T>, bool)>,
{
    check_len(trajectory)?;
    let n = trajectory.len();
    let first = WINDOW_RADIUS;
    let last = n - 1 - WINDOW_RADIUS;
    let mut rows = Vec::with_capacity(n);
    let mut flagged = Vec::with_capacity(n);
    for t in first..=last {
        let (r, f) = row(trajectory, t)?;
        debug_assert_eq!(r.len(), dim.len());
        rows.push(r);
        flagged.push(f);
    }
    let mut all_rows = vec![rows[0].clone(); first];
    let mut all_flags = vec![flagged[0]; first];
    let tail_row = rows[rows.len() - 1].clone();
    let tail_flag = flagged[flagged.len() - 1];
    all_rows.extend(rows);
    all_flags.extend(flagged);
    all_rows.extend(std::iter::repeat_n(tail_row, WINDOW_RADIUS));
    all_flags.extend(std::iter::repeat_n(tail_flag, WINDOW_RADIUS));
    Ok(FeatureSequence {
        dim,
        rows: all_rows,
        flagged: all_flags,
        source_id: String::new(),
    })
}

/// 2D features `[cos θ, sin θ, cos β, sin β, A, C, m]` of the x-y projection.
///
/// `m` is the y direction ratio of the window chord. Any depth in the input
/// is dropped first.
pub fn extract_f7<T: Scalar>(trajectory: &Trajectory<T>) -> Result<FeatureSequence<T>> {
    let planar = project_to_plane(trajectory);
    padded(&planar, FeatureDim::F7, |tr, t| {
        let dir = direction_2d(tr, t)?;
        let curv = curvature_2d(tr, t)?;
        let ext = WindowExtents::planar(tr, t)?;
        let asp = aspect_2d(&ext);
        let curl = curliness(&ext, Dims::Two);
        let slope = slope_3d(tr, t)?;
        let row = vec![
            dir.value[0],
            dir.value[1],
            curv.value[0],
            curv.value[1],
            asp.value,
            curl.value,
            slope.value[1],
        ];
        let flagged = dir.flagged || curv.flagged || asp.flagged || curl.flagged || slope.flagged;
        Ok((row, flagged))
    })
}

/// 3D features `[cos α, cos β, cos γ, K, A1, A2, A3, C, L, l, m, n]`.
pub fn extract_f12<T: Scalar>(trajectory: &Trajectory<T>) -> Result<FeatureSequence<T>> {
    padded(trajectory, FeatureDim::F12, |tr, t| {
        let dir = direction_3d(tr, t)?;
        let k = curvature_3d(tr, t)?;
        let ext = WindowExtents::at(tr, t)?;
        let asp = aspect_3d(&ext);
        let curl = curliness(&ext, Dims::Three);
        let line = lineness(tr, t)?;
        let slope = slope_3d(tr, t)?;
        let row = vec![
            dir.value[0],
            dir.value[1],
            dir.value[2],
            k.value,
            asp.value[0],
            asp.value[1],
            asp.value[2],
            curl.value,
            line.value,
            slope.value[0],
            slope.value[1],
            slope.value[2],
        ];
        let flagged = dir.flagged
            || k.flagged
            || asp.flagged
            || curl.flagged
            || line.flagged
            || slope.flagged;
        Ok((row, flagged))
    })
}

/// Raw coordinates as a feature sequence.
pub fn raw_sequence<T: Scalar>(trajectory: &Trajectory<T>) -> FeatureSequence<T> {
    let rows: Vec<Vec<T>> = trajectory.points().iter().map(|p| p.xyz().to_vec()).collect();
    let flagged = vec![false; rows.len()];
    FeatureSequence {
        dim: FeatureDim::Raw3,
        rows,
        flagged,
        source_id: String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn traj(coords: Vec<[f64; 3]>) -> Trajectory<f64> {
        Trajectory::from_xyz(coords).unwrap()
    }

    #[test]
    fn f7_horizontal_stroke() {
        let t = traj((0..10).map(|i| [i as f64 * 3.0, 5.0, 0.0]).collect());
        let f = extract_f7(&t).unwrap();
        assert_eq!(f.len(), 10);
        assert_eq!(f.rows[4], vec![-1.0, 0.0, 1.0, 0.0, -1.0, -1.0, 0.0]);
        // vertical upward stroke: slope m = 1
        let t = traj((0..10).map(|i| [2.0, i as f64, 0.0]).collect());
        let f = extract_f7(&t).unwrap();
        assert_eq!(f.rows[4], vec![0.0, -1.0, 1.0, 0.0, 1.0, -1.0, 1.0]);
    }

    #[test]
    fn f12_straight_x_stroke() {
        let t = traj((0..12).map(|i| [i as f64, 0.0, 0.0]).collect());
        let f = extract_f12(&t).unwrap();
        assert_eq!(f.len(), 12);
        assert_eq!(
            f.rows[5],
            vec![-1.0, 0.0, 0.0, 0.0, -1.0, 0.0, -1.0, -1.0, 0.0, 1.0, 0.0, 0.0]
        );
        // A2 hits its zero-denominator sentinel
        assert!(f.flagged[5]);
    }

    #[test]
    fn too_short_rejected() {
        let t = traj((0..6).map(|i| [i as f64, 0.0, 0.0]).collect());
        assert!(matches!(extract_f12(&t), Err(Error::TooShort { needed: 7, got: 6 })));
        assert!(matches!(extract_f7(&t), Err(Error::TooShort { .. })));
    }

    #[test]
    fn edge_rows_are_replicated() {
        let t = traj(
            (0..9)
                .map(|i| {
                    let a = i as f64 * 0.4;
                    [a.cos(), a.sin(), 0.1 * a]
                })
                .collect(),
        );
        let f = extract_f12(&t).unwrap();
        assert_eq!(f.rows[0], f.rows[3]);
        assert_eq!(f.rows[2], f.rows[3]);
        assert_eq!(f.rows[8], f.rows[5]);
        assert_ne!(f.rows[3], f.rows[4]);
    }

    #[test]
    fn f7_circle_matches_scalar_direction() {
        let t = traj(
            (0..40)
                .map(|i| {
                    let a = 2.0 * PI * i as f64 / 40.0;
                    [10.0 * a.cos(), 10.0 * a.sin(), 0.0]
                })
                .collect(),
        );
        let f = extract_f7(&t).unwrap();
        let mut min = f64::MAX;
        let mut max = f64::MIN;
        for i in 3..37 {
            let d = direction_2d(&t, i).unwrap().value;
            assert_eq!(f.rows[i][0], d[0]);
            assert_eq!(f.rows[i][1], d[1]);
            min = min.min(d[0]);
            max = max.max(d[0]);
        }
        assert!(min < -0.95 && max > 0.95);
    }

    #[test]
    fn helix_curvature_column_constant() {
        let t = traj(
            (0..128)
                .map(|i| {
                    let a = i as f64 * 0.15;
                    [a.cos(), a.sin(), 0.5 * a / (2.0 * PI)]
                })
                .collect(),
        );
        let f = extract_f12(&t).unwrap();
        let k0 = f.rows[3][3];
        for r in &f.rows {
            assert!((r[3] - k0).abs() < 1e-9);
        }
    }

    #[test]
    fn feature_table_dump() {
        let t = traj((0..7).map(|i| [i as f64, 0.0, 0.0]).collect());
        let mut out = Vec::new();
        extract_f7(&t).unwrap().write_table(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 8);
        assert!(lines[0].starts_with("cos_theta\tsin_theta"));
        assert_eq!(lines[1].split('\t').count(), 8);
    }

    #[test]
    fn feature_vector_checks_dim() {
        assert!(FeatureVector::new(vec![0.0; 7], FeatureDim::F7).is_ok());
        assert!(FeatureVector::new(vec![0.0; 6], FeatureDim::F7).is_err());
        assert!(FeatureVector::new(vec![f64::NAN; 3], FeatureDim::Raw3).is_err());
    }
}
