//! Hand-tracking data model: frames, recordings, spotted gesture samples and
//! the 3D point trajectories derived from them.

mod geometry;
mod recording;
mod spotting;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use geometry::{normalize, project_to_plane, resample, scale, translate, DEFAULT_RESAMPLE_LEN};
pub use recording::{load_recording, write_recording};
pub use spotting::{
    classify_gesture_type, collapse_multifinger, index_trace, spot_gestures, MAX_INTERPOLATED_GAP,
};

/// Shortest trajectory the ±3-point feature window can handle.
pub const MIN_TRAJECTORY_LEN: usize = 7;

/// A fingertip sample in sensor millimetres with a timestamp in milliseconds.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub t: T,
}

impl<T: Scalar> Point3<T> {
    pub fn new(x: T, y: T, z: T, t: T) -> Self {
        Self { x, y, z, t }
    }

    pub fn from_xyz(xyz: [T; 3], t: T) -> Self {
        Self::new(xyz[0], xyz[1], xyz[2], t)
    }

    pub fn xyz(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.t.is_finite()
    }

    pub fn dist(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Linear interpolation of position and time.
    pub fn lerp(&self, other: &Self, u: T) -> Self {
        Self::new(
            self.x + (other.x - self.x) * u,
            self.y + (other.y - self.y) * u,
            self.z + (other.z - self.z) * u,
            self.t + (other.t - self.t) * u,
        )
    }

    pub fn cast<U: Scalar>(&self) -> Point3<U> {
        Point3::new(
            U::lit(self.x.to_f64_lossy()),
            U::lit(self.y.to_f64_lossy()),
            U::lit(self.z.to_f64_lossy()),
            U::lit(self.t.to_f64_lossy()),
        )
    }
}

/// Ordered 3D finger trace.
///
/// Coordinates are finite and timestamps strictly increase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Trajectory<T> {
    points: Vec<Point3<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(points: Vec<Point3<T>>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::Validation {
                    index: i,
                    message: "non-finite coordinate".into(),
                });
            }
            if i > 0 && p.t <= points[i - 1].t {
                return Err(Error::Validation {
                    index: i,
                    message: "timestamps must strictly increase".into(),
                });
            }
        }
        Ok(Self { points })
    }

    /// Builds a trajectory from bare coordinates, stamping point `i` with `t = i` ms.
    pub fn from_xyz<I>(coords: I) -> Result<Self>
    where
        I: IntoIterator<Item = [T; 3]>,
    {
        let points = coords
            .into_iter()
            .enumerate()
            .map(|(i, c)| Point3::from_xyz(c, T::from_usize_lossy(i)))
            .collect();
        Self::new(points)
    }

    pub(crate) fn from_points_unchecked(points: Vec<Point3<T>>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[Point3<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point3<T>> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn coords(&self) -> Vec<[T; 3]> {
        self.points.iter().map(Point3::xyz).collect()
    }

    /// Axis-aligned bounding box as `(min, max)`; `None` when empty.
    pub fn bounding_box(&self) -> Option<([T; 3], [T; 3])> {
        let first = self.points.first()?.xyz();
        let mut lo = first;
        let mut hi = first;
        for p in &self.points[1..] {
            for (k, v) in p.xyz().into_iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        Some((lo, hi))
    }

    pub fn path_length(&self) -> T {
        self.points.windows(2).map(|w| w[0].dist(&w[1])).sum()
    }

    pub fn reversed(&self) -> Self {
        // positions reversed, timestamps kept in original order
        let points = self
            .points
            .iter()
            .rev()
            .zip(&self.points)
            .map(|(p, q)| Point3::new(p.x, p.y, p.z, q.t))
            .collect();
        Self { points }
    }

    pub fn cast<U: Scalar>(&self) -> Trajectory<U> {
        Trajectory {
            points: self.points.iter().map(Point3::cast).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LeftHand {
    Open,
    Fist,
    Absent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RightHand {
    Open,
    Fist,
    /// Fist closed except the extended index finger.
    #[serde(rename = "index")]
    IndexOnly,
    Absent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Finger {
    Thumb = 0,
    Index = 1,
    Middle = 2,
    Ring = 3,
    Pinky = 4,
}

impl Finger {
    pub const ALL: [Finger; 5] = [
        Finger::Thumb,
        Finger::Index,
        Finger::Middle,
        Finger::Ring,
        Finger::Pinky,
    ];
}

/// One tracking snapshot: hand states plus right-hand fingertip positions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", from = "FrameRecord<T>", into = "FrameRecord<T>")]
pub struct Frame<T> {
    /// Milliseconds since recording start.
    pub t: i64,
    pub left: LeftHand,
    pub right: RightHand,
    pub fingertips: [Option<[T; 3]>; 5],
}

impl<T: Scalar> Frame<T> {
    pub fn new(t: i64, left: LeftHand, right: RightHand) -> Self {
        Self {
            t,
            left,
            right,
            fingertips: [None; 5],
        }
    }

    pub fn with_tip(mut self, finger: Finger, xyz: [T; 3]) -> Self {
        self.fingertips[finger as usize] = Some(xyz);
        self
    }

    pub fn tip(&self, finger: Finger) -> Option<[T; 3]> {
        self.fingertips[finger as usize]
    }

    pub fn tip_count(&self) -> usize {
        self.fingertips.iter().flatten().count()
    }

    /// Mean of the present fingertips.
    pub fn centroid(&self) -> Option<[T; 3]> {
        let n = self.tip_count();
        if n == 0 {
            return None;
        }
        let mut acc = [T::zero(); 3];
        for tip in self.fingertips.iter().flatten() {
            for k in 0..3 {
                acc[k] += tip[k];
            }
        }
        let n = T::from_usize_lossy(n);
        Some([acc[0] / n, acc[1] / n, acc[2] / n])
    }
}

/// Wire form of [`Frame`] used by the recording format and service payloads.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct FrameRecord<T> {
    pub t: i64,
    pub left: LeftHand,
    pub right: RightHand,
    #[serde(default)]
    pub f0: Option<[T; 3]>,
    #[serde(default)]
    pub f1: Option<[T; 3]>,
    #[serde(default)]
    pub f2: Option<[T; 3]>,
    #[serde(default)]
    pub f3: Option<[T; 3]>,
    #[serde(default)]
    pub f4: Option<[T; 3]>,
}

impl<T> From<FrameRecord<T>> for Frame<T> {
    fn from(r: FrameRecord<T>) -> Self {
        Frame {
            t: r.t,
            left: r.left,
            right: r.right,
            fingertips: [r.f0, r.f1, r.f2, r.f3, r.f4],
        }
    }
}

impl<T> From<Frame<T>> for FrameRecord<T> {
    fn from(f: Frame<T>) -> Self {
        let [f0, f1, f2, f3, f4] = f.fingertips;
        FrameRecord {
            t: f.t,
            left: f.left,
            right: f.right,
            f0,
            f1,
            f2,
            f3,
            f4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    #[default]
    File,
    Live,
    Synthetic,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Recording<T> {
    pub frames: Vec<Frame<T>>,
    pub source: Source,
    pub user_id: String,
}

impl<T: Scalar> Recording<T> {
    /// Checks strictly increasing timestamps and per-frame invariants.
    pub fn validate(&self) -> Result<()> {
        for (i, f) in self.frames.iter().enumerate() {
            validate_frame(f, i)?;
            if i > 0 && f.t <= self.frames[i - 1].t {
                return Err(Error::Validation {
                    index: i,
                    message: format!(
                        "timestamp {} does not exceed previous {}",
                        f.t,
                        self.frames[i - 1].t
                    ),
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn validate_frame<T: Scalar>(f: &Frame<T>, index: usize) -> Result<()> {
    if f.right == RightHand::Absent && f.tip_count() > 0 {
        return Err(Error::Validation {
            index,
            message: "fingertips present while right hand is absent".into(),
        });
    }
    if f.fingertips
        .iter()
        .flatten()
        .any(|c| c.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::Validation {
            index,
            message: "non-finite fingertip coordinate".into(),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GestureType {
    #[serde(alias = "single-finger")]
    Single,
    #[serde(alias = "multi-finger")]
    Multi,
}

impl GestureType {
    pub fn as_str(self) -> &'static str {
        match self {
            GestureType::Single => "single",
            GestureType::Multi => "multi",
        }
    }
}

impl std::fmt::Display for GestureType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GestureType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" | "single-finger" => Ok(GestureType::Single),
            "multi" | "multi-finger" => Ok(GestureType::Multi),
            other => Err(Error::Config(format!("unknown gesture type `{other}`"))),
        }
    }
}

/// A spotted gesture: its trajectory plus the raw frames it was cut from.
#[derive(Clone, Debug, PartialEq)]
pub struct GestureSample<T> {
    pub id: String,
    pub label: Option<String>,
    pub gesture_type: GestureType,
    pub trajectory: Trajectory<T>,
    pub user_id: String,
    /// Raw frames of the segment; empty when the sample was built from a bare trajectory.
    pub frames: Vec<Frame<T>>,
}
