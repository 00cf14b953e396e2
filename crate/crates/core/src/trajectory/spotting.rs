//! Gesture spotting from hand-state signals.
//!
//! A frame belongs to a multi-finger segment while the left hand is a fist,
//! otherwise to a single-finger segment while the right hand shows only the
//! index finger. When both hold, the left-fist gate wins.

use super::{
    Finger, Frame, GestureSample, GestureType, LeftHand, Point3, Recording, RightHand, Trajectory,
    MIN_TRAJECTORY_LEN,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Longest run of frames without a usable fingertip that is bridged by interpolation.
pub const MAX_INTERPOLATED_GAP: usize = 3;

fn frame_state<T>(f: &Frame<T>) -> Option<GestureType> {
    if f.left == LeftHand::Fist {
        Some(GestureType::Multi)
    } else if f.right == RightHand::IndexOnly {
        Some(GestureType::Single)
    } else {
        None
    }
}

/// Cuts a recording into unlabeled gesture samples.
///
/// Runs shorter than [`MIN_TRAJECTORY_LEN`] frames and runs whose fingertip
/// trace has an unbridgeable gap are dropped.
pub fn spot_gestures<T: Scalar>(recording: &Recording<T>) -> Vec<GestureSample<T>> {
    let frames = &recording.frames;
    let mut samples = Vec::new();
    let mut start = 0;
    while start < frames.len() {
        let state = frame_state(&frames[start]);
        let mut end = start + 1;
        while end < frames.len() && frame_state(&frames[end]) == state {
            end += 1;
        }
        if let Some(kind) = state {
            if end - start >= MIN_TRAJECTORY_LEN {
                let seg = &frames[start..end];
                let trace = match kind {
                    GestureType::Multi => collapse_multifinger(seg),
                    GestureType::Single => index_trace(seg),
                };
                match trace {
                    Ok(trajectory) => samples.push(GestureSample {
                        id: format!("{}seg{:03}", id_prefix(&recording.user_id), samples.len()),
                        label: None,
                        gesture_type: kind,
                        trajectory,
                        user_id: recording.user_id.clone(),
                        frames: seg.to_vec(),
                    }),
                    Err(e) => log::warn!("dropping segment at frames {start}..{end}: {e}"),
                }
            }
        }
        start = end;
    }
    samples
}

fn id_prefix(user: &str) -> String {
    if user.is_empty() {
        String::new()
    } else {
        format!("{user}-")
    }
}

/// Gesture type from the segment's opening frame, falling back to the stored type.
pub fn classify_gesture_type<T: Scalar>(sample: &GestureSample<T>) -> GestureType {
    match sample.frames.first() {
        Some(f) if f.left == LeftHand::Fist => GestureType::Multi,
        Some(_) => GestureType::Single,
        None => sample.gesture_type,
    }
}

/// Reduces multi-finger frames to the per-frame centroid of present fingertips.
pub fn collapse_multifinger<T: Scalar>(frames: &[Frame<T>]) -> Result<Trajectory<T>> {
    trace_with_gaps(frames, Frame::centroid)
}

/// Index-fingertip trace of a single-finger segment.
pub fn index_trace<T: Scalar>(frames: &[Frame<T>]) -> Result<Trajectory<T>> {
    trace_with_gaps(frames, |f| f.tip(Finger::Index))
}

fn trace_with_gaps<T, F>(frames: &[Frame<T>], pick: F) -> Result<Trajectory<T>>
where
    T: Scalar,
    F: Fn(&Frame<T>) -> Option<[T; 3]>,
{
    let raw: Vec<Option<[T; 3]>> = frames.iter().map(&pick).collect();
    let mut coords: Vec<[T; 3]> = Vec::with_capacity(raw.len());
    let mut i = 0;
    while i < raw.len() {
        match raw[i] {
            Some(c) => {
                coords.push(c);
                i += 1;
            }
            None => {
                let gap_start = i;
                while i < raw.len() && raw[i].is_none() {
                    i += 1;
                }
                let len = i - gap_start;
                // Gaps touching either end have nothing to interpolate from.
                if gap_start == 0 || i == raw.len() || len > MAX_INTERPOLATED_GAP {
                    return Err(Error::Gap {
                        start: gap_start,
                        len,
                    });
                }
                let before = coords[gap_start - 1];
                let after = raw[i].expect("gap ends on a present sample");
                let span = T::from_usize_lossy(len + 1);
                for k in 1..=len {
                    let u = T::from_usize_lossy(k) / span;
                    coords.push([
                        before[0] + (after[0] - before[0]) * u,
                        before[1] + (after[1] - before[1]) * u,
                        before[2] + (after[2] - before[2]) * u,
                    ]);
                }
            }
        }
    }
    let points = coords
        .into_iter()
        .zip(frames)
        .map(|(c, f)| Point3::from_xyz(c, T::lit(f.t as f64)))
        .collect();
    Trajectory::new(points)
}
