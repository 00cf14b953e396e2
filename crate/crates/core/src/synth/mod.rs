//! Synthetic gesture recordings for all 36 shape classes.
//!
//! Every sample follows its class stroke with random size, placement and
//! rotation, a monotone speed warp, a random start point on closed strokes and
//! Gaussian fingertip jitter. The recording wraps the stroke in hand-state
//! frames so spotting can cut it out again.

mod paths;

use std::f64::consts::TAU;
use std::fs;
use std::io::BufWriter;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{GroundTruth, Manifest, ManifestEntry, MANIFEST_VERSION};
use crate::error::{Error, Result};
use crate::shapes::{self, SHAPES};
use crate::trajectory::{
    write_recording, Finger, Frame, GestureType, LeftHand, Recording, RightHand, Source,
};

use paths::{sample_stroke, shift_start, stroke, Dims, V3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseSpec {
    /// Standard deviation of per-fingertip Gaussian jitter, mm.
    pub jitter_mm: f64,
    /// Amplitude of the per-piece speed warp, below 1.
    pub speed_warp: f64,
    /// Largest start offset on closed strokes, as a fraction of the stroke length.
    pub start_phase: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            jitter_mm: 2.0,
            speed_warp: 0.2,
            start_phase: 0.05,
        }
    }
}

impl NoiseSpec {
    pub fn none() -> Self {
        Self {
            jitter_mm: 0.0,
            speed_warp: 0.0,
            start_phase: 0.0,
        }
    }
}

/// Random size, position and orientation of each sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlacementSpec {
    /// When false every range collapses to its midpoint and rotation to zero.
    pub enabled: bool,
    pub size_mm: (f64, f64),
    pub height_mm: (f64, f64),
    pub diameter_mm: (f64, f64),
    /// Centre of the drawing volume above the sensor.
    pub center_mm: [f64; 3],
    /// Half-width of the uniform offset around `center_mm`.
    pub offset_mm: [f64; 3],
    /// Largest rotation: in the drawing plane for single-finger strokes, about
    /// the vertical axis for multi-finger ones.
    pub rotation_deg: f64,
    pub frames: (usize, usize),
}

impl Default for PlacementSpec {
    fn default() -> Self {
        Self {
            enabled: true,
            size_mm: (90.0, 150.0),
            height_mm: (80.0, 150.0),
            diameter_mm: (50.0, 110.0),
            center_mm: [0.0, 200.0, 0.0],
            offset_mm: [40.0, 30.0, 30.0],
            rotation_deg: 12.0,
            frames: (90, 150),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub noise: NoiseSpec,
    pub placement: PlacementSpec,
    pub per_class: usize,
    pub users: usize,
    pub seed: u64,
    pub frame_interval_ms: i64,
    /// Non-gesture frames before and after the gated run.
    pub lead_frames: usize,
    /// Classes to generate; empty means all 36.
    pub labels: Vec<String>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            noise: NoiseSpec::default(),
            placement: PlacementSpec::default(),
            per_class: 15,
            users: 5,
            seed: 0,
            frame_interval_ms: 10,
            lead_frames: 5,
            labels: Vec::new(),
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let n = &self.noise;
        if !(n.jitter_mm >= 0.0 && n.start_phase >= 0.0 && (0.0..1.0).contains(&n.speed_warp)) {
            return Err(Error::Config(
                "noise must be nonnegative and speed_warp below 1".into(),
            ));
        }
        let p = &self.placement;
        for (name, (lo, hi)) in [("size", p.size_mm), ("height", p.height_mm), ("diameter", p.diameter_mm)] {
            if !(lo > 0.0 && lo <= hi) {
                return Err(Error::Config(format!("{name} range must be positive and ordered")));
            }
        }
        if p.frames.0 < 2 || p.frames.0 > p.frames.1 {
            return Err(Error::Config("frame range must be ordered and at least 2".into()));
        }
        if self.per_class == 0 || self.users == 0 || self.frame_interval_ms <= 0 {
            return Err(Error::Config("per_class, users and frame interval must be positive".into()));
        }
        for l in &self.labels {
            shapes::lookup(l).ok_or_else(|| Error::UnknownLabel(l.clone()))?;
        }
        Ok(())
    }

    pub fn class_labels(&self) -> Vec<String> {
        if self.labels.is_empty() {
            SHAPES.iter().map(|s| s.label.to_string()).collect()
        } else {
            self.labels.clone()
        }
    }
}

/// One generated gesture and its bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthSample {
    pub id: String,
    pub label: String,
    pub user: String,
    pub gesture_type: GestureType,
    pub recording: Recording<f64>,
    pub truth: GroundTruth,
}

/// Per-sample seed, independent of generation order.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finaliser over the pair
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64), enabled: bool) -> f64 {
    if !enabled || lo == hi {
        (lo + hi) / 2.0
    } else {
        rng.random_range(lo..=hi)
    }
}

fn symmetric(rng: &mut ChaCha8Rng, half: f64, enabled: bool) -> f64 {
    if !enabled || half == 0.0 {
        0.0
    } else {
        rng.random_range(-half..=half)
    }
}

/// Fingertip offsets from the palm in the hand frame. Thumb and middle differ
/// only along x, so their distance equals the spread.
fn finger_offsets(spread: f64) -> [V3; 5] {
    let h = spread / 2.0;
    [
        [-h, -10.0, 15.0],
        [-h / 3.0, 5.0, 25.0],
        [h, -10.0, 15.0],
        [h / 3.0, 5.0, 25.0],
        [0.0, 12.0, 35.0],
    ]
}

/// Noiseless unit-size polyline of a class stroke with about `points` points.
pub(crate) fn class_outline(label: &str, points: usize) -> Option<Vec<[f64; 3]>> {
    let dims = Dims {
        size: 1.0,
        height: 1.0,
        diameter: 1.0,
    };
    let st = stroke(label, &dims)?;
    Some(sample_stroke(&st.pieces, points, &|_, u| u))
}

/// Generates one sample of `label`. The same arguments always give the same sample.
pub fn generate_sample(
    label: &str,
    config: &SynthConfig,
    seed: u64,
    id: &str,
    user: &str,
) -> Result<SynthSample> {
    let entry = shapes::lookup(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
    let gesture_type = entry.gesture_type;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pl = &config.placement;
    let noise = &config.noise;

    let mut dims = Dims {
        size: uniform(&mut rng, pl.size_mm, pl.enabled),
        height: uniform(&mut rng, pl.height_mm, pl.enabled),
        diameter: uniform(&mut rng, pl.diameter_mm, pl.enabled),
    };
    match label {
        "sphere" => dims.height = dims.diameter,
        "cube" => dims.diameter = dims.height,
        _ => {}
    }
    let st = stroke(label, &dims).ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
    let pieces = if st.closed && noise.start_phase > 0.0 {
        shift_start(&st.pieces, rng.random_range(0.0..=noise.start_phase))
    } else {
        st.pieces
    };

    let n_frames = if pl.enabled {
        rng.random_range(pl.frames.0..=pl.frames.1)
    } else {
        (pl.frames.0 + pl.frames.1) / 2
    };
    let warps: Vec<(f64, f64)> = pieces
        .iter()
        .map(|_| {
            let a = if noise.speed_warp > 0.0 {
                noise.speed_warp * rng.random_range(-1.0..=1.0)
            } else {
                0.0
            };
            let f = f64::from(rng.random_range(1..=2u8));
            (a, f)
        })
        .collect();
    let warp = |i: usize, u: f64| {
        let (a, f) = warps[i];
        u + a * (TAU * f * u).sin() / (TAU * f)
    };
    let path = sample_stroke(&pieces, n_frames, &warp);

    let angle = symmetric(&mut rng, pl.rotation_deg, pl.enabled).to_radians();
    let (s, c) = angle.sin_cos();
    let rotate = |p: V3| -> V3 {
        match gesture_type {
            GestureType::Single => [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]],
            GestureType::Multi => [c * p[0] + s * p[2], p[1], -s * p[0] + c * p[2]],
        }
    };
    let mut origin = pl.center_mm;
    for (o, half) in origin.iter_mut().zip(pl.offset_mm) {
        *o += symmetric(&mut rng, half, pl.enabled);
    }
    let placed: Vec<V3> = path
        .iter()
        .map(|&p| {
            let r = rotate(p);
            [r[0] + origin[0], r[1] + origin[1], r[2] + origin[2]]
        })
        .collect();

    let (ymin, ymax) = placed
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[1]), hi.max(p[1])));
    let truth = GroundTruth {
        height_mm: ymax - ymin,
        diameter_mm: (gesture_type == GestureType::Multi).then_some(dims.diameter),
    };

    let jitter = Normal::new(0.0, noise.jitter_mm.max(0.0))
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut jit = |p: V3| -> [f64; 3] {
        if noise.jitter_mm > 0.0 {
            [
                p[0] + jitter.sample(&mut rng),
                p[1] + jitter.sample(&mut rng),
                p[2] + jitter.sample(&mut rng),
            ]
        } else {
            p
        }
    };
    let offsets = finger_offsets(dims.diameter).map(rotate);
    let dt = config.frame_interval_ms;
    let mut frames = Vec::with_capacity(placed.len() + 2 * config.lead_frames);
    let mut t = 0i64;
    let hand = |p: V3, left: LeftHand, right: RightHand, t: i64, jit: &mut dyn FnMut(V3) -> [f64; 3]| {
        let mut f = Frame::new(t, left, right);
        match gesture_type {
            GestureType::Single => f = f.with_tip(Finger::Index, jit(p)),
            GestureType::Multi => {
                for (finger, off) in Finger::ALL.iter().zip(&offsets) {
                    f = f.with_tip(*finger, jit([p[0] + off[0], p[1] + off[1], p[2] + off[2]]));
                }
            }
        }
        f
    };
    let (gate_left, gate_right) = match gesture_type {
        GestureType::Single => (LeftHand::Open, RightHand::IndexOnly),
        GestureType::Multi => (LeftHand::Fist, RightHand::Open),
    };
    let idle_right = match gesture_type {
        GestureType::Single => RightHand::Fist,
        GestureType::Multi => RightHand::Open,
    };
    for _ in 0..config.lead_frames {
        frames.push(hand(placed[0], LeftHand::Open, idle_right, t, &mut jit));
        t += dt;
    }
    for &p in &placed {
        frames.push(hand(p, gate_left, gate_right, t, &mut jit));
        t += dt;
    }
    let last = *placed.last().expect("non-empty stroke");
    for _ in 0..config.lead_frames {
        frames.push(hand(last, LeftHand::Open, idle_right, t, &mut jit));
        t += dt;
    }

    Ok(SynthSample {
        id: id.to_string(),
        label: label.to_string(),
        user: user.to_string(),
        gesture_type,
        recording: Recording {
            frames,
            source: Source::Synthetic,
            user_id: user.to_string(),
        },
        truth,
    })
}

/// `per_class` samples of every configured class, in class order.
pub fn generate_dataset(config: &SynthConfig) -> Result<Vec<SynthSample>> {
    config.validate()?;
    let labels = config.class_labels();
    let jobs: Vec<(usize, &str, usize)> = labels
        .iter()
        .enumerate()
        .flat_map(|(c, l)| (0..config.per_class).map(move |r| (c, l.as_str(), r)))
        .collect();
    jobs.par_iter()
        .map(|&(c, label, rep)| {
            let index = (c * config.per_class + rep) as u64;
            let user = format!("u{:02}", rep % config.users);
            let id = format!("{label}-{rep:03}");
            generate_sample(label, config, derive_seed(config.seed, index), &id, &user)
        })
        .collect()
}

/// Writes one recording per sample under `dir/recordings` plus `dir/manifest.json`.
pub fn write_dataset(samples: &[SynthSample], config: &SynthConfig, dir: &Path) -> Result<Manifest> {
    let rec_dir = dir.join("recordings");
    fs::create_dir_all(&rec_dir)?;
    let mut entries = Vec::with_capacity(samples.len());
    for s in samples {
        let rel = format!("recordings/{}.jsonl", s.id);
        let file = fs::File::create(dir.join(&rel))?;
        write_recording(BufWriter::new(file), &s.recording)?;
        entries.push(ManifestEntry {
            id: s.id.clone(),
            path: rel,
            label: s.label.clone(),
            user: s.user.clone(),
            gesture_type: s.gesture_type,
            truth: Some(s.truth),
        });
    }
    let manifest = Manifest {
        version: MANIFEST_VERSION,
        generator: Some(serde_json::to_value(config).map_err(|e| Error::Config(e.to_string()))?),
        samples: entries,
    };
    manifest.save(&dir.join("manifest.json"))?;
    Ok(manifest)
}
