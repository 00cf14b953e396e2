//! Geometric parameters of a spotted gesture and the artifact drawn from them.
//!
//! Solid classes become closed triangle meshes (OBJ text) whose bounding box
//! is `diameter x height x diameter`, with y up. Flat symbols become SVG
//! drawings of `width x height` millimetres.

pub mod mesh;
mod vector;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::shapes::{self, OutputKind};
use crate::trajectory::{Finger, GestureSample};

pub use mesh::Mesh;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeClass {
    Small,
    Medium,
    Large,
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Large => "large",
        })
    }
}

/// Size class boundaries in mm: small below `small_below`, large from `large_from`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SizeThresholds {
    pub small_below: f64,
    pub large_from: f64,
}

impl Default for SizeThresholds {
    fn default() -> Self {
        Self {
            small_below: 80.0,
            large_from: 160.0,
        }
    }
}

impl SizeThresholds {
    pub fn validate(&self) -> Result<()> {
        if !(self.small_below.is_finite() && self.large_from.is_finite() && self.small_below < self.large_from) {
            return Err(Error::Config(format!(
                "size thresholds must be finite and increasing, got {} and {}",
                self.small_below, self.large_from
            )));
        }
        Ok(())
    }
}

pub fn size_class(value: f64, thresholds: &SizeThresholds) -> Result<SizeClass> {
    thresholds.validate()?;
    Ok(if value < thresholds.small_below {
        SizeClass::Small
    } else if value >= thresholds.large_from {
        SizeClass::Large
    } else {
        SizeClass::Medium
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractConfig {
    /// Index of the vertical coordinate (1 = y).
    pub vertical_axis: usize,
    pub thresholds: SizeThresholds,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            vertical_axis: 1,
            thresholds: SizeThresholds::default(),
        }
    }
}

/// Measurements in mm. `width` and `depth` are the horizontal extents of the
/// axis-aligned box, `length` its longest side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderParams {
    pub height: f64,
    pub diameter: f64,
    pub width: f64,
    pub depth: f64,
    pub length: f64,
    pub size_class: SizeClass,
    /// Set when no thumb/middle pair was tracked and `diameter` is the box width.
    #[serde(default)]
    pub diameter_from_box: bool,
}

impl RenderParams {
    /// Params for a requested height and diameter; the box is `diameter x height x diameter`.
    pub fn new(height: f64, diameter: f64, thresholds: &SizeThresholds) -> Result<Self> {
        let p = Self {
            height,
            diameter,
            width: diameter,
            depth: diameter,
            length: height.max(diameter),
            size_class: size_class(height.max(diameter), thresholds)?,
            diameter_from_box: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let dims = [self.height, self.diameter, self.width, self.depth, self.length];
        if dims.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Config("render dimensions must be finite and nonnegative".into()));
        }
        Ok(())
    }

    pub fn box_area(&self) -> f64 {
        self.width * self.height
    }

    pub fn box_volume(&self) -> f64 {
        self.width * self.height * self.depth
    }
}

/// Measures a spotted gesture. The diameter is the mean thumb-middle distance
/// over frames that track both; otherwise the box width, flagged.
pub fn extract_params<T: Scalar>(sample: &GestureSample<T>, config: &ExtractConfig) -> Result<RenderParams> {
    if config.vertical_axis > 2 {
        return Err(Error::Config("vertical_axis must be 0, 1 or 2".into()));
    }
    let (lo, hi) = sample
        .trajectory
        .bounding_box()
        .ok_or_else(|| Error::Degenerate("empty trajectory".into()))?;
    let ext: Vec<f64> = (0..3).map(|k| (hi[k] - lo[k]).to_f64_lossy()).collect();
    if sample.trajectory.len() < 2 || ext.iter().all(|e| *e == 0.0) {
        return Err(Error::Degenerate("trajectory does not move".into()));
    }
    let v = config.vertical_axis;
    let horizontal: Vec<usize> = (0..3).filter(|&k| k != v).collect();
    let (height, width, depth) = (ext[v], ext[horizontal[0]], ext[horizontal[1]]);

    let spans: Vec<f64> = sample
        .frames
        .iter()
        .filter_map(|f| {
            let (a, b) = (f.tip(Finger::Thumb)?, f.tip(Finger::Middle)?);
            let d2 = (0..3).map(|k| (a[k] - b[k]) * (a[k] - b[k])).fold(T::zero(), |s, x| s + x);
            Some(d2.sqrt().to_f64_lossy())
        })
        .collect();
    let (diameter, diameter_from_box) = if spans.is_empty() {
        (width, true)
    } else {
        (spans.iter().sum::<f64>() / spans.len() as f64, false)
    };
    Ok(RenderParams {
        height,
        diameter,
        width,
        depth,
        length: height.max(width).max(depth),
        size_class: size_class(height.max(diameter), &config.thresholds)?,
        diameter_from_box,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderSpec {
    pub label: String,
    pub params: RenderParams,
    /// Must match the label's kind when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputKind>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub kind: OutputKind,
    pub body: String,
}

impl Artifact {
    pub fn extension(&self) -> &'static str {
        match self.kind {
            OutputKind::Mesh3D => "mesh",
            OutputKind::Vector2D => "vec",
        }
    }

    pub fn media_type(&self) -> &'static str {
        match self.kind {
            OutputKind::Mesh3D => "model/obj",
            OutputKind::Vector2D => "image/svg+xml",
        }
    }
}

/// The mesh of a solid class at the requested size.
pub fn build_mesh(label: &str, params: &RenderParams) -> Result<Mesh> {
    let mut m = mesh::unit_mesh(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
    if !(params.diameter > 0.0 && params.height > 0.0) {
        return Err(Error::Degenerate(format!("{label} needs a positive height and diameter")));
    }
    m.fit_box(params.diameter, params.height, params.diameter)?;
    Ok(m)
}

pub fn render(spec: &RenderSpec) -> Result<Artifact> {
    let entry = shapes::lookup(&spec.label).ok_or_else(|| Error::UnknownLabel(spec.label.clone()))?;
    spec.params.validate()?;
    if let Some(kind) = spec.output {
        if kind != entry.output {
            return Err(Error::Config(format!("{} is drawn as {:?}, not {kind:?}", spec.label, entry.output)));
        }
    }
    let body = match entry.output {
        OutputKind::Mesh3D => {
            let p = &spec.params;
            let m = build_mesh(&spec.label, p)?;
            m.to_obj(&format!(
                "{} height {} diameter {} size {}",
                spec.label, p.height, p.diameter, p.size_class
            ))
        }
        OutputKind::Vector2D => vector::svg(&spec.label, spec.params.width, spec.params.height)?,
    };
    Ok(Artifact {
        kind: entry.output,
        body,
    })
}

/// Contents of the `.params.json` file written next to every artifact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub id: String,
    pub label: String,
    pub output: OutputKind,
    pub params: RenderParams,
    pub box_area_mm2: f64,
    pub box_volume_mm3: f64,
    /// Free-form description of what produced the parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

/// Writes `<id>.<label>.(mesh|vec)` and `<id>.<label>.params.json`; returns both paths.
pub fn write_artifact(
    dir: &Path,
    id: &str,
    spec: &RenderSpec,
    provenance: Option<serde_json::Value>,
) -> Result<(PathBuf, PathBuf)> {
    let art = render(spec)?;
    fs::create_dir_all(dir)?;
    let stem = format!("{id}.{}", spec.label);
    let body_path = dir.join(format!("{stem}.{}", art.extension()));
    fs::write(&body_path, &art.body)?;
    let side = Sidecar {
        id: id.to_string(),
        label: spec.label.clone(),
        output: art.kind,
        params: spec.params,
        box_area_mm2: spec.params.box_area(),
        box_volume_mm3: spec.params.box_volume(),
        provenance,
    };
    let side_path = dir.join(format!("{stem}.params.json"));
    let mut text = serde_json::to_string_pretty(&side).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    fs::write(&side_path, text)?;
    Ok((body_path, side_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{Frame, GestureType, LeftHand, RightHand, Trajectory};

    #[test]
    fn size_class_boundaries() {
        let t = SizeThresholds::default();
        assert_eq!(size_class(79.9, &t).unwrap(), SizeClass::Small);
        assert_eq!(size_class(80.0, &t).unwrap(), SizeClass::Medium);
        assert_eq!(size_class(120.0, &t).unwrap(), SizeClass::Medium);
        assert_eq!(size_class(160.0, &t).unwrap(), SizeClass::Large);
        let bad = SizeThresholds {
            small_below: 10.0,
            large_from: 10.0,
        };
        assert!(size_class(1.0, &bad).is_err());
    }

    fn circle_xz(r: f64) -> GestureSample<f64> {
        let pts = (0..=40).map(|i| {
            let a = std::f64::consts::TAU * i as f64 / 40.0;
            [r * a.cos() + 3.0, 50.0, r * a.sin() - 7.0]
        });
        GestureSample {
            id: "c".into(),
            label: None,
            gesture_type: GestureType::Single,
            trajectory: Trajectory::from_xyz(pts).unwrap(),
            user_id: String::new(),
            frames: vec![],
        }
    }

    #[test]
    fn planar_circle_box() {
        let p = extract_params(&circle_xz(20.0), &ExtractConfig::default()).unwrap();
        assert!((p.width - 40.0).abs() < 1e-12 && (p.depth - 40.0).abs() < 1e-9);
        assert_eq!(p.height, 0.0);
        assert!(p.diameter_from_box);
        assert_eq!(p.diameter, p.width);
        assert_eq!(p.size_class, SizeClass::Small);
    }

    #[test]
    fn thumb_middle_diameter() {
        let mut s = circle_xz(20.0);
        s.frames = (0..4)
            .map(|i| {
                Frame::new(i, LeftHand::Fist, RightHand::Open)
                    .with_tip(Finger::Thumb, [0.0, 0.0, 0.0])
                    .with_tip(Finger::Middle, [3.0, 4.0, 0.0])
            })
            .collect();
        let p = extract_params(&s, &ExtractConfig::default()).unwrap();
        assert_eq!(p.diameter, 5.0);
        assert!(!p.diameter_from_box);
    }

    #[test]
    fn still_trajectory_is_degenerate() {
        let mut s = circle_xz(0.0);
        s.trajectory = Trajectory::from_xyz((0..9).map(|_| [1.0, 2.0, 3.0])).unwrap();
        assert!(matches!(extract_params(&s, &ExtractConfig::default()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn render_kinds_and_errors() {
        let params = RenderParams::new(120.0, 60.0, &SizeThresholds::default()).unwrap();
        let spec = |label: &str| RenderSpec {
            label: label.into(),
            params,
            output: None,
        };
        let cyl = render(&spec("cylinder")).unwrap();
        assert_eq!(cyl.extension(), "mesh");
        let m = Mesh::from_obj(&cyl.body).unwrap();
        let (lo, hi) = m.bounding_box().unwrap();
        assert!((hi[0] - lo[0] - 60.0).abs() < 1e-6 && (hi[1] - lo[1] - 120.0).abs() < 1e-6);
        let sphere = build_mesh("sphere", &params).unwrap();
        let svg = render(&spec("circle")).unwrap();
        assert_eq!(svg.extension(), "vec");
        assert!(svg.body.contains("<svg"));
        assert!(sphere.vertices.len() > 100);
        assert!(matches!(render(&spec("blob")), Err(Error::UnknownLabel(_))));
        let wrong = RenderSpec {
            output: Some(OutputKind::Vector2D),
            ..spec("cube")
        };
        assert!(render(&wrong).is_err());
    }

    #[test]
    fn sphere_vertices_on_radius() {
        let p = RenderParams::new(90.0, 90.0, &SizeThresholds::default()).unwrap();
        let m = build_mesh("sphere", &p).unwrap();
        for v in &m.vertices {
            let r = (v[0] * v[0] + (v[1] - 45.0).powi(2) + v[2] * v[2]).sqrt();
            assert!((r - 45.0).abs() < 1e-6);
        }
    }

    #[test]
    fn writes_artifact_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let spec = RenderSpec {
            label: "heart-3d".into(),
            params: RenderParams::new(100.0, 80.0, &SizeThresholds::default()).unwrap(),
            output: Some(OutputKind::Mesh3D),
        };
        let (body, side) = write_artifact(dir.path(), "s1", &spec, None).unwrap();
        assert!(body.ends_with("s1.heart-3d.mesh"));
        assert!(side.ends_with("s1.heart-3d.params.json"));
        let sc: Sidecar = serde_json::from_str(&fs::read_to_string(side).unwrap()).unwrap();
        assert_eq!(sc.params, spec.params);
        let m = Mesh::from_obj(&fs::read_to_string(body).unwrap()).unwrap();
        m.check_closed_manifold().unwrap();
        assert_eq!(m.euler_characteristic(), 2);
    }
}
