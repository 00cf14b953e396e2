//! Closed triangle meshes for the solid shape classes, written as OBJ text.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use crate::error::{Error, Result};

pub type V3 = [f64; 3];

/// Number of segments around every round cross-section. A multiple of four
/// so the axis extremes are vertices.
const SEGMENTS: usize = 32;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<V3>,
    /// Counter-clockwise seen from outside.
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn bounding_box(&self) -> Option<(V3, V3)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(mut lo, mut hi), v| {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
            (lo, hi)
        }))
    }

    pub fn signed_volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                    + a[2] * (b[0] * c[1] - b[1] * c[0]))
                    / 6.0
            })
            .sum()
    }

    pub fn edge_count(&self) -> usize {
        let mut edges = std::collections::BTreeSet::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    /// V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    /// Checks that every edge borders exactly two faces with opposite
    /// orientation and that no face repeats a vertex.
    pub fn check_closed_manifold(&self) -> Result<()> {
        if self.faces.is_empty() {
            return Err(Error::Empty("mesh"));
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (index, f) in self.faces.iter().enumerate() {
            if f.iter().any(|&i| i >= self.vertices.len()) {
                return Err(Error::Validation {
                    index,
                    message: "face refers to a missing vertex".into(),
                });
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Validation {
                    index,
                    message: "degenerate face".into(),
                });
            }
            for k in 0..3 {
                if directed.insert((f[k], f[(k + 1) % 3]), index).is_some() {
                    return Err(Error::Validation {
                        index,
                        message: "edge used twice in the same direction".into(),
                    });
                }
            }
        }
        for (&(a, b), &index) in &directed {
            if !directed.contains_key(&(b, a)) {
                return Err(Error::Validation {
                    index,
                    message: format!("edge {a}-{b} borders only one face"),
                });
            }
        }
        Ok(())
    }

    fn flip(&mut self) {
        for f in &mut self.faces {
            f.swap(1, 2);
        }
    }

    fn orient_outward(mut self) -> Self {
        if self.signed_volume() < 0.0 {
            self.flip();
        }
        self
    }

    /// Maps the mesh affinely onto the box `[-w/2, w/2] x [0, h] x [-d/2, d/2]`.
    pub fn fit_box(&mut self, w: f64, h: f64, d: f64) -> Result<()> {
        let (lo, hi) = self.bounding_box().ok_or(Error::Empty("mesh"))?;
        if (0..3).any(|k| !(hi[k] > lo[k])) {
            return Err(Error::Degenerate("mesh is flat".into()));
        }
        let size = [w, h, d];
        let shift = [w / 2.0, 0.0, d / 2.0];
        for v in &mut self.vertices {
            for k in 0..3 {
                v[k] = if v[k] == hi[k] {
                    size[k] - shift[k]
                } else {
                    (v[k] - lo[k]) / (hi[k] - lo[k]) * size[k] - shift[k]
                };
            }
        }
        Ok(())
    }

    pub fn to_obj(&self, comment: &str) -> String {
        let mut out = String::new();
        for line in comment.lines() {
            let _ = writeln!(out, "# {line}");
        }
        for v in &self.vertices {
            let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        out
    }

    /// Reads the `v` and triangular `f` records of OBJ text.
    pub fn from_obj(text: &str) -> Result<Self> {
        let mut mesh = Mesh::default();
        for (n, line) in text.lines().enumerate() {
            let bad = |message: &str| Error::Parse {
                line: n + 1,
                message: message.to_string(),
            };
            let mut it = line.split_whitespace();
            match it.next() {
                Some("v") => {
                    let c: Vec<f64> = it
                        .map(|t| t.parse().map_err(|_| bad("bad coordinate")))
                        .collect::<Result<_>>()?;
                    if c.len() != 3 {
                        return Err(bad("vertex needs 3 coordinates"));
                    }
                    mesh.vertices.push([c[0], c[1], c[2]]);
                }
                Some("f") => {
                    let idx: Vec<usize> = it
                        .map(|t| {
                            let head = t.split('/').next().unwrap_or(t);
                            match head.parse::<usize>() {
                                Ok(i) if i >= 1 => Ok(i - 1),
                                _ => Err(bad("bad face index")),
                            }
                        })
                        .collect::<Result<_>>()?;
                    if idx.len() != 3 {
                        return Err(bad("only triangles are supported"));
                    }
                    mesh.faces.push([idx[0], idx[1], idx[2]]);
                }
                _ => {}
            }
        }
        Ok(mesh)
    }
}

/// A pole, a run of equally sized vertex rings and a second pole, stitched
/// into a closed sphere-like surface.
fn capped_tube(start: V3, rings: &[Vec<V3>], end: V3) -> Mesh {
    let n = rings[0].len();
    let mut vertices = vec![start];
    for r in rings {
        vertices.extend_from_slice(r);
    }
    let last = vertices.len();
    vertices.push(end);
    let at = |i: usize, j: usize| 1 + i * n + j % n;
    let mut faces = Vec::new();
    for j in 0..n {
        faces.push([0, at(0, j), at(0, j + 1)]);
        for i in 0..rings.len() - 1 {
            let (a, b, c, d) = (at(i, j), at(i, j + 1), at(i + 1, j + 1), at(i + 1, j));
            faces.push([a, c, b]);
            faces.push([a, d, c]);
        }
        faces.push([last, at(rings.len() - 1, j + 1), at(rings.len() - 1, j)]);
    }
    Mesh { vertices, faces }.orient_outward()
}

/// Rings joined end to start: a torus-like surface.
fn closed_tube(rings: &[Vec<V3>]) -> Mesh {
    let n = rings[0].len();
    let m = rings.len();
    let vertices = rings.concat();
    let at = |i: usize, j: usize| (i % m) * n + j % n;
    let mut faces = Vec::new();
    for i in 0..m {
        for j in 0..n {
            let (a, b, c, d) = (at(i, j), at(i, j + 1), at(i + 1, j + 1), at(i + 1, j));
            faces.push([a, c, b]);
            faces.push([a, d, c]);
        }
    }
    Mesh { vertices, faces }.orient_outward()
}

fn ring(radius: f64, y: f64) -> Vec<V3> {
    (0..SEGMENTS)
        .map(|j| {
            let (s, c) = (TAU * j as f64 / SEGMENTS as f64).sin_cos();
            [radius * c, y, radius * s]
        })
        .collect()
}

/// Surface of revolution about the y axis. The profile `(radius, y)` runs
/// from a point on the axis to another point on the axis.
fn revolve(profile: &[(f64, f64)]) -> Mesh {
    let (first, last) = (profile[0], profile[profile.len() - 1]);
    let rings: Vec<Vec<V3>> = profile[1..profile.len() - 1].iter().map(|&(r, y)| ring(r, y)).collect();
    capped_tube([0.0, first.1, 0.0], &rings, [0.0, last.1, 0.0])
}

/// Prism over a simple polygon in the x-y plane.
fn extrude(outline: &[[f64; 2]]) -> Mesh {
    let n = outline.len() as f64;
    let cx = outline.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = outline.iter().map(|p| p[1]).sum::<f64>() / n;
    let layer = |z: f64| outline.iter().map(|p| [p[0], p[1], z]).collect::<Vec<_>>();
    capped_tube([cx, cy, -0.5], &[layer(-0.5), layer(0.5)], [cx, cy, 0.5])
}

fn square(y: f64) -> Vec<V3> {
    vec![[-0.5, y, -0.5], [0.5, y, -0.5], [0.5, y, 0.5], [-0.5, y, 0.5]]
}

fn sphere() -> Mesh {
    let lat = SEGMENTS / 2;
    let rings: Vec<Vec<V3>> = (1..lat)
        .map(|i| {
            let phi = PI * i as f64 / lat as f64;
            ring(0.5 * phi.sin(), 0.5 - 0.5 * phi.cos())
        })
        .collect();
    capped_tube([0.0, 0.0, 0.0], &rings, [0.0, 1.0, 0.0])
}

fn profile_fn(base: &[(f64, f64)], f: impl Fn(f64) -> (f64, f64), steps: usize) -> Vec<(f64, f64)> {
    let mut p = base.to_vec();
    p.extend((1..steps).map(|i| f(i as f64 / steps as f64)));
    p.push((0.0, 1.0));
    p
}

fn heart_outline() -> Vec<[f64; 2]> {
    (0..64)
        .map(|i| {
            let t = TAU * i as f64 / 64.0;
            let x = 16.0 * t.sin().powi(3);
            let y = 13.0 * t.cos() - 5.0 * (2.0 * t).cos() - 2.0 * (3.0 * t).cos() - (4.0 * t).cos();
            [x, y]
        })
        .rev()
        .collect()
}

/// Tube of radius `rho` along a rising spiral that narrows towards the top.
fn spiral_tube() -> Mesh {
    let steps = 96;
    let rho = 0.06;
    let centre = |u: f64| {
        let a = 2.0 * TAU * u;
        let r = 0.5 - 0.3 * u;
        [r * a.cos(), u, r * a.sin()]
    };
    let mut rings = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let u = i as f64 / steps as f64;
        let c = centre(u);
        let du = 1e-4;
        let (p, q) = (centre((u - du).max(0.0)), centre((u + du).min(1.0)));
        let t = normalize3([q[0] - p[0], q[1] - p[1], q[2] - p[2]]);
        let n = normalize3(cross(t, [0.0, 1.0, 0.0]));
        let b = cross(t, n);
        let section: Vec<V3> = (0..12)
            .map(|j| {
                let (s, co) = (TAU * j as f64 / 12.0).sin_cos();
                [0, 1, 2].map(|k| c[k] + rho * (co * n[k] + s * b[k]))
            })
            .collect();
        rings.push(section);
    }
    let (a, z) = (centre(0.0), centre(1.0));
    capped_tube(a, &rings, z)
}

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize3(v: V3) -> V3 {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|c| c / n)
}

/// Unit-scale mesh of a solid class, before fitting to its box.
pub(crate) fn unit_mesh(label: &str) -> Option<Mesh> {
    let mesh = match label {
        "cylinder" => revolve(&[(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (0.0, 1.0)]),
        "cone" => revolve(&[(0.0, 0.0), (0.5, 0.0), (0.0, 1.0)]),
        "sphere" => sphere(),
        "hemisphere" => revolve(&profile_fn(
            &[(0.0, 0.0), (0.5, 0.0)],
            |u| {
                let a = u * PI / 2.0;
                (0.5 * a.cos(), a.sin())
            },
            12,
        )),
        "balloon" => revolve(&profile_fn(
            &[(0.0, 0.0), (0.06, 0.0), (0.02, 0.08)],
            |u| ((PI * u).sin() * (0.3 + 0.2 * u), 0.08 + 0.92 * (1.0 - (PI * u).cos()) / 2.0),
            16,
        )),
        "cloud" => revolve(&profile_fn(
            &[(0.0, 0.0)],
            |u| (0.5 * (PI * u).sin() * (0.85 + 0.15 * (3.0 * TAU * u).sin().abs()), u),
            24,
        )),
        "bottle" => revolve(&[
            (0.0, 0.0),
            (0.5, 0.0),
            (0.5, 0.6),
            (0.2, 0.75),
            (0.2, 1.0),
            (0.0, 1.0),
        ]),
        "tree" => revolve(&[(0.0, 0.0), (0.12, 0.0), (0.12, 0.3), (0.5, 0.3), (0.0, 1.0)]),
        "pipe" => closed_tube(&[ring(0.35, 0.0), ring(0.5, 0.0), ring(0.5, 1.0), ring(0.35, 1.0)]),
        "cube" => capped_tube([0.0, 0.0, 0.0], &[square(0.0), square(1.0)], [0.0, 1.0, 0.0]),
        "pyramid" | "square-pyramid" => capped_tube([0.0, 0.0, 0.0], &[square(0.0)], [0.0, 1.0, 0.0]),
        "pyramid-3d" => capped_tube(
            [0.0, 0.0, 0.1],
            &[vec![[-0.5, 0.0, 0.5], [0.5, 0.0, 0.5], [0.0, 0.0, -0.5]]],
            [0.0, 1.0, 0.1],
        ),
        "heart-3d" => extrude(&heart_outline()),
        "house-3d" => extrude(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.6], [0.5, 1.0], [0.0, 0.6]]),
        "spiral" => spiral_tube(),
        _ => return None,
    };
    Some(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{OutputKind, SHAPES};

    #[test]
    fn every_solid_is_a_closed_manifold() {
        for s in SHAPES.iter().filter(|s| s.output == OutputKind::Mesh3D) {
            let mut m = unit_mesh(s.label).unwrap_or_else(|| panic!("{}", s.label));
            m.check_closed_manifold().unwrap_or_else(|e| panic!("{}: {e}", s.label));
            assert!(m.signed_volume() > 0.0, "{}", s.label);
            let chi = if s.label == "pipe" { 0 } else { 2 };
            assert_eq!(m.euler_characteristic(), chi, "{}", s.label);
            m.fit_box(3.0, 5.0, 7.0).unwrap();
            let (lo, hi) = m.bounding_box().unwrap();
            assert_eq!([hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]], [3.0, 5.0, 7.0], "{}", s.label);
        }
    }

    #[test]
    fn tetrahedron_counts() {
        let m = capped_tube([0.0; 3], &[vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]], [2.0; 3]);
        assert_eq!((m.vertices.len(), m.edge_count(), m.faces.len()), (5, 9, 6));
        let open = Mesh {
            vertices: vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            faces: vec![[0, 1, 2]],
        };
        assert!(open.check_closed_manifold().is_err());
    }

    #[test]
    fn obj_round_trip_is_exact() {
        let mut m = unit_mesh("sphere").unwrap();
        m.fit_box(0.1, 0.1, 0.1).unwrap();
        let back = Mesh::from_obj(&m.to_obj("sphere\nsecond line")).unwrap();
        assert_eq!(back, m);
        assert!(Mesh::from_obj("f 1 2 3 4").is_err());
        assert!(Mesh::from_obj("v 1 x 2").is_err());
    }
}
