//! Per-point local descriptors over a trajectory.
//!
//! Signed deltas follow the backward-minus-forward convention
//! `Δx(t) = x(t-1) - x(t+1)`, so motion along +x yields `cos = -1`.
//! Vicinity features use the 7-point window `t-3..=t+3`; its extents are
//! non-negative bounding-box sizes, unrelated to the signed deltas.
//! Degenerate configurations return a fixed sentinel with `flagged = true`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trajectory::{Point3, Trajectory};

/// Half-width of the vicinity window.
pub const WINDOW_RADIUS: usize = 3;

/// A feature value plus whether it is a degenerate-case sentinel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flagged<V> {
    pub value: V,
    pub flagged: bool,
}

impl<V> Flagged<V> {
    fn ok(value: V) -> Self {
        Self { value, flagged: false }
    }

    fn sentinel(value: V) -> Self {
        Self { value, flagged: true }
    }
}

/// Whether a vicinity feature looks at x/y only or at all three axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dims {
    Two,
    Three,
}

/// Bounding-box extents and path length of the `t-3..=t+3` window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowExtents<T> {
    pub dx: T,
    pub dy: T,
    pub dz: T,
    pub path_len: T,
}

impl<T: Scalar> WindowExtents<T> {
    pub fn at(trajectory: &Trajectory<T>, t: usize) -> Result<Self> {
        let pts = trajectory.points();
        check_range(pts.len(), t, WINDOW_RADIUS)?;
        let win = &pts[t - WINDOW_RADIUS..=t + WINDOW_RADIUS];
        let mut lo = win[0].xyz();
        let mut hi = lo;
        for p in &win[1..] {
            for (k, v) in p.xyz().into_iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        let path_len = win.windows(2).map(|w| w[0].dist(&w[1])).sum();
        Ok(Self {
            dx: hi[0] - lo[0],
            dy: hi[1] - lo[1],
            dz: hi[2] - lo[2],
            path_len,
        })
    }

    /// Same window with depth ignored.
    pub fn planar(trajectory: &Trajectory<T>, t: usize) -> Result<Self> {
        let pts = trajectory.points();
        check_range(pts.len(), t, WINDOW_RADIUS)?;
        let mut ext = Self::at(trajectory, t)?;
        ext.dz = T::zero();
        ext.path_len = pts[t - WINDOW_RADIUS..=t + WINDOW_RADIUS]
            .windows(2)
            .map(|w| {
                let dx = w[0].x - w[1].x;
                let dy = w[0].y - w[1].y;
                (dx * dx + dy * dy).sqrt()
            })
            .sum();
        Ok(ext)
    }
}

fn check_range(n: usize, t: usize, radius: usize) -> Result<()> {
    if t < radius || t + radius >= n {
        return Err(Error::Validation {
            index: t,
            message: format!("needs {radius} neighbours on each side in a {n}-point trajectory"),
        });
    }
    Ok(())
}

fn signed_delta<T: Scalar>(pts: &[Point3<T>], t: usize) -> [T; 3] {
    let (a, b) = (&pts[t - 1], &pts[t + 1]);
    [a.x - b.x, a.y - b.y, a.z - b.z]
}

/// `(cos θ, sin θ)` of the local writing direction in the x-y plane.
pub fn direction_2d<T: Scalar>(trajectory: &Trajectory<T>, t: usize) -> Result<Flagged<[T; 2]>> {
    let pts = trajectory.points();
    check_range(pts.len(), t, 1)?;
    let [dx, dy, _] = signed_delta(pts, t);
    let ds = (dx * dx + dy * dy).sqrt();
    if !(ds > T::zero()) {
        return Ok(Flagged::sentinel([T::zero(); 2]));
    }
    Ok(Flagged::ok([dx / ds, dy / ds]))
}

/// Direction cosines `(cos α, cos β, cos γ)` of the local direction.
pub fn direction_3d<T: Scalar>(trajectory: &Trajectory<T>, t: usize) -> Result<Flagged<[T; 3]>> {
    let pts = trajectory.points();
    check_range(pts.len(), t, 1)?;
    let [dx, dy, dz] = signed_delta(pts, t);
    let ds = (dx * dx + dy * dy + dz * dz).sqrt();
    if !(ds > T::zero()) {
        return Ok(Flagged::sentinel([T::zero(); 3]));
    }
    Ok(Flagged::ok([dx / ds, dy / ds, dz / ds]))
}

/// `(cos, sin)` of the turning angle between the directions at `t-1` and `t+1`.
pub fn curvature_2d<T: Scalar>(trajectory: &Trajectory<T>, t: usize) -> Result<Flagged<[T; 2]>> {
    check_range(trajectory.len(), t, 2)?;
    let before = direction_2d(trajectory, t - 1)?;
    let after = direction_2d(trajectory, t + 1)?;
    if before.flagged || after.flagged {
        return Ok(Flagged::sentinel([T::one(), T::zero()]));
    }
    let [c1, s1] = before.value;
    let [c2, s2] = after.value;
    Ok(Flagged::ok([c1 * c2 + s1 * s2, c1 * s2 - s1 * c2]))
}

/// Magnitude of the change of unit tangent per unit distance.
///
/// Tangents are the unit chords `P(t+2) - P(t)` and `P(t) - P(t-2)`; the
/// distance is `|P(t+1) - P(t-1)|`.
pub fn curvature_3d<T: Scalar>(trajectory: &Trajectory<T>, t: usize) -> Result<Flagged<T>> {
    let pts = trajectory.points();
    check_range(pts.len(), t, 2)?;
    let unit = |a: &Point3<T>, b: &Point3<T>| -> Option<[T; 3]> {
        let d = [b.x - a.x, b.y - a.y, b.z - a.z];
        let len = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        (len > T::zero()).then(|| [d[0] / len, d[1] / len, d[2] / len])
    };
    let forward = unit(&pts[t], &pts[t + 2]);
    let backward = unit(&pts[t - 2], &pts[t]);
    let dp = pts[t + 1].dist(&pts[t - 1]);
    match (forward, backward) {
        (Some(f), Some(b)) if dp > T::zero() => {
            let d = [f[0] - b[0], f[1] - b[1], f[2] - b[2]];
            Ok(Flagged::ok(
                (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() / dp,
            ))
        }
        _ => Ok(Flagged::sentinel(T::zero())),
    }
}

/// Height-versus-width balance `(dy - dx) / (dy + dx)` in `[-1, 1]`.
pub fn aspect_2d<T: Scalar>(w: &WindowExtents<T>) -> Flagged<T> {
    let den = w.dy + w.dx;
    if !(den > T::zero()) {
        return Flagged::sentinel(T::zero());
    }
    Flagged::ok((w.dy - w.dx) / den)
}

/// Pairwise aspects `(y:x, z:y, z:x)`, each in `[-1, 1]`.
pub fn aspect_3d<T: Scalar>(w: &WindowExtents<T>) -> Flagged<[T; 3]> {
    let two = T::lit(2.0);
    let mut flagged = false;
    let mut ratio = |num: T, other: T| {
        let den = num + other;
        if den > T::zero() {
            two * num / den - T::one()
        } else {
            flagged = true;
            T::zero()
        }
    };
    let value = [ratio(w.dy, w.dx), ratio(w.dz, w.dy), ratio(w.dz, w.dx)];
    Flagged { value, flagged }
}

/// Window path length over its largest extent, minus 2.
pub fn curliness<T: Scalar>(w: &WindowExtents<T>, dims: Dims) -> Flagged<T> {
    let max = match dims {
        Dims::Two => w.dx.max(w.dy),
        Dims::Three => w.dx.max(w.dy).max(w.dz),
    };
    if !(max > T::zero()) {
        return Flagged::sentinel(-T::one());
    }
    Flagged::ok(w.path_len / max - T::lit(2.0))
}

/// Direction ratios `(l, m, n)` of the chord `P(t+3) - P(t-3)`.
pub fn slope_3d<T: Scalar>(trajectory: &Trajectory<T>, t: usize) -> Result<Flagged<[T; 3]>> {
    let pts = trajectory.points();
    check_range(pts.len(), t, WINDOW_RADIUS)?;
    let (a, b) = (&pts[t - WINDOW_RADIUS], &pts[t + WINDOW_RADIUS]);
    let d = [b.x - a.x, b.y - a.y, b.z - a.z];
    let s = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    if !(s > T::zero()) {
        return Ok(Flagged::sentinel([T::zero(); 3]));
    }
    Ok(Flagged::ok([d[0] / s, d[1] / s, d[2] / s]))
}

/// Mean squared distance of the window's points from the chord joining its
/// first and last points, averaged over all seven window points.
pub fn lineness<T: Scalar>(trajectory: &Trajectory<T>, t: usize) -> Result<Flagged<T>> {
    let pts = trajectory.points();
    check_range(pts.len(), t, WINDOW_RADIUS)?;
    let win = &pts[t - WINDOW_RADIUS..=t + WINDOW_RADIUS];
    let (a, b) = (&win[0], &win[win.len() - 1]);
    let u = [b.x - a.x, b.y - a.y, b.z - a.z];
    let uu = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    if !(uu > T::zero()) {
        return Ok(Flagged::sentinel(T::zero()));
    }
    let sum: T = win
        .iter()
        .map(|p| {
            let w = [p.x - a.x, p.y - a.y, p.z - a.z];
            let c = [
                w[1] * u[2] - w[2] * u[1],
                w[2] * u[0] - w[0] * u[2],
                w[0] * u[1] - w[1] * u[0],
            ];
            (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]) / uu
        })
        .sum();
    Ok(Flagged::ok(sum / T::from_usize_lossy(win.len())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn traj(coords: &[[f64; 3]]) -> Trajectory<f64> {
        Trajectory::from_xyz(coords.iter().copied()).unwrap()
    }

    fn line(step: [f64; 3], n: usize) -> Trajectory<f64> {
        traj(
            &(0..n)
                .map(|i| {
                    let i = i as f64;
                    [step[0] * i, step[1] * i, step[2] * i]
                })
                .collect::<Vec<_>>(),
        )
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn direction_sign_convention() {
        let d = direction_2d(&line([2.0, 0.0, 0.0], 7), 3).unwrap();
        assert_eq!(d, Flagged::ok([-1.0, 0.0]));
        let d = direction_2d(&line([0.0, -1.5, 0.0], 7), 3).unwrap();
        assert_eq!(d.value, [0.0, 1.0]);
        let d = direction_2d(&line([1.0, 1.0, 0.0], 7), 3).unwrap();
        assert!(close(d.value[0], -FRAC_1_SQRT_2) && close(d.value[1], -FRAC_1_SQRT_2));
    }

    #[test]
    fn direction_3d_cases() {
        assert_eq!(
            direction_3d(&line([0.0, 0.0, 1.0], 7), 2).unwrap().value,
            [0.0, 0.0, -1.0]
        );
        let d = direction_3d(&line([1.0, 1.0, 1.0], 7), 2).unwrap().value;
        for v in d {
            assert!(close(v, -1.0 / 3f64.sqrt()));
        }
        let d = direction_3d(&line([1.0, 3.0, 0.0], 7), 2).unwrap().value;
        assert_eq!(d[2], 0.0);
    }

    #[test]
    fn stationary_window_flagged() {
        let t = traj(&[[1.0, 1.0, 1.0]; 7]);
        assert_eq!(direction_2d(&t, 3).unwrap(), Flagged::sentinel([0.0, 0.0]));
        assert!(direction_3d(&t, 3).unwrap().flagged);
        assert_eq!(curvature_2d(&t, 3).unwrap(), Flagged::sentinel([1.0, 0.0]));
        assert_eq!(curvature_3d(&t, 3).unwrap(), Flagged::sentinel(0.0));
        assert_eq!(slope_3d(&t, 3).unwrap(), Flagged::sentinel([0.0; 3]));
        assert_eq!(lineness(&t, 3).unwrap(), Flagged::sentinel(0.0));
    }

    #[test]
    fn out_of_range_index() {
        let t = line([1.0, 0.0, 0.0], 7);
        assert!(direction_2d(&t, 0).is_err());
        assert!(curvature_2d(&t, 1).is_err());
        assert!(slope_3d(&t, 4).is_err());
        assert!(WindowExtents::at(&t, 2).is_err());
    }

    #[test]
    fn curvature_2d_straight_and_corner() {
        assert_eq!(
            curvature_2d(&line([1.0, 0.0, 0.0], 7), 3).unwrap().value,
            [1.0, 0.0]
        );
        // +x then +y: left turn by 90 degrees at the corner, index 2
        let t = traj(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [2.0, 1.0, 0.0],
            [2.0, 2.0, 0.0],
            [2.0, 3.0, 0.0],
        ]);
        // directions at 1 and 3 use chords (0,2) along x and (2,4) along y
        let c = curvature_2d(&t, 2).unwrap().value;
        assert!(close(c[0], 0.0), "{c:?}");
        assert!(close(c[1].abs(), 1.0), "{c:?}");
    }

    #[test]
    fn curvature_2d_octagon() {
        // Oracle: vertices of a regular octagon, turning 45 degrees per vertex.
        // Directions at k-1 and k+1 use chords two vertices apart, which turn
        // by 2 x 45 = 90 degrees. Oversample each edge so neighbours lie on one
        // edge: with 4 points per edge, t-1 and t+1 straddle the vertex only.
        let verts: Vec<[f64; 3]> = (0..9)
            .map(|k| {
                let a = k as f64 * PI / 4.0;
                [a.cos(), a.sin(), 0.0]
            })
            .collect();
        let t = traj(&verts);
        let expected = [(PI / 2.0).cos(), (PI / 2.0).sin()];
        for i in 2..=6 {
            let c = curvature_2d(&t, i).unwrap().value;
            assert!(close(c[0], expected[0]) && close(c[1], expected[1]), "{i}: {c:?}");
        }
        // Midpoint-subdivided octagon: neighbours at t±1 straddle one 45 degree turn.
        let mut dense = Vec::new();
        for k in 0..8 {
            let a = verts[k];
            let b = verts[k + 1];
            dense.push(a);
            dense.push([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, 0.0]);
        }
        dense.push(verts[8]);
        let t = traj(&dense);
        let quarter = PI / 4.0;
        for i in (2..dense.len() - 2).step_by(2) {
            let c = curvature_2d(&t, i).unwrap().value;
            assert!(close(c[0], quarter.cos()) && close(c[1], quarter.sin()), "{i}: {c:?}");
        }
    }

    #[test]
    fn curvature_3d_line_and_circle() {
        assert_eq!(curvature_3d(&line([1.0, 2.0, 3.0], 9), 4).unwrap().value, 0.0);
        let circle: Vec<[f64; 3]> = (0..64)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / 64.0;
                [a.cos(), a.sin(), 0.0]
            })
            .collect();
        let t = traj(&circle);
        let k0 = curvature_3d(&t, 2).unwrap().value;
        assert!(k0 > 0.0);
        for i in 2..62 {
            assert!((curvature_3d(&t, i).unwrap().value - k0).abs() < 1e-9);
        }
    }

    #[test]
    fn aspect_cases() {
        let w = |dx: f64, dy: f64, dz: f64| WindowExtents {
            dx,
            dy,
            dz,
            path_len: 1.0,
        };
        assert_eq!(aspect_2d(&w(2.0, 2.0, 0.0)).value, 0.0);
        assert_eq!(aspect_2d(&w(0.0, 2.0, 0.0)).value, 1.0);
        assert_eq!(aspect_2d(&w(2.0, 0.0, 0.0)).value, -1.0);
        assert_eq!(aspect_2d(&w(0.0, 0.0, 0.0)), Flagged::sentinel(0.0));
        assert_eq!(aspect_3d(&w(1.0, 1.0, 1.0)), Flagged::ok([0.0, 0.0, 0.0]));
        assert_eq!(aspect_3d(&w(1.0, 1.0, 0.0)), Flagged::ok([0.0, -1.0, -1.0]));
        assert_eq!(aspect_3d(&w(1.0, 3.0, 1.0)).value, [0.5, -0.5, 0.0]);
        assert_eq!(aspect_3d(&w(1.0, 0.0, 0.0)), Flagged::sentinel([-1.0, 0.0, -1.0]));
    }

    #[test]
    fn curliness_cases() {
        let ext = |dx: f64, dy: f64, path_len: f64| WindowExtents {
            dx,
            dy,
            dz: 0.0,
            path_len,
        };
        assert_eq!(curliness(&ext(4.0, 0.0, 4.0), Dims::Three).value, -1.0);
        let c = curliness(&ext(3.0, 3.0, 3.0 * 2f64.sqrt()), Dims::Two).value;
        assert!(close(c, 2f64.sqrt() - 2.0));
        assert_eq!(curliness(&ext(2.0, 1.0, 6.0), Dims::Two).value, 1.0);
        assert_eq!(curliness(&ext(0.0, 0.0, 0.0), Dims::Two), Flagged::sentinel(-1.0));
    }

    #[test]
    fn slope_cases() {
        assert_eq!(slope_3d(&line([0.5, 0.0, 0.0], 7), 3).unwrap().value, [1.0, 0.0, 0.0]);
        let s = slope_3d(&line([2.0, 2.0, 2.0], 7), 3).unwrap().value;
        for v in s {
            assert!(close(v, 1.0 / 3f64.sqrt()));
        }
        // closed loop: P(t+3) == P(t-3)
        let loop_pts: Vec<[f64; 3]> = (0..7)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / 6.0;
                [a.cos(), a.sin(), 0.0]
            })
            .collect();
        let mut loop_pts = loop_pts;
        loop_pts[6] = loop_pts[0];
        assert_eq!(slope_3d(&traj(&loop_pts), 3).unwrap(), Flagged::sentinel([0.0; 3]));
    }

    #[test]
    fn lineness_cases() {
        assert_eq!(lineness(&line([1.0, -1.0, 0.5], 7), 3).unwrap().value, 0.0);
        let mut pts: Vec<[f64; 3]> = (0..7).map(|i| [i as f64, 0.0, 0.0]).collect();
        pts[2][1] = 2.0;
        assert!(close(lineness(&traj(&pts), 3).unwrap().value, 4.0 / 7.0));
    }

    #[test]
    fn lineness_matches_point_to_line_oracle() {
        // Oracle: distance via projection onto the chord (independent of the
        // cross-product route used above).
        let arc: Vec<[f64; 3]> = (0..7)
            .map(|i| {
                let a = 0.2 + 0.25 * i as f64;
                [3.0 * a.cos(), 3.0 * a.sin(), 0.0]
            })
            .collect();
        let (a, b) = (arc[0], arc[6]);
        let u = [b[0] - a[0], b[1] - a[1]];
        let len2 = u[0] * u[0] + u[1] * u[1];
        let oracle: f64 = arc
            .iter()
            .map(|p| {
                let w = [p[0] - a[0], p[1] - a[1]];
                let s = (w[0] * u[0] + w[1] * u[1]) / len2;
                let foot = [a[0] + s * u[0], a[1] + s * u[1]];
                (p[0] - foot[0]).powi(2) + (p[1] - foot[1]).powi(2)
            })
            .sum::<f64>()
            / 7.0;
        let got = lineness(&traj(&arc), 3).unwrap().value;
        assert!((got - oracle).abs() < 1e-12, "{got} vs {oracle}");
    }

    #[test]
    fn window_extents_bounds() {
        let t = traj(&[
            [0.0, 0.0, 0.0],
            [1.0, 2.0, 0.0],
            [2.0, 0.0, 1.0],
            [3.0, 2.0, 0.0],
            [4.0, 0.0, 0.0],
            [5.0, 2.0, 3.0],
            [6.0, 0.0, 0.0],
        ]);
        let w = WindowExtents::at(&t, 3).unwrap();
        assert_eq!((w.dx, w.dy, w.dz), (6.0, 2.0, 3.0));
        assert!(w.path_len >= w.dx.max(w.dy).max(w.dz) - 1e-12);
        let p = WindowExtents::planar(&t, 3).unwrap();
        assert_eq!(p.dz, 0.0);
        assert!(p.path_len < w.path_len);
    }
}
