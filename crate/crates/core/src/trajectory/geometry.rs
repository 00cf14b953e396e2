use super::{Point3, Trajectory};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_RESAMPLE_LEN: usize = 64;

/// Resamples to `n` points spaced at one common straight-line distance along the
/// polyline, keeping both endpoints.
///
/// On a straight polyline this is plain arc-length spacing. On curved input the
/// common chord is solved for, so consecutive output points are exactly
/// equidistant and resampling the output again returns it unchanged. Paths
/// that fold back towards earlier points may leave a shorter final chord.
pub fn resample<T: Scalar>(trajectory: &Trajectory<T>, n: usize) -> Result<Trajectory<T>> {
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    let pts = trajectory.points();
    if pts.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: pts.len(),
        });
    }
    let total = trajectory.path_length();
    if !(total > T::zero()) {
        return Err(Error::Degenerate("all trajectory points coincide".into()));
    }
    let steps = T::from_usize_lossy(n - 1);
    let end = *pts.last().expect("non-empty");

    // chord <= arc, so the arc-length step is the largest chord that can fit.
    let mut hi = total / steps;
    if let Some(out) = march(pts, hi, n) {
        if out.last().is_some_and(|p| p.dist(&end) <= total * T::lit(1e-12)) {
            return Ok(finish(out, end));
        }
    }
    let mut lo = T::zero();
    let mut best: Option<Vec<Point3<T>>> = None;
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        match march(pts, mid, n) {
            Some(out) => {
                lo = mid;
                best = Some(out);
            }
            None => hi = mid,
        }
    }
    let out = best.ok_or_else(|| Error::Degenerate("could not place resampled points".into()))?;
    Ok(finish(out, end))
}

fn finish<T: Scalar>(mut out: Vec<Point3<T>>, end: Point3<T>) -> Trajectory<T> {
    if let Some(last) = out.last_mut() {
        *last = end;
    }
    Trajectory::from_points_unchecked(out)
}

/// Walks the polyline placing each next point at straight-line distance `chord`
/// from the previous one. Returns `None` if the path ends before `n` points fit.
fn march<T: Scalar>(pts: &[Point3<T>], chord: T, n: usize) -> Option<Vec<Point3<T>>> {
    let c2 = chord * chord;
    let mut out = Vec::with_capacity(n);
    out.push(pts[0]);
    let mut seg = 0;
    let mut u0 = T::zero();
    let slack = T::lit(1e-12);
    while out.len() < n {
        let q = *out.last().expect("seeded");
        let mut placed = false;
        while seg + 1 < pts.len() {
            let a = pts[seg];
            let b = pts[seg + 1];
            let d = [b.x - a.x, b.y - a.y, b.z - a.z];
            let w = [a.x - q.x, a.y - q.y, a.z - q.z];
            let qa = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            if qa > T::zero() {
                let qb = T::lit(2.0) * (d[0] * w[0] + d[1] * w[1] + d[2] * w[2]);
                let qc = w[0] * w[0] + w[1] * w[1] + w[2] * w[2] - c2;
                let disc = qb * qb - T::lit(4.0) * qa * qc;
                if disc >= T::zero() {
                    let u = (-qb + disc.sqrt()) / (T::lit(2.0) * qa);
                    if u >= u0 && u <= T::one() + slack {
                        let u = u.min(T::one());
                        out.push(a.lerp(&b, u));
                        u0 = u;
                        placed = true;
                        break;
                    }
                }
            }
            seg += 1;
            u0 = T::zero();
        }
        if !placed {
            return None;
        }
    }
    Some(out)
}

/// Centres the bounding box on the origin and scales its largest extent to 1.
pub fn normalize<T: Scalar>(trajectory: &Trajectory<T>) -> Result<Trajectory<T>> {
    let (lo, hi) = trajectory
        .bounding_box()
        .ok_or(Error::Empty("trajectory"))?;
    let extent = (0..3).map(|k| hi[k] - lo[k]).fold(T::zero(), T::max);
    if !(extent > T::zero()) {
        return Err(Error::Degenerate("zero-extent bounding box".into()));
    }
    let half = T::lit(0.5);
    let center = [
        (lo[0] + hi[0]) * half,
        (lo[1] + hi[1]) * half,
        (lo[2] + hi[2]) * half,
    ];
    let points = trajectory
        .points()
        .iter()
        .map(|p| {
            Point3::new(
                (p.x - center[0]) / extent,
                (p.y - center[1]) / extent,
                (p.z - center[2]) / extent,
                p.t,
            )
        })
        .collect();
    Ok(Trajectory::from_points_unchecked(points))
}

/// Drops depth: every point maps to `(x, y, 0)`.
pub fn project_to_plane<T: Scalar>(trajectory: &Trajectory<T>) -> Trajectory<T> {
    let points = trajectory
        .points()
        .iter()
        .map(|p| Point3::new(p.x, p.y, T::zero(), p.t))
        .collect();
    Trajectory::from_points_unchecked(points)
}

pub fn translate<T: Scalar>(trajectory: &Trajectory<T>, offset: [T; 3]) -> Trajectory<T> {
    let points = trajectory
        .points()
        .iter()
        .map(|p| Point3::new(p.x + offset[0], p.y + offset[1], p.z + offset[2], p.t))
        .collect();
    Trajectory::from_points_unchecked(points)
}

/// Uniform scaling about the origin.
pub fn scale<T: Scalar>(trajectory: &Trajectory<T>, factor: T) -> Trajectory<T> {
    let points = trajectory
        .points()
        .iter()
        .map(|p| Point3::new(p.x * factor, p.y * factor, p.z * factor, p.t))
        .collect();
    Trajectory::from_points_unchecked(points)
}
