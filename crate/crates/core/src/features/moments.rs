use super::{curvature_3d, FeatureDim, FeatureVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::trajectory::{Point3, Trajectory};

const MIN_MOMENTS_LEN: usize = 9;

/// Curvature series with the first/last interior value replicated to the ends.
fn curvature_series<T: Scalar>(trajectory: &Trajectory<T>) -> Result<Vec<T>> {
    let n = trajectory.len();
    let interior: Vec<T> = (2..n - 2)
        .map(|t| curvature_3d(trajectory, t).map(|k| k.value))
        .collect::<Result<_>>()?;
    let mut series = vec![interior[0]; 2];
    series.extend(&interior);
    series.extend([interior[interior.len() - 1]; 2]);
    Ok(series)
}

/// `M_j = (1/n) Σ_t K(t) (t/n)^j` for `j = 0, 1, 2`.
fn raw_moments<T: Scalar>(series: &[T]) -> [T; 3] {
    let n = T::from_usize_lossy(series.len());
    let mut m = [T::zero(); 3];
    for (t, &k) in series.iter().enumerate() {
        let u = T::from_usize_lossy(t) / n;
        m[0] += k;
        m[1] += k * u;
        m[2] += k * u * u;
    }
    m.map(|v| v / n)
}

/// Zeroth to second normalised-time moments of the position curvature series
/// and of the curvature series of the first-difference (velocity) trajectory.
pub fn curvature_moments<T: Scalar>(trajectory: &Trajectory<T>) -> Result<FeatureVector<T>> {
    if trajectory.len() < MIN_MOMENTS_LEN {
        return Err(Error::TooShort {
            needed: MIN_MOMENTS_LEN,
            got: trajectory.len(),
        });
    }
    let pts = trajectory.points();
    let velocity: Vec<Point3<T>> = pts
        .windows(2)
        .map(|w| Point3::new(w[1].x - w[0].x, w[1].y - w[0].y, w[1].z - w[0].z, w[1].t))
        .collect();
    let velocity = Trajectory::from_points_unchecked(velocity);
    let pos = raw_moments(&curvature_series(trajectory)?);
    let vel = raw_moments(&curvature_series(&velocity)?);
    FeatureVector::new(
        vec![pos[0], pos[1], pos[2], vel[0], vel[1], vel[2]],
        FeatureDim::Moments6,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_line_all_zero() {
        let t: Trajectory<f64> = Trajectory::from_xyz((0..20).map(|i| [i as f64, 2.0 * i as f64, 0.0])).unwrap();
        assert_eq!(curvature_moments(&t).unwrap().values, vec![0.0; 6]);
    }

    #[test]
    fn constant_series_matches_integral() {
        // Oracle: ∫_0^1 k u^j du = k / (j + 1); the Riemann sum error is O(1/n).
        let k = 2.5;
        for n in [50usize, 400] {
            let m = raw_moments(&vec![k; n]);
            let bound = 2.0 * k / n as f64;
            assert!((m[0] - k).abs() < 1e-12);
            assert!((m[1] - k / 2.0).abs() < bound);
            assert!((m[2] - k / 3.0).abs() < bound);
        }
    }

    #[test]
    fn circle_position_moments() {
        let n = 200;
        let t: Trajectory<f64> = Trajectory::from_xyz((0..n).map(|i| {
            let a = std::f64::consts::PI * i as f64 / n as f64;
            [4.0 * a.cos(), 4.0 * a.sin(), 0.0]
        }))
        .unwrap();
        let m = curvature_moments(&t).unwrap().values;
        let k = curvature_3d(&t, 10).unwrap().value;
        assert!((m[0] - k).abs() < 1e-9);
        assert!((m[1] - k / 2.0).abs() < 2.0 * k / n as f64);
        assert!((m[2] - k / 3.0).abs() < 2.0 * k / n as f64);
    }

    #[test]
    fn reversal_keeps_zeroth_moment() {
        let t: Trajectory<f64> = Trajectory::from_xyz((0..30).map(|i| {
            let a = i as f64 * 0.2;
            [a * a.cos(), a * a.sin(), 0.3 * a]
        }))
        .unwrap();
        let fwd = curvature_moments(&t).unwrap().values;
        let back = curvature_moments(&t.reversed()).unwrap().values;
        assert!((fwd[0] - back[0]).abs() < 1e-9);
        assert!((fwd[3] - back[3]).abs() < 1e-9);
    }

    #[test]
    fn too_short() {
        let t: Trajectory<f64> = Trajectory::from_xyz((0..8).map(|i| [i as f64, 0.0, 0.0])).unwrap();
        assert!(matches!(curvature_moments(&t), Err(Error::TooShort { needed: 9, got: 8 })));
    }
}
