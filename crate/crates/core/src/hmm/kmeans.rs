//! Seeded k-means used to initialise state mixtures.

use rand::Rng;

use crate::scalar::Scalar;

const MAX_ITERS: usize = 25;

fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm with k-means++ seeding. Returns per-point assignments.
///
/// `k` must not exceed the number of points.
pub(crate) fn kmeans<T: Scalar, R: Rng>(points: &[&[T]], k: usize, rng: &mut R) -> Vec<usize> {
    let n = points.len();
    debug_assert!(k >= 1 && k <= n);
    let mut centers: Vec<Vec<T>> = Vec::with_capacity(k);
    centers.push(points[rng.random_range(0..n)].to_vec());
    let mut nearest: Vec<T> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: T = nearest.iter().copied().sum();
        let pick = if total > T::zero() {
            let mut target = T::lit(rng.random::<f64>()) * total;
            let mut idx = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if target < d {
                    idx = i;
                    break;
                }
                target -= d;
            }
            idx
        } else {
            rng.random_range(0..n)
        };
        centers.push(points[pick].to_vec());
        for (i, p) in points.iter().enumerate() {
            nearest[i] = nearest[i].min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }

    let width = points[0].len();
    let mut assign = vec![0usize; n];
    for iter in 0..MAX_ITERS {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = sq_dist(p, &centers[0]);
            for (c, center) in centers.iter().enumerate().skip(1) {
                let d = sq_dist(p, center);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            if assign[i] != best || iter == 0 {
                changed |= assign[i] != best;
                assign[i] = best;
            }
        }
        if iter > 0 && !changed {
            break;
        }
        let mut sums = vec![vec![T::zero(); width]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assign) {
            counts[c] += 1;
            for (s, &v) in sums[c].iter_mut().zip(p.iter()) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                // reseed an empty cluster at the point worst served by its centre
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = sq_dist(points[a], &centers[assign[a]]);
                        let db = sq_dist(points[b], &centers[assign[b]]);
                        da.partial_cmp(&db).unwrap_or(std::cmp::Ordering::Equal).then(b.cmp(&a))
                    })
                    .expect("non-empty");
                centers[c] = points[far].to_vec();
                assign[far] = c;
            } else {
                let cnt = T::from_usize_lossy(counts[c]);
                centers[c] = sums[c].iter().map(|&s| s / cnt).collect();
            }
        }
    }
    assign
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn separates_two_blobs() {
        let pts: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let off = if i < 20 { 0.0 } else { 10.0 };
                vec![off + (i % 5) as f64 * 0.1, off - (i % 3) as f64 * 0.1]
            })
            .collect();
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let a = kmeans(&refs, 2, &mut ChaCha8Rng::seed_from_u64(9));
        assert!(a[..20].iter().all(|&c| c == a[0]));
        assert!(a[20..].iter().all(|&c| c == a[20]));
        assert_ne!(a[0], a[20]);
    }

    #[test]
    fn every_cluster_non_empty_with_duplicates() {
        let pts = vec![vec![1.0_f64, 1.0]; 6];
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        let a = kmeans(&refs, 3, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a.len(), 6);
    }
}
