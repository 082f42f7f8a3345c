//! Local feature size of surface points relative to a skeleton, the derived
//! sampling prior, and a weighted sampler that consumes it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::morphology::Skeleton;
use crate::spatial::PointKdTree;
use crate::Point;

/// Relative floor added to every LFS value, as a fraction of the median.
pub const LFS_FLOOR_FRACTION: f64 = 1e-3;
pub const DEFAULT_SHARPNESS: f64 = 1.0;

/// Per-point sampling prior.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPrior {
    pub lfs: Vec<f64>,
    /// Positive, sums to one.
    pub weight: Vec<f64>,
}

/// Distance from each surface point to the nearest skeletal sphere center.
pub fn local_feature_size(surface_points: &[Point], skeleton: &Skeleton) -> Result<Vec<f64>> {
    if skeleton.is_empty() {
        return Err(Error::EmptySkeleton);
    }
    let tree = PointKdTree::build(&skeleton.centers());
    Ok(surface_points
        .par_iter()
        .map(|p| {
            tree.nearest(p)
                .map(|n| n.distance_squared.sqrt())
                .unwrap_or(f64::INFINITY)
        })
        .collect())
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    }
}

/// Inverse-power prior: `w_i ∝ (lfs_i + eps)^(-sharpness)` with
/// `eps = 1e-3 * median(lfs)`, normalized to sum to one.
///
/// When the median is zero the floor falls back to `1e-3 * max(lfs)`, and an
/// all-zero input gets uniform weights.
pub fn prior_weights(lfs: &[f64], sharpness: f64) -> Result<SamplingPrior> {
    if lfs.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(sharpness > 0.0 && sharpness.is_finite()) {
        return Err(Error::InvalidConfig(format!("sharpness must be positive, got {sharpness}")));
    }
    if lfs.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidConfig("LFS values must be finite and non-negative".into()));
    }
    let mut eps = LFS_FLOOR_FRACTION * median(lfs);
    if eps == 0.0 {
        eps = LFS_FLOOR_FRACTION * lfs.iter().copied().fold(0.0, f64::max);
    }
    let weight = if eps == 0.0 {
        vec![1.0 / lfs.len() as f64; lfs.len()]
    } else {
        // Work in log space so large sharpness cannot overflow.
        let log_raw: Vec<f64> = lfs.iter().map(|&v| -sharpness * (v + eps).ln()).collect();
        let top = log_raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = log_raw.iter().map(|&l| (l - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|r| r / total).collect()
    };
    Ok(SamplingPrior {
        lfs: lfs.to_vec(),
        weight,
    })
}

/// Draws `m` distinct indices without replacement, with probability
/// proportional to weight, by taking the `m` smallest exponential keys
/// `-ln(u_i) / w_i`. Indices come back in draw order.
pub fn weighted_sample(prior: &SamplingPrior, m: usize, seed: u64) -> Result<Vec<usize>> {
    let n = prior.weight.len();
    if m == 0 {
        return Err(Error::InvalidConfig("sample size must be positive".into()));
    }
    if m > n {
        return Err(Error::SubsetTooLarge {
            requested: m,
            available: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keys: Vec<f64> = prior
        .weight
        .iter()
        .map(|&w| {
            let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
            -u.ln() / w
        })
        .collect();
    let by_key = |a: &usize, b: &usize| keys[*a].total_cmp(&keys[*b]).then(a.cmp(b));
    let mut order: Vec<usize> = (0..n).collect();
    if m < n {
        order.select_nth_unstable_by(m, by_key);
        order.truncate(m);
    }
    order.sort_unstable_by(by_key);
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphology::{SkeletalSphere, SkeletonParams};
    use crate::occupancy::SampleSource;

    fn skeleton_of(centers: &[Point]) -> Skeleton {
        Skeleton {
            spheres: centers
                .iter()
                .enumerate()
                .map(|(i, c)| SkeletalSphere {
                    center: *c,
                    radius: 1.0,
                    residual: 0.0,
                    source_index: i,
                })
                .collect(),
            params: SkeletonParams {
                k: 1,
                sampling: SampleSource::Meshgrid { resolution: 2 },
                n: centers.len(),
            },
        }
    }

    #[test]
    fn sphere_points_to_center() {
        let sk = skeleton_of(&[Point::origin()]);
        let pts = [Point::new(1.0, 0.0, 0.0), Point::new(0.0, -1.0, 0.0), Point::new(0.6, 0.8, 0.0)];
        let lfs = local_feature_size(&pts, &sk).unwrap();
        assert!(lfs.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert_eq!(local_feature_size(&[Point::origin()], &sk).unwrap(), vec![0.0]);
        let empty = skeleton_of(&[]);
        assert!(matches!(local_feature_size(&pts, &empty), Err(Error::EmptySkeleton)));
    }

    #[test]
    fn weights_constant_and_two_point() {
        let p = prior_weights(&[0.7; 8], 1.0).unwrap();
        assert!(p.weight.iter().all(|&w| (w - 0.125).abs() < 1e-15));

        // eps = 1e-3 * median = 2e-3; compare against the exact formula.
        let p = prior_weights(&[1.0, 3.0], 1.0).unwrap();
        let (a, b) = (1.0 / 1.002, 1.0 / 3.002);
        assert!((p.weight[0] - a / (a + b)).abs() < 1e-15);
        assert!((p.weight[0] - 0.75).abs() < 1e-3);

        let zeros = prior_weights(&[0.0; 3], 2.0).unwrap();
        assert!(zeros.weight.iter().all(|&w| (w - 1.0 / 3.0).abs() < 1e-15));
        assert!(prior_weights(&[], 1.0).is_err());
        assert!(prior_weights(&[1.0], 0.0).is_err());
    }

    #[test]
    fn sampler_edge_cases() {
        let p = prior_weights(&[1.0; 5], 1.0).unwrap();
        let mut all = weighted_sample(&p, 5, 3).unwrap();
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3, 4]);
        assert!(weighted_sample(&p, 0, 3).is_err());
        assert!(matches!(weighted_sample(&p, 6, 3), Err(Error::SubsetTooLarge { .. })));
        assert_eq!(weighted_sample(&p, 3, 9).unwrap(), weighted_sample(&p, 3, 9).unwrap());
    }

    #[test]
    fn dominant_weight_wins() {
        let e = 1e-9;
        let prior = SamplingPrior {
            lfs: vec![0.0; 4],
            weight: vec![1.0 - 3.0 * e, e, e, e],
        };
        let hits = (0..10_000u64)
            .filter(|&seed| weighted_sample(&prior, 1, seed).unwrap() == vec![0])
            .count();
        assert!(hits as f64 / 10_000.0 > 0.999);
    }
}
