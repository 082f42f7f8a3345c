//! Grey-scale dilation of the distance field over a k-NN structuring element,
//! the dilation residual, and selection of skeletal spheres.
//!
//! With a reflexive neighborhood the dilation is extensive, so the residual
//! `dilate(udf) - udf` is non-negative and vanishes exactly at points whose
//! distance value is a maximum of their neighborhood. Those local maxima are
//! the candidate centers of maximal inscribed balls; sorting by residual
//! ranks every other point by how far it is from being one.

use std::ops::Deref;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::occupancy::{SampleSource, VolumeSamples};
use crate::spatial::KnnGraph;
use crate::Point;

/// Residuals below this are reported as exact local maxima.
pub const EXACT_MAXIMUM_EPS: f64 = 1e-9;
/// Residuals closer than this fraction of the largest residual count as tied
/// during selection, so rounding noise cannot reorder equal residuals.
pub const SELECTION_TIE_RELATIVE: f64 = 1e-9;
/// Slack in the ball-containment test of [`maximal_ball_oracle`].
pub const CONTAINMENT_EPS: f64 = 1e-12;

pub const DEFAULT_K: usize = 20;
pub const DEFAULT_SKELETON_SIZE: usize = 1024;

/// Per-sample scalar values, index-aligned with a sample set.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScalarField(pub Vec<f64>);

impl ScalarField {
    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ScalarField {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for ScalarField {
    fn from(v: Vec<f64>) -> Self {
        ScalarField(v)
    }
}

fn check_len(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::LengthMismatch { left, right })
    }
}

/// Neighborhood maximum: `out[i] = max(field[j] for j in graph.neighbors(i))`.
pub fn dilate(field: &[f64], graph: &KnnGraph) -> Result<ScalarField> {
    check_len(field.len(), graph.len())?;
    let out = (0..field.len())
        .into_par_iter()
        .map(|i| {
            graph
                .neighbors(i)
                .iter()
                .map(|&j| field[j as usize])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(ScalarField(out))
}

/// `dilated - field`, pointwise.
pub fn dilation_residual(field: &[f64], dilated: &[f64]) -> Result<ScalarField> {
    check_len(field.len(), dilated.len())?;
    Ok(ScalarField(
        field
            .par_iter()
            .zip(dilated.par_iter())
            .map(|(f, d)| d - f)
            .collect(),
    ))
}

/// Number of residuals under [`EXACT_MAXIMUM_EPS`].
pub fn count_exact_maxima(residuals: &[f64]) -> usize {
    residuals.iter().filter(|&&r| r < EXACT_MAXIMUM_EPS).count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkeletalSphere {
    pub center: Point,
    /// Distance from the center to the surface.
    pub radius: f64,
    pub residual: f64,
    /// Index into the sample set the sphere was selected from.
    pub source_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonParams {
    pub k: usize,
    pub sampling: SampleSource,
    pub n: usize,
}

/// Skeletal spheres in ascending residual order.
#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    pub spheres: Vec<SkeletalSphere>,
    pub params: SkeletonParams,
}

impl Skeleton {
    pub fn len(&self) -> usize {
        self.spheres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty()
    }

    pub fn centers(&self) -> Vec<Point> {
        self.spheres.iter().map(|s| s.center).collect()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.spheres.iter().map(|s| s.radius).collect()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.spheres.iter().map(|s| s.residual).collect()
    }

    pub fn mean_residual(&self) -> f64 {
        self.spheres.iter().map(|s| s.residual).sum::<f64>() / self.len() as f64
    }

    pub fn mean_radius(&self) -> f64 {
        self.spheres.iter().map(|s| s.radius).sum::<f64>() / self.len() as f64
    }
}

/// Selection bucket of each residual: residuals are compared in units of
/// [`SELECTION_TIE_RELATIVE`] times the largest one.
pub fn selection_keys(residuals: &[f64]) -> Vec<f64> {
    let quantum = SELECTION_TIE_RELATIVE * residuals.iter().copied().fold(0.0, f64::max);
    if !(quantum > 0.0 && quantum.is_finite()) {
        return residuals.to_vec();
    }
    residuals.iter().map(|r| (r / quantum).floor()).collect()
}

/// Indices of the `n` smallest residuals, ordered by (selection key, index).
/// Up to the tie quantum this subset minimizes the residual sum over all
/// subsets of size `n`.
pub fn lowest_residuals(residuals: &[f64], n: usize) -> Result<Vec<usize>> {
    if n > residuals.len() {
        return Err(Error::SubsetTooLarge {
            requested: n,
            available: residuals.len(),
        });
    }
    let keys = selection_keys(residuals);
    let by_residual = |a: &usize, b: &usize| keys[*a].total_cmp(&keys[*b]).then(a.cmp(b));
    let mut order: Vec<usize> = (0..residuals.len()).collect();
    if n < order.len() && n > 0 {
        order.select_nth_unstable_by(n, by_residual);
    }
    order.truncate(n);
    order.sort_unstable_by(by_residual);
    Ok(order)
}

/// Picks the `n` samples with the smallest residual as skeletal spheres.
pub fn select_skeleton(samples: &VolumeSamples, residuals: &[f64], n: usize, k: usize) -> Result<Skeleton> {
    let udf = samples.udf.as_deref().ok_or(Error::MissingDistances)?;
    check_len(samples.len(), residuals.len())?;
    if n == 0 {
        return Err(Error::InvalidConfig("skeleton size must be positive".into()));
    }
    let spheres = lowest_residuals(residuals, n)?
        .into_iter()
        .map(|i| SkeletalSphere {
            center: samples.points[i],
            radius: udf[i],
            residual: residuals[i],
            source_index: i,
        })
        .collect();
    Ok(Skeleton {
        spheres,
        params: SkeletonParams {
            k,
            sampling: samples.source,
            n,
        },
    })
}

/// Brute-force maximal-ball test: sample `i` is maximal unless its ball is
/// contained in another sample's ball, `|p_i - p_j| + r_i <= r_j`.
///
/// Quadratic in the sample count; meant for a few thousand points.
pub fn maximal_ball_oracle(samples: &VolumeSamples) -> Result<Vec<bool>> {
    let udf = samples.udf.as_deref().ok_or(Error::MissingDistances)?;
    let pts = &samples.points;
    Ok((0..pts.len())
        .into_par_iter()
        .map(|i| {
            !(0..pts.len()).any(|j| {
                j != i && (pts[i] - pts[j]).norm() + udf[i] <= udf[j] + CONTAINMENT_EPS
            })
        })
        .collect())
}
