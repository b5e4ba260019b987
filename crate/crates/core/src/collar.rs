//! Hypersurfaces with boundary, closed up by a solid collar.
//!
//! The sample `y_j` is duplicated to `y_j + eps N(y_j)`. Together the two
//! copies sample the boundary of the solid `{y + t N(y) : 0 <= t <= eps}`
//! (minus the thin side strip over the boundary of the surface, which is
//! not sampled). The integral over the original surface is the average of
//! the two faces: `1/2 sum_j f(y_j) (tau_j + tau_bar_j)`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::geometry::{dist2, OrientedSample, PointCloud};
use crate::kernel::KernelConfig;
use crate::solver::{assemble_scalar_system, ensure_same_len, solve_weights, RhsMode, SolverConfig, WeightSolution};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollarConfig {
    pub epsilon: f64,
}

impl CollarConfig {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(invalid("collar thickness must be positive"));
        }
        Ok(Self { epsilon })
    }

    /// `eps = 2 h` with `h` the median nearest-neighbor spacing of the sample.
    pub fn from_sample(sample: &OrientedSample) -> Result<Self> {
        Self::new(2.0 * sample.cloud().median_spacing())
    }
}

/// Front face `(y_j, N(y_j))` and back face `(y_j + eps N(y_j), -N(y_j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollarSample {
    pub front: OrientedSample,
    pub back: OrientedSample,
    pub epsilon: f64,
}

impl CollarSample {
    pub fn len(&self) -> usize {
        self.front.len()
    }

    pub fn is_empty(&self) -> bool {
        self.front.is_empty()
    }

    /// Both faces as one sample, oriented by the outward normal of the solid
    /// collar: `-N(y_j)` on the front face and `+N(y_j)` on the back face.
    ///
    /// The face normals as stored point into the solid, which is what the
    /// scalar-unknown assembly must not see.
    pub fn solid_boundary(&self) -> Result<OrientedSample> {
        Ok(self.front.concat(&self.back)?.flipped())
    }

    /// Interior queries built from the sample itself: `y_j + t N(y_j)` with
    /// `t` uniform in `[eps/4, 3 eps/4]` at randomly chosen sample points.
    pub fn interior_queries(&self, count: usize, seed: u64) -> Result<PointCloud> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.front.dim();
        let eps = self.epsilon;
        let mut coords = Vec::with_capacity(n * count);
        for _ in 0..count {
            let j = rng.random_range(0..self.len());
            let t = eps * (0.25 + 0.5 * rng.random::<f64>());
            let (y, normal) = (self.front.point(j), self.front.normal(j));
            coords.extend(y.iter().zip(normal).map(|(p, v)| p + t * v));
        }
        PointCloud::new(n, coords)
    }
}

/// Duplicates the sample along its normals at distance `eps`.
pub fn build_collar(sample: &OrientedSample, config: &CollarConfig) -> Result<CollarSample> {
    let eps = config.epsilon;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid("collar thickness must be positive"));
    }
    let n = sample.dim();
    let mut coords = Vec::with_capacity(n * sample.len());
    for j in 0..sample.len() {
        let (y, normal) = (sample.point(j), sample.normal(j));
        coords.extend(y.iter().zip(normal).map(|(p, v)| p + eps * v));
    }
    let back_normals: Vec<f64> = sample.normals().iter().map(|v| -v).collect();
    let back_cloud = PointCloud::new(n, coords)?;
    // A back point landing on a front point means eps exceeds the local feature size.
    let tol = 1e-12 * (1.0 + eps) * (1.0 + eps);
    for (j, b) in back_cloud.iter().enumerate() {
        for k in 0..sample.len() {
            if dist2(b, sample.point(k)) <= tol {
                return Err(Error::SelfIntersection(j, k));
            }
        }
    }
    Ok(CollarSample {
        front: sample.clone(),
        back: OrientedSample::new(back_cloud, back_normals)?,
        epsilon: eps,
    })
}

/// `1/2 sum_j f(y_j) (tau_j + tau_bar_j)`.
pub fn integrate_with_boundary(f_values: &[f64], front_tau: &[f64], back_tau: &[f64]) -> Result<f64> {
    ensure_same_len(f_values.len(), front_tau.len())?;
    ensure_same_len(f_values.len(), back_tau.len())?;
    Ok(0.5
        * f_values
            .iter()
            .zip(front_tau.iter().zip(back_tau))
            .map(|(f, (a, b))| f * (a + b))
            .sum::<f64>())
}

/// Solved collar: elements of both faces.
#[derive(Debug, Clone, PartialEq)]
pub struct CollarSolution {
    pub solution: WeightSolution,
    pub front_tau: Vec<f64>,
    pub back_tau: Vec<f64>,
}

impl CollarSolution {
    pub fn integrate(&self, f_values: &[f64]) -> Result<f64> {
        integrate_with_boundary(f_values, &self.front_tau, &self.back_tau)
    }
}

/// Scalar-unknown solve on the collar's closed boundary with interior
/// queries inside the solid collar.
pub fn solve_collar(
    collar: &CollarSample,
    interior: &PointCloud,
    kernel: &KernelConfig,
    solver: &SolverConfig,
) -> Result<CollarSolution> {
    let boundary = collar.solid_boundary()?;
    let system = assemble_scalar_system(interior, &boundary, kernel, RhsMode::InteriorOne)?;
    let solution = solve_weights(&system, solver, Some(boundary.normals()))?;
    let m = collar.len();
    Ok(CollarSolution {
        front_tau: solution.tau[..m].to_vec(),
        back_tau: solution.tau[m..].to_vec(),
        solution,
    })
}
