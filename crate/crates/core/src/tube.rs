//! Codimension-`r` submanifolds via the boundary of their `eps`-tube.
//!
//! Around each base point `y_j` with normal frame `N_1..N_r` the slice
//! sphere `{y_j + sum_k a_k N_k : |a| = eps}` is sampled at `q` fixed
//! directions. The tube boundary is a closed hypersurface, so the scalar
//! assembly applies; the base integral is recovered as
//! `(1/s_r) sum_{i,j} f(y_j) tau(a_i(y_j))`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::geometry::{FramedSample, OrientedSample, PointCloud};
use crate::kernel::{unit_sphere_measure, KernelConfig};
use crate::solver::{
    assemble_scalar_system, ensure_same_len, solve_weights, RhsMode, SolverConfig, WeightSolution,
};

/// Fixed sample of the radius-`eps` sphere in `R^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereDirections {
    codim: usize,
    epsilon: f64,
    /// Direction-major, `r` entries per direction, each of norm `eps`.
    directions: Vec<f64>,
}

impl SphereDirections {
    /// Wraps explicit directions; each must have norm `eps` within `1e-12` (relative).
    pub fn new(codim: usize, epsilon: f64, directions: Vec<f64>) -> Result<Self> {
        if codim == 0 {
            return Err(invalid("codimension must be >= 1"));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(invalid("tube radius must be positive"));
        }
        if directions.len() % codim != 0 {
            return Err(invalid("direction buffer is not a multiple of the codimension"));
        }
        let q = directions.len() / codim;
        if q < codim + 1 {
            return Err(invalid("need at least r + 1 directions"));
        }
        for a in directions.chunks_exact(codim) {
            let len = libm::sqrt(a.iter().map(|v| v * v).sum());
            if !((len - epsilon).abs() <= 1e-12 * epsilon.max(1.0)) {
                return Err(invalid("direction norm differs from the tube radius"));
            }
        }
        Ok(Self {
            codim,
            epsilon,
            directions,
        })
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.directions.len() / self.codim
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.directions[i * self.codim..(i + 1) * self.codim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.directions
    }
}

/// Deterministic directions on the radius-`eps` sphere of `R^r`.
///
/// * `r = 1`: `{+eps, -eps}`; `q` is ignored.
/// * `r = 2`: `q` equally spaced points starting at `(eps, 0)`.
/// * `r = 3`: Fibonacci spiral.
/// * `r >= 4`: the `R_r` Kronecker sequence in `[0,1)^r`, pushed through
///   Box-Muller to Gaussian vectors and normalized.
pub fn sample_normal_sphere(r: usize, q: usize, eps: f64) -> Result<SphereDirections> {
    if r == 0 {
        return Err(invalid("codimension must be >= 1"));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid("tube radius must be positive"));
    }
    if r == 1 {
        return SphereDirections::new(1, eps, alloc::vec![eps, -eps]);
    }
    if q < r + 1 {
        return Err(invalid("need at least r + 1 directions"));
    }
    let mut dirs = Vec::with_capacity(q * r);
    match r {
        2 => {
            for i in 0..q {
                let t = 2.0 * PI * i as f64 / q as f64;
                dirs.extend_from_slice(&[eps * libm::cos(t), eps * libm::sin(t)]);
            }
        }
        3 => {
            let golden = PI * (3.0 - libm::sqrt(5.0));
            for i in 0..q {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / q as f64;
                let rho = libm::sqrt(1.0 - z * z);
                let phi = golden * i as f64;
                dirs.extend_from_slice(&[
                    eps * rho * libm::cos(phi),
                    eps * rho * libm::sin(phi),
                    eps * z,
                ]);
            }
        }
        _ => {
            let alpha = kronecker_steps(r);
            let mut u = alloc::vec![0.0; r];
            let mut g = alloc::vec![0.0; r];
            for i in 0..q {
                for (k, uk) in u.iter_mut().enumerate() {
                    *uk = libm::fmod(0.5 + alpha[k] * (i + 1) as f64, 1.0);
                }
                // Box-Muller on consecutive pairs; an odd tail reuses the first uniform.
                for k in (0..r).step_by(2) {
                    let u1 = u[k].max(f64::MIN_POSITIVE);
                    let u2 = if k + 1 < r { u[k + 1] } else { u[0] };
                    let radius = libm::sqrt(-2.0 * libm::log(u1));
                    g[k] = radius * libm::cos(2.0 * PI * u2);
                    if k + 1 < r {
                        g[k + 1] = radius * libm::sin(2.0 * PI * u2);
                    }
                }
                let len = libm::sqrt(g.iter().map(|v| v * v).sum());
                if len == 0.0 {
                    return Err(invalid("degenerate direction"));
                }
                dirs.extend(g.iter().map(|v| eps * v / len));
            }
        }
    }
    SphereDirections::new(r, eps, dirs)
}

/// `alpha_k = phi_r^{-k}` with `phi_r` the positive root of `x^{r+1} = x + 1`.
fn kronecker_steps(r: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = libm::pow(1.0 + phi, 1.0 / (r as f64 + 1.0));
    }
    (1..=r).map(|k| libm::pow(1.0 / phi, k as f64)).collect()
}

/// `s_r = omega_r eps^{r-1}`; `2` for `r = 1`.
pub fn tube_sphere_measure(r: usize, eps: f64) -> Result<f64> {
    if r == 0 {
        return Err(invalid("codimension must be >= 1"));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid("tube radius must be positive"));
    }
    if r == 1 {
        return Ok(2.0);
    }
    Ok(unit_sphere_measure(r)? * libm::pow(eps, r as f64 - 1.0))
}

/// Tube boundary sample. Point `i` of base point `j` sits at index `j * q + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeSample {
    pub base: FramedSample,
    pub directions: SphereDirections,
    pub sample: OrientedSample,
}

impl TubeSample {
    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }

    pub fn directions_per_point(&self) -> usize {
        self.directions.len()
    }

    /// Base point index of tube point `k`.
    pub fn base_index(&self, k: usize) -> usize {
        k / self.directions.len()
    }

    /// Seeded points strictly inside the tube: `y_j + sum_k b_k N_k(y_j)`
    /// with `b` uniform in the radius-`eps/2` ball of `R^r` and `j` uniform.
    pub fn interior_queries(&self, count: usize, seed: u64) -> Result<PointCloud> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, r) = (self.base.dim(), self.base.codim());
        let half = 0.5 * self.directions.epsilon();
        let mut coords = Vec::with_capacity(n * count);
        let mut b = alloc::vec![0.0; r];
        for _ in 0..count {
            let j = rng.random_range(0..self.base.len());
            if r == 1 {
                b[0] = half * (2.0 * rng.random::<f64>() - 1.0);
            } else {
                for v in b.iter_mut() {
                    *v = rng.sample(StandardNormal);
                }
                let len = libm::sqrt(b.iter().map(|v| v * v).sum());
                let radius = half * libm::pow(rng.random::<f64>(), 1.0 / r as f64) / len;
                b.iter_mut().for_each(|v| *v *= radius);
            }
            let mut p = self.base.point(j).to_vec();
            for (k, bk) in b.iter().enumerate() {
                for (pi, ni) in p.iter_mut().zip(self.base.frame_vector(j, k)) {
                    *pi += bk * ni;
                }
            }
            coords.extend(p);
        }
        PointCloud::new(n, coords)
    }
}

/// Places `q` points on each slice sphere; normals `sum_k a_k N_k / eps`.
pub fn build_tube(base: &FramedSample, directions: &SphereDirections) -> Result<TubeSample> {
    if base.codim() != directions.codim() {
        return Err(Error::DimensionMismatch {
            expected: base.codim(),
            found: directions.codim(),
        });
    }
    if !base.is_closed() {
        return Err(invalid("tube construction requires a closed base manifold"));
    }
    let (n, r, q) = (base.dim(), base.codim(), directions.len());
    let eps = directions.epsilon();
    let mut coords = Vec::with_capacity(n * q * base.len());
    let mut normals = Vec::with_capacity(n * q * base.len());
    let mut normal = alloc::vec![0.0; n];
    for j in 0..base.len() {
        let y = base.point(j);
        for i in 0..q {
            let a = directions.direction(i);
            normal.iter_mut().for_each(|v| *v = 0.0);
            for k in 0..r {
                let w = a[k] / eps;
                for (v, nk) in normal.iter_mut().zip(base.frame_vector(j, k)) {
                    *v += w * nk;
                }
            }
            coords.extend(y.iter().zip(&normal).map(|(p, v)| p + eps * v));
            normals.extend_from_slice(&normal);
        }
    }
    let cloud = PointCloud::new(n, coords).map_err(|e| match e {
        Error::DuplicatePoint(a, b) => Error::SelfIntersection(a, b),
        other => other,
    })?;
    Ok(TubeSample {
        base: base.clone(),
        directions: directions.clone(),
        sample: OrientedSample::new(cloud, normals)?,
    })
}

/// `(1/s_r) sum_{i,j} f(y_j) tau(a_i(y_j))` with `tau` indexed `j * q + i`.
pub fn integrate_codim(f_values: &[f64], tau: &[f64], directions: &SphereDirections) -> Result<f64> {
    let q = directions.len();
    ensure_same_len(f_values.len() * q, tau.len())?;
    let s_r = tube_sphere_measure(directions.codim(), directions.epsilon())?;
    let total: f64 = f_values
        .iter()
        .zip(tau.chunks_exact(q))
        .map(|(f, slice)| f * slice.iter().sum::<f64>())
        .sum();
    Ok(total / s_r)
}

/// Solved tube.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeSolution {
    pub solution: WeightSolution,
    pub directions: SphereDirections,
}

impl TubeSolution {
    pub fn integrate(&self, f_values: &[f64]) -> Result<f64> {
        integrate_codim(f_values, &self.solution.tau, &self.directions)
    }
}

/// Scalar-unknown solve on the tube boundary with queries inside the tube.
pub fn solve_tube(
    tube: &TubeSample,
    interior: &PointCloud,
    kernel: &KernelConfig,
    solver: &SolverConfig,
) -> Result<TubeSolution> {
    let system = assemble_scalar_system(interior, &tube.sample, kernel, RhsMode::InteriorOne)?;
    let solution = solve_weights(&system, solver, Some(tube.sample.normals()))?;
    Ok(TubeSolution {
        solution,
        directions: tube.directions.clone(),
    })
}
