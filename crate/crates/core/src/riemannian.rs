//! Boundary integration on a compact Riemannian manifold through its
//! Green's function, instantiated on the round unit sphere.
//!
//! The discrete indicator at `p` is `-sum_j g(grad_q G(p, q_j), N(q_j)) tau_j`.
//! On a compact manifold `Delta G = delta_p - 1/vol(M)`, so the continuous
//! field is `1_Omega(p) - vol(Omega)/vol(M)` rather than a plain indicator.
//! The constant is absorbed by an extra unknown `c`: rows read
//! `sum_j A_ij tau_j + c = 1` (interior) or `0` (exterior).
//!
//! Tangent vectors live in the ambient `R^3`, where the induced metric is
//! the Euclidean dot product.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::geometry::{dot, OrientedSample, PointCloud};
use crate::linalg::DenseMatrix;
use crate::solver::{
    ensure_same_len, integrate_function, solve_weights, IndicatorSystem, Layout, SolverConfig,
    WeightSolution,
};

/// Tolerance for tangency and unit-length checks on the sphere.
pub const TANGENT_TOLERANCE: f64 = 1e-10;

/// A compact manifold embedded in some `R^d`, with a Green's function.
pub trait ManifoldModel {
    /// Intrinsic dimension.
    fn dimension(&self) -> usize;
    /// Dimension of the embedding space.
    fn ambient_dim(&self) -> usize;
    fn geodesic_distance(&self, p: &[f64], q: &[f64]) -> Result<f64>;
    /// `grad_q G(p, q)` as an ambient vector tangent at `q`.
    fn green_gradient(&self, p: &[f64], q: &[f64]) -> Result<Vec<f64>>;
    /// `g_q(u, v)` for tangent vectors at `q`.
    fn metric_dot(&self, q: &[f64], u: &[f64], v: &[f64]) -> f64;
    fn volume(&self) -> f64;
    /// Whether `v` is a unit tangent vector at the manifold point `q`.
    fn is_unit_tangent(&self, q: &[f64], v: &[f64]) -> bool;
}

/// Unit round sphere in `R^3`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SphereModel;

impl ManifoldModel for SphereModel {
    fn dimension(&self) -> usize {
        2
    }

    fn ambient_dim(&self) -> usize {
        3
    }

    fn geodesic_distance(&self, p: &[f64], q: &[f64]) -> Result<f64> {
        check_on_sphere(p)?;
        check_on_sphere(q)?;
        Ok(geodesic_angle(p, q))
    }

    fn green_gradient(&self, p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
        check_on_sphere(p)?;
        check_on_sphere(q)?;
        Ok(s2_green_gradient(as3(p), as3(q))?.to_vec())
    }

    fn metric_dot(&self, _q: &[f64], u: &[f64], v: &[f64]) -> f64 {
        dot(u, v)
    }

    fn volume(&self) -> f64 {
        4.0 * PI
    }

    fn is_unit_tangent(&self, q: &[f64], v: &[f64]) -> bool {
        q.len() == 3
            && v.len() == 3
            && dot(q, v).abs() <= TANGENT_TOLERANCE
            && (dot(v, v) - 1.0).abs() <= 2.0 * TANGENT_TOLERANCE
    }
}

fn check_on_sphere(p: &[f64]) -> Result<()> {
    if p.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: p.len(),
        });
    }
    if (dot(p, p) - 1.0).abs() > 1e-9 {
        return Err(invalid("point is not on the unit sphere"));
    }
    Ok(())
}

fn as3(p: &[f64]) -> &[f64; 3] {
    p.try_into().expect("length checked")
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Geodesic angle; `atan2(|p x q|, p . q)` stays accurate near `0` and `pi`.
fn geodesic_angle(p: &[f64], q: &[f64]) -> f64 {
    let c = cross(as3(p), as3(q));
    libm::atan2(libm::sqrt(dot(&c, &c)), dot(p, q))
}

/// `G(theta) = -(1/(2 pi)) ln(2 sin(theta/2))`.
pub fn s2_green_function(p: &[f64; 3], q: &[f64; 3]) -> Result<f64> {
    let theta = geodesic_angle(p, q);
    if theta == 0.0 {
        return Err(Error::DegeneratePair);
    }
    Ok(-libm::log(2.0 * libm::sin(0.5 * theta)) / (2.0 * PI))
}

/// `grad_q G = -(1/(4 pi)) cot(theta/2) t`, with `t` the unit tangent at `q`
/// along the great circle from `p`, pointing away from `p`.
pub fn s2_green_gradient(p: &[f64; 3], q: &[f64; 3]) -> Result<[f64; 3]> {
    // p - (p.q) q is the tangent at q pointing towards p; its norm is sin(theta).
    let pq = dot(p, q);
    let toward = [p[0] - pq * q[0], p[1] - pq * q[1], p[2] - pq * q[2]];
    let s = libm::sqrt(dot(&toward, &toward));
    let theta = libm::atan2(s, pq);
    if s <= 1e-12 || theta <= 0.0 {
        return Err(Error::DegeneratePair);
    }
    let derivative = -1.0 / (4.0 * PI * libm::tan(0.5 * theta));
    let scale = -derivative / s;
    Ok([scale * toward[0], scale * toward[1], scale * toward[2]])
}

/// Points `q_j` on the boundary of a domain in `M` with outward unit conormals.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldBoundarySample {
    sample: OrientedSample,
}

impl ManifoldBoundarySample {
    /// Validates that every point lies on `model` and every conormal is a
    /// unit tangent vector there.
    pub fn new<M: ManifoldModel>(sample: OrientedSample, model: &M) -> Result<Self> {
        if sample.dim() != model.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: model.ambient_dim(),
                found: sample.dim(),
            });
        }
        for j in 0..sample.len() {
            if !model.is_unit_tangent(sample.point(j), sample.normal(j)) {
                return Err(Error::NonUnitNormal {
                    index: j,
                    norm: libm::sqrt(dot(sample.normal(j), sample.normal(j))),
                });
            }
        }
        Ok(Self { sample })
    }

    pub fn as_oriented(&self) -> &OrientedSample {
        &self.sample
    }

    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }

    pub fn point(&self, j: usize) -> &[f64] {
        self.sample.point(j)
    }

    pub fn conormal(&self, j: usize) -> &[f64] {
        self.sample.normal(j)
    }
}

/// `count` equally spaced points on the latitude circle `theta = alpha`,
/// conormal `d/dtheta` (pointing out of the north-pole cap).
pub fn cap_boundary_sample(alpha: f64, count: usize) -> Result<ManifoldBoundarySample> {
    if !(alpha > 0.0 && alpha < PI) {
        return Err(invalid("cap angle must lie in (0, pi)"));
    }
    if count == 0 {
        return Err(invalid("count must be positive"));
    }
    let (sa, ca) = (libm::sin(alpha), libm::cos(alpha));
    let mut coords = Vec::with_capacity(3 * count);
    let mut normals = Vec::with_capacity(3 * count);
    for j in 0..count {
        let phi = 2.0 * PI * j as f64 / count as f64;
        let (sp, cp) = (libm::sin(phi), libm::cos(phi));
        coords.extend_from_slice(&[sa * cp, sa * sp, ca]);
        normals.extend_from_slice(&[ca * cp, ca * sp, -sa]);
    }
    let sample = OrientedSample::new(PointCloud::new(3, coords)?, normals)?;
    ManifoldBoundarySample::new(sample, &SphereModel)
}

/// Trapezoid-rule value of `-oint g(grad_q G(p, q), N(q)) dq` over the
/// boundary of the cap `theta < alpha`.
pub fn continuous_cap_indicator(p: &[f64; 3], alpha: f64, quadrature_count: usize) -> Result<f64> {
    let sample = cap_boundary_sample(alpha, quadrature_count)?;
    let weight = 2.0 * PI * libm::sin(alpha) / quadrature_count as f64;
    let mut sum = 0.0;
    for j in 0..sample.len() {
        let grad = s2_green_gradient(p, as3(sample.point(j)))?;
        sum -= dot(&grad, sample.conormal(j)) * weight;
    }
    Ok(sum)
}

/// Offset-augmented system: interior rows first (rhs 1), then exterior rows (rhs 0).
pub fn assemble_riemann_system<M: ManifoldModel>(
    interior: &PointCloud,
    exterior: &PointCloud,
    sample: &ManifoldBoundarySample,
    model: &M,
) -> Result<IndicatorSystem> {
    if interior.is_empty() || exterior.is_empty() {
        return Err(invalid("both interior and exterior queries are needed to pin the offset"));
    }
    let d = model.ambient_dim();
    for cloud in [interior, exterior] {
        if cloud.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: cloud.dim(),
            });
        }
    }
    let m = sample.len();
    let rows = interior.len() + exterior.len();
    let mut matrix = DenseMatrix::zeros(rows, m + 1);
    let mut rhs = Vec::with_capacity(rows);
    for (i, p) in interior.iter().chain(exterior.iter()).enumerate() {
        for j in 0..m {
            let q = sample.point(j);
            let grad = model.green_gradient(p, q)?;
            matrix[(i, j)] = -model.metric_dot(q, &grad, sample.conormal(j));
        }
        matrix[(i, m)] = 1.0;
        rhs.push(if i < interior.len() { 1.0 } else { 0.0 });
    }
    IndicatorSystem::from_parts(matrix, rhs, Layout::OffsetAugmented, m, d)
}

/// `sum_j f(q_j) tau_j`.
pub fn integrate_on_manifold_boundary(f_values: &[f64], solution: &WeightSolution) -> Result<f64> {
    ensure_same_len(solution.len(), f_values.len())?;
    integrate_function(f_values, solution)
}

/// Assembles and solves; the offset lands in `WeightSolution::offset`.
pub fn solve_manifold_boundary<M: ManifoldModel>(
    interior: &PointCloud,
    exterior: &PointCloud,
    sample: &ManifoldBoundarySample,
    model: &M,
    solver: &SolverConfig,
) -> Result<WeightSolution> {
    let system = assemble_riemann_system(interior, exterior, sample, model)?;
    solve_weights(&system, solver, Some(sample.as_oriented().normals()))
}

/// Indicator at `p` from solved elements, offset included.
pub fn evaluate_manifold_indicator<M: ManifoldModel>(
    p: &[f64],
    sample: &ManifoldBoundarySample,
    solution: &WeightSolution,
    model: &M,
) -> Result<f64> {
    ensure_same_len(sample.len(), solution.len())?;
    let mut sum = solution.offset.unwrap_or(0.0);
    for j in 0..sample.len() {
        let q = sample.point(j);
        let grad = model.green_gradient(p, q)?;
        sum -= model.metric_dot(q, &grad, sample.conormal(j)) * solution.tau[j];
    }
    Ok(sum)
}
