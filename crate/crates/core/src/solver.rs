//! Assembly of the discrete indicator system, its regularized least-squares
//! solution, indicator evaluation and integration.
//!
//! Sample point `y_j` carries a vector element `mu_j = N(y_j) tau_j`. A query
//! `x` sees the discrete indicator `sum_j K(x, y_j) . mu_j`, which should be
//! 1 inside the enclosed region, 1/2 on its boundary and 0 outside.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::geometry::{OrientedSample, PointCloud};
use crate::kernel::{double_layer_normal, double_layer_row_into, KernelConfig};
use crate::linalg::{lstsq_tikhonov, DenseMatrix};

/// Where a query point sits relative to the enclosed region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryClass {
    Exterior,
    Boundary,
    Interior,
}

impl QueryClass {
    /// Indicator value the row is fitted to: 0, 1/2 or 1.
    pub fn target(self) -> f64 {
        match self {
            Self::Exterior => 0.0,
            Self::Boundary => 0.5,
            Self::Interior => 1.0,
        }
    }
}

/// How the right-hand side is formed.
#[derive(Debug, Clone, PartialEq)]
pub enum RhsMode {
    /// Every query lies on the surface; rhs 1/2.
    OnSurfaceHalf,
    /// Every query lies inside; rhs 1.
    InteriorOne,
    /// Per-query classes.
    Mixed(Vec<QueryClass>),
    /// Per-query classes plus a trailing column of ones for a constant offset.
    MixedOffset(Vec<QueryClass>),
}

impl RhsMode {
    fn targets(&self, rows: usize) -> Result<Vec<f64>> {
        match self {
            Self::OnSurfaceHalf => Ok(vec![0.5; rows]),
            Self::InteriorOne => Ok(vec![1.0; rows]),
            Self::Mixed(classes) | Self::MixedOffset(classes) => {
                if classes.len() != rows {
                    return Err(Error::LengthMismatch {
                        expected: rows,
                        found: classes.len(),
                    });
                }
                Ok(classes.iter().map(|c| c.target()).collect())
            }
        }
    }

    fn has_offset(&self) -> bool {
        matches!(self, Self::MixedOffset(_))
    }
}

/// Unknown layout of an [`IndicatorSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `n` unknowns per sample point, grouped by point.
    VectorUnknowns,
    /// One scalar `tau_j` per sample point.
    ScalarUnknowns,
    /// Scalar unknowns followed by one offset unknown.
    OffsetAugmented,
}

/// Assembled linear system `A w = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSystem {
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
    pub layout: Layout,
    pub sample_count: usize,
    pub dim: usize,
}

impl IndicatorSystem {
    /// Wraps an explicit matrix, checking the shape against the layout.
    pub fn from_parts(
        matrix: DenseMatrix,
        rhs: Vec<f64>,
        layout: Layout,
        sample_count: usize,
        dim: usize,
    ) -> Result<Self> {
        let expected_cols = match layout {
            Layout::VectorUnknowns => dim * sample_count,
            Layout::ScalarUnknowns => sample_count,
            Layout::OffsetAugmented => sample_count + 1,
        };
        if matrix.cols() != expected_cols {
            return Err(Error::DimensionMismatch {
                expected: expected_cols,
                found: matrix.cols(),
            });
        }
        if rhs.len() != matrix.rows() {
            return Err(Error::LengthMismatch {
                expected: matrix.rows(),
                found: rhs.len(),
            });
        }
        Ok(Self {
            matrix,
            rhs,
            layout,
            sample_count,
            dim,
        })
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn unknowns(&self) -> usize {
        self.matrix.cols()
    }
}

fn check_dims(queries: &PointCloud, sample: &PointCloud, config: &KernelConfig) -> Result<()> {
    for found in [queries.dim(), sample.dim()] {
        if found != config.dim() {
            return Err(Error::DimensionMismatch {
                expected: config.dim(),
                found,
            });
        }
    }
    if queries.is_empty() {
        return Err(invalid("at least one query point is required"));
    }
    Ok(())
}

/// Vector-unknown system: column `(j, k)` of row `i` is component `k` of `K(x_i, y_j)`.
pub fn assemble_vector_system(
    queries: &PointCloud,
    sample: &PointCloud,
    config: &KernelConfig,
    rhs_mode: RhsMode,
) -> Result<IndicatorSystem> {
    check_dims(queries, sample, config)?;
    if rhs_mode.has_offset() {
        return Err(invalid("offset augmentation is only supported for scalar unknowns"));
    }
    let n = config.dim();
    let rows = queries.len();
    let rhs = rhs_mode.targets(rows)?;
    let mut matrix = DenseMatrix::zeros(rows, n * sample.len());
    let mut row = vec![0.0; n];
    for (j, y) in sample.iter().enumerate() {
        for (i, x) in queries.iter().enumerate() {
            double_layer_row_into(x, y, config, &mut row)?;
            for (k, v) in row.iter().enumerate() {
                matrix[(i, j * n + k)] = *v;
            }
        }
    }
    IndicatorSystem::from_parts(matrix, rhs, Layout::VectorUnknowns, sample.len(), n)
}

/// Scalar-unknown system with known normals: entry `(i, j)` is `K(x_i, y_j) . N(y_j)`.
pub fn assemble_scalar_system(
    queries: &PointCloud,
    sample: &OrientedSample,
    config: &KernelConfig,
    rhs_mode: RhsMode,
) -> Result<IndicatorSystem> {
    check_dims(queries, sample.cloud(), config)?;
    let rows = queries.len();
    let rhs = rhs_mode.targets(rows)?;
    let offset = rhs_mode.has_offset();
    let m = sample.len();
    let mut matrix = DenseMatrix::zeros(rows, m + usize::from(offset));
    for j in 0..m {
        let (y, normal) = (sample.point(j), sample.normal(j));
        let col = matrix.column_mut(j);
        for (i, x) in queries.iter().enumerate() {
            col[i] = double_layer_normal(x, y, normal, config)?;
        }
    }
    if offset {
        matrix.column_mut(m).fill(1.0);
    }
    let layout = if offset {
        Layout::OffsetAugmented
    } else {
        Layout::ScalarUnknowns
    };
    IndicatorSystem::from_parts(matrix, rhs, layout, m, config.dim())
}

/// Treatment of negative raw scalar weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeWeightPolicy {
    /// Keep the signed weight in `mu`; `tau` is its magnitude.
    Keep,
    /// Replace by zero.
    #[default]
    ClampToZero,
    /// Fail with [`Error::NegativeWeight`].
    Error,
}

/// Tikhonov parameter, absolute or relative to the largest matrix entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularization {
    Absolute(f64),
    RelativeToMaxEntry(f64),
}

impl Regularization {
    pub fn resolve(&self, matrix: &DenseMatrix) -> f64 {
        match *self {
            Self::Absolute(l) => l,
            Self::RelativeToMaxEntry(f) => f * matrix.max_abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub regularization: Regularization,
    pub negative_weight_policy: NegativeWeightPolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            regularization: Regularization::RelativeToMaxEntry(1e-6),
            negative_weight_policy: NegativeWeightPolicy::ClampToZero,
        }
    }
}

impl SolverConfig {
    pub fn with_lambda(lambda: f64) -> Self {
        Self {
            regularization: Regularization::Absolute(lambda),
            ..Self::default()
        }
    }

    /// Default for collar and tube solids, whose thickness is a few sample
    /// spacings. Interior queries there only see smooth averages of the
    /// weights, and with a small `lambda` the fit lands on large
    /// oscillating solutions.
    pub fn thin_solid() -> Self {
        Self {
            regularization: Regularization::RelativeToMaxEntry(1e-1),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    pub rows: usize,
    pub cols: usize,
    pub lambda: f64,
    /// Raw scalar weights below zero before the policy was applied.
    pub negative_weights: usize,
}

/// Recovered elements `mu_j` and `tau_j = ||mu_j||`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSolution {
    dim: usize,
    mu: Vec<f64>,
    pub tau: Vec<f64>,
    /// Unknowns as solved, excluding the offset.
    pub raw: Vec<f64>,
    pub residual_norm: f64,
    pub offset: Option<f64>,
    pub diagnostics: SolveDiagnostics,
}

impl WeightSolution {
    /// Solution with prescribed scalar elements along the sample normals.
    pub fn from_tau(sample: &OrientedSample, tau: Vec<f64>) -> Result<Self> {
        if tau.len() != sample.len() {
            return Err(Error::LengthMismatch {
                expected: sample.len(),
                found: tau.len(),
            });
        }
        if let Some(index) = tau.iter().position(|t| !(*t >= 0.0)) {
            return Err(Error::NegativeWeight {
                index,
                value: tau[index],
            });
        }
        let n = sample.dim();
        let mut mu = Vec::with_capacity(n * tau.len());
        for (j, t) in tau.iter().enumerate() {
            mu.extend(sample.normal(j).iter().map(|v| v * t));
        }
        Ok(Self {
            dim: n,
            mu,
            raw: tau.clone(),
            diagnostics: SolveDiagnostics {
                rows: 0,
                cols: tau.len(),
                lambda: 0.0,
                negative_weights: 0,
            },
            tau,
            residual_norm: 0.0,
            offset: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn mu(&self, j: usize) -> &[f64] {
        &self.mu[j * self.dim..(j + 1) * self.dim]
    }

    pub fn total(&self) -> f64 {
        self.tau.iter().sum()
    }

    /// Restriction to the sample indices `range` (offset and diagnostics kept).
    pub fn slice(&self, range: core::ops::Range<usize>) -> Self {
        let n = self.dim;
        Self {
            dim: n,
            mu: self.mu[range.start * n..range.end * n].to_vec(),
            tau: self.tau[range.clone()].to_vec(),
            raw: if self.raw.len() == self.tau.len() {
                self.raw[range].to_vec()
            } else {
                self.raw[range.start * n..range.end * n].to_vec()
            },
            residual_norm: self.residual_norm,
            offset: self.offset,
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// Solves `min ||A w - b||^2 + lambda^2 ||w||^2` and extracts the elements.
///
/// Scalar layouts need `normals` (row-major, `dim` per sample point) to
/// rebuild `mu_j = w_j N(y_j)`.
pub fn solve_weights(
    system: &IndicatorSystem,
    config: &SolverConfig,
    normals: Option<&[f64]>,
) -> Result<WeightSolution> {
    if system.rows() == 0 {
        return Err(invalid("system has no rows"));
    }
    let lambda = config.regularization.resolve(&system.matrix);
    if !(lambda >= 0.0) {
        return Err(invalid("regularization must be >= 0"));
    }
    let sol = lstsq_tikhonov(&system.matrix, &system.rhs, lambda)?;
    let n = system.dim;
    let m = system.sample_count;
    let mut negative_weights = 0;
    let (mu, tau, raw, offset) = match system.layout {
        Layout::VectorUnknowns => {
            let tau = sol
                .x
                .chunks_exact(n)
                .map(|mu| libm::sqrt(mu.iter().map(|v| v * v).sum()))
                .collect();
            (sol.x.clone(), tau, sol.x, None)
        }
        Layout::ScalarUnknowns | Layout::OffsetAugmented => {
            let normals = normals.ok_or_else(|| invalid("scalar layout needs sample normals"))?;
            if normals.len() != n * m {
                return Err(Error::LengthMismatch {
                    expected: n * m,
                    found: normals.len(),
                });
            }
            let raw = sol.x[..m].to_vec();
            let mut mu = Vec::with_capacity(n * m);
            let mut tau = Vec::with_capacity(m);
            for (j, &w) in raw.iter().enumerate() {
                let kept = if w < 0.0 {
                    negative_weights += 1;
                    match config.negative_weight_policy {
                        NegativeWeightPolicy::Keep => w,
                        NegativeWeightPolicy::ClampToZero => 0.0,
                        NegativeWeightPolicy::Error => {
                            return Err(Error::NegativeWeight { index: j, value: w })
                        }
                    }
                } else {
                    w
                };
                mu.extend(normals[j * n..(j + 1) * n].iter().map(|v| v * kept));
                tau.push(kept.abs());
            }
            let offset = (system.layout == Layout::OffsetAugmented).then(|| sol.x[m]);
            (mu, tau, raw, offset)
        }
    };
    Ok(WeightSolution {
        dim: n,
        mu,
        tau,
        raw,
        residual_norm: sol.residual_norm,
        offset,
        diagnostics: SolveDiagnostics {
            rows: system.rows(),
            cols: system.unknowns(),
            lambda,
            negative_weights,
        },
    })
}

/// Discrete indicator `sum_j K(x, y_j) . mu_j` (plus the offset, if any).
pub fn evaluate_indicator(
    x: &[f64],
    sample: &PointCloud,
    solution: &WeightSolution,
    config: &KernelConfig,
) -> Result<f64> {
    if sample.len() != solution.len() {
        return Err(Error::LengthMismatch {
            expected: sample.len(),
            found: solution.len(),
        });
    }
    if sample.dim() != config.dim() || solution.dim() != config.dim() {
        return Err(Error::DimensionMismatch {
            expected: config.dim(),
            found: sample.dim(),
        });
    }
    let mut row = vec![0.0; config.dim()];
    let mut sum = 0.0;
    for (j, y) in sample.iter().enumerate() {
        double_layer_row_into(x, y, config, &mut row)?;
        sum += row.iter().zip(solution.mu(j)).map(|(a, b)| a * b).sum::<f64>();
    }
    Ok(sum + solution.offset.unwrap_or(0.0))
}

/// `sum_j f(y_j) tau_j`.
pub fn integrate_function(f_values: &[f64], solution: &WeightSolution) -> Result<f64> {
    if f_values.len() != solution.len() {
        return Err(Error::LengthMismatch {
            expected: solution.len(),
            found: f_values.len(),
        });
    }
    Ok(f_values.iter().zip(&solution.tau).map(|(f, t)| f * t).sum())
}

/// Closed hypersurface with known normals: scalar system on interior
/// queries, solved with `solver`.
pub fn solve_closed_scalar(
    sample: &OrientedSample,
    interior: &PointCloud,
    kernel: &KernelConfig,
    solver: &SolverConfig,
) -> Result<WeightSolution> {
    let system = assemble_scalar_system(interior, sample, kernel, RhsMode::InteriorOne)?;
    solve_weights(&system, solver, Some(sample.normals()))
}

/// Closed hypersurface from points only: vector system on interior queries.
pub fn solve_closed_vector(
    sample: &PointCloud,
    interior: &PointCloud,
    kernel: &KernelConfig,
    solver: &SolverConfig,
) -> Result<WeightSolution> {
    let system = assemble_vector_system(interior, sample, kernel, RhsMode::InteriorOne)?;
    solve_weights(&system, solver, None)
}

/// Default query count: `n N_Y` for vector unknowns, `2 N_Y` for scalar ones.
pub fn default_query_count(layout: Layout, sample_count: usize, dim: usize) -> usize {
    match layout {
        Layout::VectorUnknowns => dim * sample_count,
        Layout::ScalarUnknowns | Layout::OffsetAugmented => 2 * sample_count,
    }
}

pub(crate) fn ensure_same_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::LengthMismatch { expected, found });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gen_fibonacci_sphere, interior_queries, SurfaceSpec};
    use core::f64::consts::PI;

    fn exact_sphere(count: usize) -> (OrientedSample, WeightSolution) {
        let s = gen_fibonacci_sphere(count).unwrap();
        let w = WeightSolution::from_tau(&s, vec![4.0 * PI / count as f64; count]).unwrap();
        (s, w)
    }

    #[test]
    fn single_row_vector_system() {
        let k = KernelConfig::exact(3).unwrap();
        let q = PointCloud::new(3, vec![0.0; 3]).unwrap();
        let y = PointCloud::new(3, vec![1.0, 0.0, 0.0]).unwrap();
        let sys = assemble_vector_system(&q, &y, &k, RhsMode::InteriorOne).unwrap();
        assert_eq!((sys.rows(), sys.unknowns()), (1, 3));
        assert!((sys.matrix[(0, 0)] - 1.0 / (4.0 * PI)).abs() < 1e-16);
        assert_eq!(sys.rhs, vec![1.0]);
        assert_eq!(sys.layout, Layout::VectorUnknowns);
    }

    #[test]
    fn vector_system_shape_and_exact_rows() {
        let k = KernelConfig::exact(3).unwrap();
        let (s, _) = exact_sphere(50);
        let q = interior_queries(&SurfaceSpec::sphere(), 200, 1).unwrap();
        let sys = assemble_vector_system(&q, s.cloud(), &k, RhsMode::InteriorOne).unwrap();
        assert_eq!((sys.rows(), sys.unknowns()), (200, 150));
        assert!(sys.rhs.iter().all(|&b| b == 1.0));

        let (s, w) = exact_sphere(2000);
        let q = interior_queries(&SurfaceSpec::sphere(), 50, 2).unwrap();
        let sys = assemble_vector_system(&q, s.cloud(), &k, RhsMode::OnSurfaceHalf).unwrap();
        let exact_mu: Vec<f64> = (0..2000).flat_map(|j| w.mu(j).to_vec()).collect();
        let chi = sys.matrix.mul_vec(&exact_mu).unwrap();
        assert!(chi.iter().all(|c| (c - 1.0).abs() < 0.05));
        assert!(sys.rhs.iter().all(|&b| b == 0.5));
    }

    #[test]
    fn scalar_system_entries_and_flip() {
        let k = KernelConfig::exact(3).unwrap();
        let q = PointCloud::new(3, vec![0.0; 3]).unwrap();
        let y = OrientedSample::new(
            PointCloud::new(3, vec![1.0, 0.0, 0.0]).unwrap(),
            vec![1.0, 0.0, 0.0],
        )
        .unwrap();
        let sys = assemble_scalar_system(&q, &y, &k, RhsMode::InteriorOne).unwrap();
        assert!((sys.matrix[(0, 0)] - 1.0 / (4.0 * PI)).abs() < 1e-16);

        let (s, _) = exact_sphere(100);
        let q = interior_queries(&SurfaceSpec::sphere(), 20, 3).unwrap();
        let a = assemble_scalar_system(&q, &s, &k, RhsMode::InteriorOne).unwrap();
        let b = assemble_scalar_system(&q, &s.flipped(), &k, RhsMode::InteriorOne).unwrap();
        for i in 0..20 {
            for j in 0..100 {
                assert_eq!(a.matrix[(i, j)], -b.matrix[(i, j)]);
            }
        }
    }

    #[test]
    fn scalar_system_residual_at_exact_weights() {
        let k = KernelConfig::exact(3).unwrap();
        let (s, w) = exact_sphere(1000);
        let q = interior_queries(&SurfaceSpec::sphere(), 100, 7).unwrap();
        let sys = assemble_scalar_system(&q, &s, &k, RhsMode::InteriorOne).unwrap();
        let chi = sys.matrix.mul_vec(&w.tau).unwrap();
        for (c, b) in chi.iter().zip(&sys.rhs) {
            assert!((c - b).abs() < 0.05);
        }
    }

    #[test]
    fn coincident_query_is_singular() {
        let k = KernelConfig::exact(3).unwrap();
        let (s, _) = exact_sphere(10);
        let q = PointCloud::new(3, s.point(3).to_vec()).unwrap();
        assert_eq!(
            assemble_scalar_system(&q, &s, &k, RhsMode::OnSurfaceHalf),
            Err(Error::SingularEvaluation)
        );
        let bad = PointCloud::new(4, vec![0.0; 4]).unwrap();
        assert!(matches!(
            assemble_vector_system(&bad, s.cloud(), &k, RhsMode::InteriorOne),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn identity_scalar_solve() {
        let sys = IndicatorSystem::from_parts(
            DenseMatrix::identity(3),
            vec![1.0, 2.0, 3.0],
            Layout::ScalarUnknowns,
            3,
            3,
        )
        .unwrap();
        let normals = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let sol = solve_weights(&sys, &SolverConfig::with_lambda(0.0), Some(&normals)).unwrap();
        for (r, e) in sol.raw.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r - e).abs() < 1e-14);
        }
        assert_eq!(sol.tau, sol.raw);
        assert!(solve_weights(&sys, &SolverConfig::with_lambda(0.0), None).is_err());
    }

    #[test]
    fn negative_weight_policies() {
        let sys = IndicatorSystem::from_parts(
            DenseMatrix::identity(2),
            vec![-1.0, 2.0],
            Layout::ScalarUnknowns,
            2,
            3,
        )
        .unwrap();
        let normals = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let mut cfg = SolverConfig::with_lambda(0.0);
        let clamp = solve_weights(&sys, &cfg, Some(&normals)).unwrap();
        assert_eq!(clamp.tau, vec![0.0, 2.0]);
        assert_eq!(clamp.diagnostics.negative_weights, 1);
        cfg.negative_weight_policy = NegativeWeightPolicy::Keep;
        let keep = solve_weights(&sys, &cfg, Some(&normals)).unwrap();
        assert_eq!(keep.tau, vec![1.0, 2.0]);
        assert_eq!(keep.mu(0), &[-1.0, 0.0, 0.0]);
        cfg.negative_weight_policy = NegativeWeightPolicy::Error;
        assert!(matches!(
            solve_weights(&sys, &cfg, Some(&normals)),
            Err(Error::NegativeWeight { index: 0, .. })
        ));
    }

    #[test]
    fn huge_regularization_drives_weights_to_zero() {
        let sys = IndicatorSystem::from_parts(
            DenseMatrix::from_row_major(2, 2, &[1.0, 0.5, 0.2, 1.0]).unwrap(),
            vec![1.0, 1.0],
            Layout::ScalarUnknowns,
            2,
            3,
        )
        .unwrap();
        let normals = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        let sol = solve_weights(&sys, &SolverConfig::with_lambda(1e8), Some(&normals)).unwrap();
        assert!(sol.raw.iter().all(|w| w.abs() < 1e-14));
    }

    #[test]
    fn indicator_with_exact_elements() {
        let k = KernelConfig::exact(3).unwrap();
        let (s, w) = exact_sphere(2000);
        let at_center = evaluate_indicator(&[0.0; 3], s.cloud(), &w, &k).unwrap();
        assert!((at_center - 1.0).abs() < 1e-12);
        let far = evaluate_indicator(&[10.0, 0.0, 0.0], s.cloud(), &w, &k).unwrap();
        assert!(far.abs() < 0.01);
        // Midpoint of two neighboring lattice points, pushed back onto the sphere.
        let (a, b) = (s.point(1000), s.point(1001));
        let mid = crate::geometry::normalized(&[a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
        let on_surface = evaluate_indicator(&mid, s.cloud(), &w, &k).unwrap();
        assert!((on_surface - 0.5).abs() < 0.1, "{on_surface}");
        assert_eq!(
            evaluate_indicator(s.point(0), s.cloud(), &w, &k),
            Err(Error::SingularEvaluation)
        );
    }

    #[test]
    fn integrate_with_exact_elements() {
        let (s, w) = exact_sphere(2000);
        assert_eq!(integrate_function(&vec![0.0; 2000], &w).unwrap(), 0.0);
        let one = integrate_function(&vec![1.0; 2000], &w).unwrap();
        assert!((one - 4.0 * PI).abs() < 1e-11);
        let z2: Vec<f64> = s.cloud().iter().map(|p| p[2] * p[2]).collect();
        let v = integrate_function(&z2, &w).unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() < 0.005 * 4.0 * PI / 3.0);
        assert!(integrate_function(&[1.0], &w).is_err());
    }
}
