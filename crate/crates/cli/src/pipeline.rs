//! Fixture generation, solving, integration and indicator probing on top of
//! the text formats.

use anyhow::{bail, ensure, Context, Result};
use layerquad_core::collar::{build_collar, integrate_with_boundary, solve_collar, CollarConfig};
use layerquad_core::geometry::{
    exterior_queries, gen_circle_r3, gen_ellipsoid, gen_fibonacci_sphere, gen_hemisphere,
    interior_queries, FramedSample, Integrand, OrientedSample, PointCloud, SurfaceKind,
    SurfaceSpec,
};
use layerquad_core::kernel::KernelConfig;
use layerquad_core::riemannian::{
    cap_boundary_sample, evaluate_manifold_indicator, integrate_on_manifold_boundary,
    solve_manifold_boundary, ManifoldBoundarySample, SphereModel,
};
use layerquad_core::solver::{
    assemble_scalar_system, assemble_vector_system, default_query_count, evaluate_indicator,
    integrate_function, solve_weights, Layout, NegativeWeightPolicy, Regularization, RhsMode,
    SolverConfig, WeightSolution,
};
use layerquad_core::tube::{
    build_tube, integrate_codim, sample_normal_sphere, solve_tube, TubeSample,
};

use crate::io::{Pipeline, SampleData, SampleFile, WeightsFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PipelineKind {
    Closed,
    Collar,
    Tube,
    S2Cap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Unknowns {
    #[default]
    Scalar,
    Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhsChoice {
    /// Queries strictly inside, target 1.
    #[default]
    Interior,
    /// The sample points themselves, target 1/2; needs a softening width.
    OnSurface,
}

/// Everything `weights` needs besides the sample.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub pipeline: PipelineKind,
    pub unknowns: Unknowns,
    pub rhs: RhsChoice,
    pub softening: f64,
    /// `None` picks the pipeline default.
    pub regularization: Option<Regularization>,
    pub policy: NegativeWeightPolicy,
    /// Collar or tube thickness; `None` means `2 h`.
    pub epsilon: Option<f64>,
    /// Directions per slice sphere for tubes.
    pub directions: usize,
    pub query_count: Option<usize>,
    pub exterior_count: Option<usize>,
    pub queries: Option<PointCloud>,
    pub exterior: Option<PointCloud>,
    pub seed: u64,
}

impl SolveOptions {
    pub fn new(pipeline: PipelineKind) -> Self {
        Self {
            pipeline,
            unknowns: Unknowns::Scalar,
            rhs: RhsChoice::Interior,
            softening: 0.0,
            regularization: None,
            policy: NegativeWeightPolicy::ClampToZero,
            epsilon: None,
            directions: 16,
            query_count: None,
            exterior_count: None,
            queries: None,
            exterior: None,
            seed: 1,
        }
    }

    fn solver_config(&self) -> SolverConfig {
        let base = match self.pipeline {
            PipelineKind::Collar | PipelineKind::Tube => SolverConfig::thin_solid(),
            PipelineKind::Closed | PipelineKind::S2Cap => SolverConfig::default(),
        };
        SolverConfig {
            regularization: self.regularization.unwrap_or(base.regularization),
            negative_weight_policy: self.policy,
        }
    }
}

/// Result of a solve: the weight file plus what `weights` prints.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub weights: WeightsFile,
    pub rows: usize,
    pub cols: usize,
    pub negative_weights: usize,
    pub total: f64,
}

/// Default number of interior queries on the S^2 cap fixture, and of exterior ones.
pub const CAP_QUERY_COUNT: usize = 50;

pub fn fixture_spec(name: &str, abc: [f64; 3], alpha: f64) -> Result<SurfaceSpec> {
    Ok(match name {
        "sphere" => SurfaceSpec::sphere(),
        "ellipsoid" => SurfaceSpec::ellipsoid(abc[0], abc[1], abc[2])?,
        "hemisphere" => SurfaceSpec::hemisphere(),
        "circle-r3" => SurfaceSpec::circle_r3(),
        "s2-cap" => SurfaceSpec::s2_cap(alpha)?,
        other => bail!("unknown fixture {other} (sphere, ellipsoid, hemisphere, circle-r3, s2-cap)"),
    })
}

/// Sample of a fixture with `count` points; `seed` only matters for ellipsoids.
pub fn generate_fixture(spec: &SurfaceSpec, count: usize, seed: u64) -> Result<SampleFile> {
    let (data, manifold_s2) = match spec.kind {
        SurfaceKind::Sphere => (SampleData::Oriented(gen_fibonacci_sphere(count)?), false),
        SurfaceKind::Ellipsoid { a, b, c } => {
            (SampleData::Oriented(gen_ellipsoid(a, b, c, count, seed)?), false)
        }
        SurfaceKind::Hemisphere => (SampleData::Oriented(gen_hemisphere(count)?), false),
        SurfaceKind::CircleR3 => (SampleData::Framed(gen_circle_r3(count)?), false),
        SurfaceKind::S2Cap { alpha } => (
            SampleData::Oriented(cap_boundary_sample(alpha, count)?.as_oriented().clone()),
            true,
        ),
    };
    Ok(SampleFile {
        fixture: Some(SurfaceSpec {
            thickness: None,
            ..spec.clone()
        }),
        manifold_s2,
        data,
    })
}

fn oriented(sample: &SampleFile) -> Result<&OrientedSample> {
    match &sample.data {
        SampleData::Oriented(s) => Ok(s),
        SampleData::Cloud(_) => bail!("this pipeline needs normals; the sample has points only"),
        SampleData::Framed(_) => bail!("this pipeline needs a hypersurface sample, got a framed one"),
    }
}

fn framed(sample: &SampleFile) -> Result<FramedSample> {
    match &sample.data {
        SampleData::Framed(s) => Ok(s.clone()),
        SampleData::Oriented(s) => Ok(FramedSample::new(s.cloud().clone(), 1, s.normals().to_vec())?),
        SampleData::Cloud(_) => bail!("tube pipeline needs normal frames"),
    }
}

/// Thickness for collars and tubes: explicit, or twice the median spacing.
pub fn resolve_epsilon(options: &SolveOptions, cloud: &PointCloud) -> Result<f64> {
    let eps = match options.epsilon {
        Some(e) => e,
        None => 2.0 * cloud.median_spacing(),
    };
    ensure!(eps > 0.0 && eps.is_finite(), "thickness must be positive, got {eps}");
    Ok(eps)
}

fn kernel(dim: usize, options: &SolveOptions) -> Result<KernelConfig> {
    if options.rhs == RhsChoice::OnSurface && options.softening <= 0.0 {
        bail!("on-surface queries coincide with sample points; pass a positive --softening");
    }
    Ok(KernelConfig::new(dim, options.softening)?)
}

fn report(
    pipeline: Pipeline,
    boundary: OrientedSample,
    base_index: Option<Vec<usize>>,
    sol: WeightSolution,
    softening: f64,
) -> SolveReport {
    SolveReport {
        rows: sol.diagnostics.rows,
        cols: sol.diagnostics.cols,
        negative_weights: sol.diagnostics.negative_weights,
        total: sol.total(),
        weights: WeightsFile {
            pipeline,
            boundary,
            base_index,
            offset: sol.offset,
            softening,
            lambda: sol.diagnostics.lambda,
            residual: sol.residual_norm,
            tau: sol.tau,
        },
    }
}

/// Assembles and solves the system of `options.pipeline` on `sample`.
pub fn solve(sample: &SampleFile, options: &SolveOptions) -> Result<SolveReport> {
    match options.pipeline {
        PipelineKind::Closed => solve_closed(sample, options),
        PipelineKind::Collar => solve_collar_pipeline(sample, options),
        PipelineKind::Tube => solve_tube_pipeline(sample, options),
        PipelineKind::S2Cap => solve_cap(sample, options),
    }
}

fn solve_closed(sample: &SampleFile, options: &SolveOptions) -> Result<SolveReport> {
    let cloud = sample.cloud();
    let dim = cloud.dim();
    let k = kernel(dim, options)?;
    let layout = match options.unknowns {
        Unknowns::Scalar => Layout::ScalarUnknowns,
        Unknowns::Vector => Layout::VectorUnknowns,
    };
    let (queries, rhs) = match options.rhs {
        RhsChoice::OnSurface => (cloud.clone(), RhsMode::OnSurfaceHalf),
        RhsChoice::Interior => {
            let count = options
                .query_count
                .unwrap_or_else(|| default_query_count(layout, cloud.len(), dim));
            let q = match (&options.queries, &sample.fixture) {
                (Some(q), _) => q.clone(),
                (None, Some(spec)) => interior_queries(spec, count, options.seed)?,
                (None, None) => bail!("no fixture header: pass --queries with interior points"),
            };
            (q, RhsMode::InteriorOne)
        }
    };
    let config = options.solver_config();
    match options.unknowns {
        Unknowns::Scalar => {
            let s = oriented(sample)?;
            let system = assemble_scalar_system(&queries, s, &k, rhs)?;
            let sol = solve_weights(&system, &config, Some(s.normals()))?;
            Ok(report(Pipeline::Closed, s.clone(), None, sol, options.softening))
        }
        Unknowns::Vector => {
            let system = assemble_vector_system(&queries, cloud, &k, rhs)?;
            let sol = solve_weights(&system, &config, None)?;
            // Recovered normals mu_j / |mu_j| make the file self-contained.
            let mut normals = Vec::with_capacity(dim * cloud.len());
            for j in 0..sol.len() {
                let mu = sol.mu(j);
                let t = sol.tau[j];
                if t > 0.0 {
                    normals.extend(mu.iter().map(|v| v / t));
                } else {
                    normals.extend((0..dim).map(|i| if i == 0 { 1.0 } else { 0.0 }));
                }
            }
            let boundary = OrientedSample::new(cloud.clone(), normals)?;
            Ok(report(Pipeline::Closed, boundary, None, sol, options.softening))
        }
    }
}

fn solve_collar_pipeline(sample: &SampleFile, options: &SolveOptions) -> Result<SolveReport> {
    ensure!(options.unknowns == Unknowns::Scalar, "collar pipeline uses scalar unknowns");
    let s = oriented(sample)?;
    let eps = resolve_epsilon(options, s.cloud())?;
    let collar = build_collar(s, &CollarConfig::new(eps)?)?;
    let boundary = collar.solid_boundary()?;
    let k = kernel(s.dim(), options)?;
    let config = options.solver_config();
    let sol = match options.rhs {
        RhsChoice::OnSurface => {
            let system = assemble_scalar_system(boundary.cloud(), &boundary, &k, RhsMode::OnSurfaceHalf)?;
            solve_weights(&system, &config, Some(boundary.normals()))?
        }
        RhsChoice::Interior => {
            let count = options.query_count.unwrap_or(2 * s.len());
            let queries = match (&options.queries, &sample.fixture) {
                (Some(q), _) => q.clone(),
                (None, Some(spec)) if spec.kind == SurfaceKind::Hemisphere => {
                    interior_queries(&spec.clone().with_thickness(eps)?, count, options.seed)?
                }
                _ => collar.interior_queries(count, options.seed)?,
            };
            solve_collar(&collar, &queries, &k, &config)?.solution
        }
    };
    Ok(report(
        Pipeline::Collar { epsilon: eps },
        boundary,
        None,
        sol,
        options.softening,
    ))
}

/// Tube built from a framed sample with the options' thickness and directions.
pub fn tube_for(sample: &SampleFile, options: &SolveOptions) -> Result<TubeSample> {
    let base = framed(sample)?;
    if base.codim() == 2 {
        ensure!(options.directions >= 8, "tubes of codimension 2 need at least 8 directions");
    }
    let eps = resolve_epsilon(options, base.cloud())?;
    let dirs = sample_normal_sphere(base.codim(), options.directions, eps)?;
    Ok(build_tube(&base, &dirs)?)
}

fn solve_tube_pipeline(sample: &SampleFile, options: &SolveOptions) -> Result<SolveReport> {
    ensure!(options.unknowns == Unknowns::Scalar, "tube pipeline uses scalar unknowns");
    let tube = tube_for(sample, options)?;
    let eps = tube.directions.epsilon();
    let k = kernel(tube.base.dim(), options)?;
    let config = options.solver_config();
    let sol = match options.rhs {
        RhsChoice::OnSurface => {
            let system =
                assemble_scalar_system(tube.sample.cloud(), &tube.sample, &k, RhsMode::OnSurfaceHalf)?;
            solve_weights(&system, &config, Some(tube.sample.normals()))?
        }
        RhsChoice::Interior => {
            let count = options.query_count.unwrap_or(tube.len());
            let queries = match (&options.queries, &sample.fixture) {
                (Some(q), _) => q.clone(),
                (None, Some(spec)) if spec.kind == SurfaceKind::CircleR3 => {
                    interior_queries(&spec.clone().with_thickness(eps)?, count, options.seed)?
                }
                _ => tube.interior_queries(count, options.seed)?,
            };
            solve_tube(&tube, &queries, &k, &config)?.solution
        }
    };
    let base_index = (0..tube.len()).map(|k| tube.base_index(k)).collect();
    Ok(report(
        Pipeline::Tube {
            codim: tube.base.codim(),
            q: tube.directions.len(),
            epsilon: eps,
        },
        tube.sample,
        Some(base_index),
        sol,
        options.softening,
    ))
}

fn solve_cap(sample: &SampleFile, options: &SolveOptions) -> Result<SolveReport> {
    let s = oriented(sample)?;
    let boundary = ManifoldBoundarySample::new(s.clone(), &SphereModel)
        .context("s2-cap samples need points on the unit sphere with tangent unit conormals")?;
    let spec = sample.fixture.as_ref();
    let inside = match (&options.queries, spec) {
        (Some(q), _) => q.clone(),
        (None, Some(spec)) => interior_queries(
            spec,
            options.query_count.unwrap_or(CAP_QUERY_COUNT),
            options.seed,
        )?,
        (None, None) => bail!("no fixture header: pass --queries and --exterior-queries"),
    };
    let outside = match (&options.exterior, spec) {
        (Some(q), _) => q.clone(),
        (None, Some(spec)) => exterior_queries(
            spec,
            options.exterior_count.unwrap_or(CAP_QUERY_COUNT),
            options.seed.wrapping_add(1),
        )?,
        (None, None) => bail!("no fixture header: pass --exterior-queries"),
    };
    let sol = solve_manifold_boundary(&inside, &outside, &boundary, &SphereModel, &options.solver_config())?;
    Ok(report(Pipeline::S2Cap, s.clone(), None, sol, 0.0))
}

fn solution_of(weights: &WeightsFile) -> Result<WeightSolution> {
    let mut sol = WeightSolution::from_tau(&weights.boundary, weights.tau.clone())?;
    sol.offset = weights.offset;
    Ok(sol)
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

const MATCH_TOLERANCE: f64 = 1e-9;

/// Integral value and the fixture reference, when there is one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralReport {
    pub value: f64,
    pub reference: Option<f64>,
}

impl IntegralReport {
    /// Relative error, or the absolute one when the reference is zero.
    pub fn error(&self) -> Option<f64> {
        self.reference.map(|r| {
            if r == 0.0 {
                (self.value - r).abs()
            } else {
                (self.value - r).abs() / r.abs()
            }
        })
    }
}

/// Applies the summation rule of the weight file's pipeline.
pub fn integrate(sample: &SampleFile, weights: &WeightsFile, integrand: Integrand) -> Result<IntegralReport> {
    let cloud = sample.cloud();
    let b = &weights.boundary;
    ensure!(b.dim() == cloud.dim(), "sample and weight files have different dimensions");
    let value = match weights.pipeline {
        Pipeline::Closed | Pipeline::S2Cap => {
            ensure!(
                b.len() == cloud.len() && max_gap(b.cloud().coords(), cloud.coords()) <= MATCH_TOLERANCE,
                "weight file does not belong to this sample"
            );
            let f = integrand.eval_all(cloud);
            let sol = solution_of(weights)?;
            if weights.pipeline == Pipeline::S2Cap {
                integrate_on_manifold_boundary(&f, &sol)?
            } else {
                integrate_function(&f, &sol)?
            }
        }
        Pipeline::Collar { .. } => {
            let m = cloud.len();
            ensure!(
                b.len() == 2 * m
                    && max_gap(&b.cloud().coords()[..m * cloud.dim()], cloud.coords()) <= MATCH_TOLERANCE,
                "collar weight file does not belong to this sample"
            );
            let f = integrand.eval_all(cloud);
            integrate_with_boundary(&f, &weights.tau[..m], &weights.tau[m..])?
        }
        Pipeline::Tube { codim, q, epsilon } => {
            let p = cloud.len();
            ensure!(b.len() == p * q, "tube weight file does not belong to this sample");
            let index = weights.base_index.as_deref().unwrap_or(&[]);
            for k in 0..b.len() {
                ensure!(index.get(k) == Some(&(k / q)), "tube rows out of order at {k}");
                let base: Vec<f64> = b
                    .point(k)
                    .iter()
                    .zip(b.normal(k))
                    .map(|(a, n)| a - epsilon * n)
                    .collect();
                ensure!(
                    max_gap(&base, cloud.point(k / q)) <= MATCH_TOLERANCE,
                    "tube weight file does not belong to this sample"
                );
            }
            let dirs = sample_normal_sphere(codim, q, epsilon)?;
            integrate_codim(&integrand.eval_all(cloud), &weights.tau, &dirs)?
        }
    };
    Ok(IntegralReport {
        value,
        reference: sample.fixture.as_ref().and_then(|s| s.reference(integrand)),
    })
}

/// Discrete indicator at each query.
pub fn indicator(weights: &WeightsFile, queries: &PointCloud) -> Result<Vec<f64>> {
    let sol = solution_of(weights)?;
    match weights.pipeline {
        Pipeline::S2Cap => {
            let boundary = ManifoldBoundarySample::new(weights.boundary.clone(), &SphereModel)?;
            queries
                .iter()
                .map(|x| Ok(evaluate_manifold_indicator(x, &boundary, &sol, &SphereModel)?))
                .collect()
        }
        _ => {
            let k = KernelConfig::new(weights.boundary.dim(), weights.softening)?;
            queries
                .iter()
                .map(|x| Ok(evaluate_indicator(x, weights.boundary.cloud(), &sol, &k)?))
                .collect()
        }
    }
}

/// Interior queries for `generate --queries-out`.
pub fn fixture_queries(spec: &SurfaceSpec, sample: &SampleFile, eps: Option<f64>, count: usize, seed: u64) -> Result<PointCloud> {
    let spec = match spec.kind {
        SurfaceKind::Hemisphere | SurfaceKind::CircleR3 => {
            let eps = match eps {
                Some(e) => e,
                None => 2.0 * sample.cloud().median_spacing(),
            };
            spec.clone().with_thickness(eps)?
        }
        _ => spec.clone(),
    };
    Ok(interior_queries(&spec, count, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn closed_sphere_round() {
        let sample = generate_fixture(&SurfaceSpec::sphere(), 300, 1).unwrap();
        let mut opts = SolveOptions::new(PipelineKind::Closed);
        opts.query_count = Some(200);
        let r = solve(&sample, &opts).unwrap();
        assert!((r.total / (4.0 * PI) - 1.0).abs() < 0.02);
        let v = integrate(&sample, &r.weights, Integrand::parse("z2").unwrap()).unwrap();
        assert!(v.error().unwrap() < 0.03);
    }

    #[test]
    fn mismatched_files_rejected() {
        let a = generate_fixture(&SurfaceSpec::sphere(), 100, 1).unwrap();
        let b = generate_fixture(&SurfaceSpec::sphere(), 101, 1).unwrap();
        let r = solve(&a, &SolveOptions::new(PipelineKind::Closed)).unwrap();
        assert!(integrate(&b, &r.weights, Integrand::Const1).is_err());
    }

    #[test]
    fn on_surface_needs_softening() {
        let a = generate_fixture(&SurfaceSpec::sphere(), 50, 1).unwrap();
        let mut opts = SolveOptions::new(PipelineKind::Closed);
        opts.rhs = RhsChoice::OnSurface;
        assert!(solve(&a, &opts).is_err());
        opts.softening = 1e-9;
        assert!(solve(&a, &opts).is_ok());
    }

    #[test]
    fn tube_direction_floor() {
        let a = generate_fixture(&SurfaceSpec::circle_r3(), 20, 1).unwrap();
        let mut opts = SolveOptions::new(PipelineKind::Tube);
        opts.directions = 4;
        assert!(tube_for(&a, &opts).is_err());
    }

    #[test]
    fn unknown_fixture() {
        assert!(fixture_spec("torus", [1.0; 3], 1.0).is_err());
    }
}
