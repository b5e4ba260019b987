//! Desk-scale acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use layerquad::pipeline::{generate_fixture, integrate, solve, PipelineKind, SolveOptions, Unknowns};
use layerquad::study::{nonincreasing_steps, run_study, StudyConfig};
use layerquad_core::geometry::{
    exterior_queries, gen_fibonacci_sphere, interior_queries, Integrand, SurfaceSpec,
};
use layerquad_core::kernel::{double_layer_row, fundamental_solution, KernelConfig};
use layerquad_core::linalg::{solve_dense, DenseMatrix};
use layerquad_core::riemannian::continuous_cap_indicator;
use layerquad_core::solver::{
    evaluate_indicator, solve_weights, IndicatorSystem, Layout, NegativeWeightPolicy,
    Regularization, SolverConfig, WeightSolution,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * target.abs()
}

fn kernel_finite_differences() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for n in [3, 4, 5] {
        let k = KernelConfig::exact(n).unwrap();
        for _ in 0..100 {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            // Keep pairs apart so the difference quotient is well resolved.
            let gap: f64 = x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if gap < 0.2 {
                y[0] += 0.5;
            }
            let row = double_layer_row(&x, &y, &k).unwrap();
            let h = 1e-5;
            let mut err2 = 0.0;
            let mut ref2 = 0.0;
            for i in 0..n {
                let mut yp = y.clone();
                let mut ym = y.clone();
                yp[i] += h;
                ym[i] -= h;
                let d = (fundamental_solution(&x, &yp, &k).unwrap()
                    - fundamental_solution(&x, &ym, &k).unwrap())
                    / (2.0 * h);
                // The double-layer row is minus the gradient in y.
                err2 += (row[i] + d) * (row[i] + d);
                ref2 += row[i] * row[i];
            }
            worst = worst.max((err2 / ref2).sqrt());
        }
    }
    outcome(worst < 1e-6, format!("max rel err {worst:.2e} over 300 pairs"))
}

fn exact_gauss_identity() -> Outcome {
    let k = KernelConfig::exact(3).unwrap();
    let mut worst = 0.0f64;
    for n in [10, 100, 1000] {
        let s = gen_fibonacci_sphere(n).unwrap();
        let sol = WeightSolution::from_tau(&s, vec![4.0 * PI / n as f64; n]).unwrap();
        let chi = evaluate_indicator(&[0.0; 3], s.cloud(), &sol, &k).unwrap();
        worst = worst.max((chi - 1.0).abs());
    }
    outcome(worst < 1e-12, format!("max |chi(0) - 1| = {worst:.2e}"))
}

struct ClosedRun {
    sample: layerquad::io::SampleFile,
    weights: layerquad::io::WeightsFile,
}

fn closed_sphere() -> (Outcome, ClosedRun) {
    let sample = generate_fixture(&SurfaceSpec::sphere(), 1000, 1).unwrap();
    let mut opts = SolveOptions::new(PipelineKind::Closed);
    opts.query_count = Some(300);
    let r = solve(&sample, &opts).unwrap();
    let area = r.total;
    let z2 = integrate(&sample, &r.weights, Integrand::Product(2, 2)).unwrap().value;
    let z = integrate(&sample, &r.weights, Integrand::Coord(2)).unwrap().value;
    let pass = within(area, 4.0 * PI, 0.02) && within(z2, 4.0 * PI / 3.0, 0.03) && z.abs() < 0.05;
    (
        outcome(
            pass,
            format!(
                "area rel err {:.2e}, z^2 rel err {:.2e}, int z {:.2e}",
                (area / (4.0 * PI) - 1.0).abs(),
                (z2 / (4.0 * PI / 3.0) - 1.0).abs(),
                z
            ),
        ),
        ClosedRun {
            sample,
            weights: r.weights,
        },
    )
}

fn vector_unknowns() -> Outcome {
    let n = 1000;
    let sample = generate_fixture(&SurfaceSpec::sphere(), n, 1).unwrap();
    let mut opts = SolveOptions::new(PipelineKind::Closed);
    opts.unknowns = Unknowns::Vector;
    opts.query_count = Some(3 * n);
    let r = solve(&sample, &opts).unwrap();
    let b = &r.weights.boundary;
    let mut angle = 0.0;
    for j in 0..n {
        // Unit-sphere normals are the points themselves.
        let c: f64 = b.normal(j).iter().zip(b.point(j)).map(|(u, v)| u * v).sum();
        angle += c.clamp(-1.0, 1.0).acos().to_degrees();
    }
    angle /= n as f64;
    let pass = angle < 10.0 && within(r.total, 4.0 * PI, 0.05);
    outcome(
        pass,
        format!(
            "mean normal angle {angle:.3} deg, area rel err {:.2e}",
            (r.total / (4.0 * PI) - 1.0).abs()
        ),
    )
}

fn indicator_field(run: &ClosedRun) -> Outcome {
    let spec = SurfaceSpec::sphere();
    let inside = interior_queries(&spec, 100, 777).unwrap();
    let outside = exterior_queries(&spec, 100, 778).unwrap();
    let chi_in = layerquad::pipeline::indicator(&run.weights, &inside).unwrap();
    let chi_out = layerquad::pipeline::indicator(&run.weights, &outside).unwrap();
    let e_in = chi_in.iter().map(|c| (c - 1.0).abs()).fold(0.0, f64::max);
    let e_out = chi_out.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let _ = &run.sample;
    outcome(
        e_in < 0.05 && e_out < 0.05,
        format!("max interior err {e_in:.2e}, max exterior err {e_out:.2e}"),
    )
}

fn collar_hemisphere() -> Outcome {
    let sample = generate_fixture(&SurfaceSpec::hemisphere(), 2000, 1).unwrap();
    let r = solve(&sample, &SolveOptions::new(PipelineKind::Collar)).unwrap();
    let area = integrate(&sample, &r.weights, Integrand::Const1).unwrap().value;
    let eps = match r.weights.pipeline {
        layerquad::io::Pipeline::Collar { epsilon } => epsilon,
        _ => f64::NAN,
    };
    let rel = area / (2.0 * PI) - 1.0;
    outcome(
        rel.abs() <= 0.05,
        format!("eps {eps:.4}, half-sum area {area:.4} (rel err {rel:+.3e}), {} clamped", r.negative_weights),
    )
}

fn tube_circle() -> Outcome {
    let sample = generate_fixture(&SurfaceSpec::circle_r3(), 200, 1).unwrap();
    let mut opts = SolveOptions::new(PipelineKind::Tube);
    opts.directions = 16;
    opts.epsilon = Some(0.05);
    let r = solve(&sample, &opts).unwrap();
    let length = integrate(&sample, &r.weights, Integrand::Const1).unwrap().value;
    let rel = length / (2.0 * PI) - 1.0;
    outcome(rel.abs() <= 0.05, format!("length {length:.6} (rel err {rel:+.3e})"))
}

fn solver_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for case in 0..20 {
        let n = rng.random_range(5..=200);
        let m = n + rng.random_range(10..=n + 10);
        let lambda = if case % 2 == 0 { 0.0 } else { 1e-3 };
        let a = DenseMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        let b: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        // (A^T A + lambda^2 I) x = A^T b
        let mut ata = DenseMatrix::zeros(n, n);
        let mut atb = vec![0.0; n];
        for i in 0..n {
            let ci = a.column(i);
            atb[i] = ci.iter().zip(&b).map(|(u, v)| u * v).sum();
            for j in 0..n {
                ata[(i, j)] = ci.iter().zip(a.column(j)).map(|(u, v)| u * v).sum();
            }
            ata[(i, i)] += lambda * lambda;
        }
        let oracle = solve_dense(&ata, &atb).unwrap();
        let sys = IndicatorSystem::from_parts(a, b, Layout::ScalarUnknowns, n, 1).unwrap();
        let cfg = SolverConfig {
            regularization: Regularization::Absolute(lambda),
            negative_weight_policy: NegativeWeightPolicy::Keep,
        };
        let sol = solve_weights(&sys, &cfg, Some(&vec![1.0; n])).unwrap();
        let diff: f64 = sol.raw.iter().zip(&oracle).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
        let norm: f64 = oracle.iter().map(|v| v * v).sum::<f64>().sqrt();
        worst = worst.max(diff / norm);
    }
    outcome(worst < 1e-8, format!("max rel err {worst:.2e} over 20 systems"))
}

fn riemann_identity() -> Outcome {
    let (north, south) = ([0.0, 0.0, 1.0], [0.0, 0.0, -1.0]);
    let mut identity = 0.0f64;
    let mut jump = 0.0f64;
    for alpha in [PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
        let inside = continuous_cap_indicator(&north, alpha, 256).unwrap();
        let outside = continuous_cap_indicator(&south, alpha, 256).unwrap();
        let c = (alpha / 2.0).cos();
        identity = identity.max((inside - c * c).abs());
        jump = jump.max((inside - outside - 1.0).abs());
    }
    outcome(
        identity < 1e-6 && jump < 1e-8,
        format!("max identity err {identity:.2e}, max jump err {jump:.2e}"),
    )
}

fn riemann_discrete() -> Outcome {
    let sample = generate_fixture(&SurfaceSpec::s2_cap(PI / 3.0).unwrap(), 400, 1).unwrap();
    let r = solve(&sample, &SolveOptions::new(PipelineKind::S2Cap)).unwrap();
    let target = PI * 3f64.sqrt();
    let c = r.weights.offset.unwrap_or(f64::NAN);
    let pass = within(r.total, target, 0.05) && (c - 0.25).abs() <= 0.05;
    outcome(
        pass,
        format!("length rel err {:.2e}, offset {c:.4}", (r.total / target - 1.0).abs()),
    )
}

fn convergence_trend() -> Outcome {
    let config = StudyConfig {
        fixture: SurfaceSpec::sphere(),
        counts: vec![250, 500, 1000, 2000],
        eps_factors: vec![2.0],
        integrand: Integrand::Const1,
        options: SolveOptions::new(PipelineKind::Closed),
    };
    let rows = run_study(&config).unwrap();
    let steps = nonincreasing_steps(&rows);
    let last = rows.last().map_or(f64::NAN, |r| r.rel_err);
    let errs: Vec<String> = rows.iter().map(|r| format!("{:.1e}", r.rel_err)).collect();
    outcome(
        steps >= 2 && last < 0.02,
        format!("errors [{}], {steps}/3 nonincreasing", errs.join(", ")),
    )
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |id: usize, name: &str, limit: Duration, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let pass = o.pass && took < limit;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {id:>2} {}  {name}: {} [{:.2}s, limit {}s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    };
    let secs = Duration::from_secs;
    report(1, "kernel vs finite differences", secs(1), &mut kernel_finite_differences);
    report(2, "exact Gauss identity", secs(1), &mut exact_gauss_identity);
    let mut closed = None;
    report(3, "closed sphere weights", secs(30), &mut || {
        let (o, run) = closed_sphere();
        closed = Some(run);
        o
    });
    report(4, "vector unknowns", secs(60), &mut vector_unknowns);
    let closed = closed.expect("closed sphere run");
    report(5, "indicator field", secs(5), &mut || indicator_field(&closed));
    report(6, "hemisphere collar", secs(60), &mut collar_hemisphere);
    report(7, "circle tube", secs(60), &mut tube_circle);
    report(8, "solver vs normal equations", secs(5), &mut solver_oracle);
    report(9, "cap identity and jump", secs(1), &mut riemann_identity);
    report(10, "discrete cap on S^2", secs(30), &mut riemann_discrete);
    report(11, "convergence trend", secs(300), &mut convergence_trend);
    println!("{} of 11 criteria failed", failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
