use layerquad_core::collar::integrate_with_boundary;
use layerquad_core::geometry::{gen_fibonacci_sphere, OrientedSample};
use layerquad_core::kernel::{double_layer_row, KernelConfig};
use layerquad_core::linalg::{lstsq_tikhonov, DenseMatrix};
use layerquad_core::solver::{
    solve_weights, IndicatorSystem, Layout, NegativeWeightPolicy, Regularization, SolverConfig,
};
use layerquad_core::tube::{integrate_codim, sample_normal_sphere};
use proptest::prelude::*;

fn matrix_strategy(max_rows: usize, max_cols: usize) -> impl Strategy<Value = (DenseMatrix, Vec<f64>)> {
    (1..=max_cols)
        .prop_flat_map(move |n| (Just(n), n..=max_rows.max(n)))
        .prop_flat_map(|(n, m)| {
            (
                prop::collection::vec(-1.0f64..1.0, m * n),
                prop::collection::vec(-1.0f64..1.0, m),
                Just((m, n)),
            )
        })
        .prop_map(|(a, b, (m, n))| {
            // A diagonal boost keeps the tall systems comfortably full rank.
            let mut mat = DenseMatrix::from_row_major(m, n, &a).unwrap();
            for i in 0..n {
                mat[(i, i)] += 4.0;
            }
            (mat, b)
        })
}

fn scalar_system(a: DenseMatrix, b: Vec<f64>) -> (IndicatorSystem, Vec<f64>) {
    let n = a.cols();
    let sys = IndicatorSystem::from_parts(a, b, Layout::ScalarUnknowns, n, 1).unwrap();
    (sys, vec![1.0; n])
}

fn point3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn least_squares_scales_with_rhs((a, b) in matrix_strategy(30, 12), s in 0.1f64..10.0) {
        let x = lstsq_tikhonov(&a, &b, 0.0).unwrap().x;
        let sb: Vec<f64> = b.iter().map(|v| v * s).collect();
        let sx = lstsq_tikhonov(&a, &sb, 0.0).unwrap().x;
        for (u, v) in x.iter().zip(&sx) {
            prop_assert!((u * s - v).abs() <= 1e-9 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn residual_nondecreasing_in_lambda((a, b) in matrix_strategy(30, 12)) {
        let mut last = 0.0f64;
        for lambda in [0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0] {
            let r = lstsq_tikhonov(&a, &b, lambda).unwrap().residual_norm;
            prop_assert!(r >= last - 1e-12 * (1.0 + last));
            last = r;
        }
    }

    #[test]
    fn clamped_weights_are_nonnegative((a, b) in matrix_strategy(20, 10)) {
        let (sys, normals) = scalar_system(a, b);
        let cfg = SolverConfig {
            regularization: Regularization::Absolute(1e-3),
            negative_weight_policy: NegativeWeightPolicy::ClampToZero,
        };
        let sol = solve_weights(&sys, &cfg, Some(&normals)).unwrap();
        prop_assert!(sol.tau.iter().all(|&t| t >= 0.0));
        let negatives = sol.raw.iter().filter(|&&w| w < 0.0).count();
        prop_assert_eq!(negatives, sol.diagnostics.negative_weights);
    }

    #[test]
    fn kernel_antisymmetric(x in point3(), y in point3()) {
        prop_assume!(x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() > 1e-4);
        let k = KernelConfig::exact(3).unwrap();
        let a = double_layer_row(&x, &y, &k).unwrap();
        let b = double_layer_row(&y, &x, &k).unwrap();
        for i in 0..3 {
            prop_assert!((a[i] + b[i]).abs() <= 1e-12 * (1.0 + a[i].abs()));
        }
    }

    #[test]
    fn kernel_homogeneous(x in point3(), y in point3(), s in 0.1f64..10.0) {
        prop_assume!(x.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() > 1e-4);
        let k = KernelConfig::exact(3).unwrap();
        let sx: Vec<f64> = x.iter().map(|v| v * s).collect();
        let sy: Vec<f64> = y.iter().map(|v| v * s).collect();
        let a = double_layer_row(&sx, &sy, &k).unwrap();
        let b = double_layer_row(&x, &y, &k).unwrap();
        for i in 0..3 {
            prop_assert!((a[i] - b[i] / (s * s)).abs() <= 1e-12 * (1.0 + a[i].abs()));
        }
    }

    #[test]
    fn collar_sum_symmetric(
        v in prop::collection::vec((-1.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 1..50)
    ) {
        let f: Vec<f64> = v.iter().map(|t| t.0).collect();
        let a: Vec<f64> = v.iter().map(|t| t.1).collect();
        let b: Vec<f64> = v.iter().map(|t| t.2).collect();
        let x = integrate_with_boundary(&f, &a, &b).unwrap();
        let y = integrate_with_boundary(&f, &b, &a).unwrap();
        prop_assert!((x - y).abs() <= 1e-14 * (1.0 + x.abs()));
    }

    #[test]
    fn tube_sum_invariant_under_direction_relabeling(
        p in 1usize..10,
        shift in 0usize..8,
        seed_vals in prop::collection::vec(0.0f64..1.0, 80),
    ) {
        let q = 8;
        let dirs = sample_normal_sphere(2, q, 0.1).unwrap();
        let f: Vec<f64> = (0..p).map(|j| 1.0 + j as f64).collect();
        let tau: Vec<f64> = (0..p * q).map(|k| seed_vals[k % seed_vals.len()]).collect();
        let rotated: Vec<f64> = tau
            .chunks_exact(q)
            .flat_map(|s| (0..q).map(move |i| s[(i + shift) % q]))
            .collect();
        let a = integrate_codim(&f, &tau, &dirs).unwrap();
        let b = integrate_codim(&f, &rotated, &dirs).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}

#[test]
fn exact_weights_round_trip_through_integration() {
    let s: OrientedSample = gen_fibonacci_sphere(200).unwrap();
    let tau = vec![4.0 * std::f64::consts::PI / 200.0; 200];
    let sol = layerquad_core::solver::WeightSolution::from_tau(&s, tau).unwrap();
    let ones = vec![1.0; 200];
    let total = layerquad_core::solver::integrate_function(&ones, &sol).unwrap();
    assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-12);
}
