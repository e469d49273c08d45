mod support;

use std::f64::consts::TAU;

use num_complex::Complex64;
use pergraph::catalog::{generate, standard_families};
use pergraph::fiber::{assemble_laplacian, assemble_schrodinger};
use pergraph::io::{emit_graph, parse_graph};
use pergraph::linalg::FiberMatrix;
use proptest::prelude::*;
use support::*;

fn family() -> impl Strategy<Value = usize> {
    0..standard_families().len()
}

fn angles() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..TAU, 3)
}

fn hermitian() -> impl Strategy<Value = FiberMatrix> {
    (1usize..=8).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, 2 * n * n).prop_map(move |xs| {
            let mut a = FiberMatrix::zeros(n, n);
            for i in 0..n {
                a[(i, i)] = Complex64::new(xs[2 * (i * n + i)], 0.0);
                for j in i + 1..n {
                    let z = Complex64::new(xs[2 * (i * n + j)], xs[2 * (i * n + j) + 1]);
                    a[(i, j)] = z;
                    a[(j, i)] = z.conj();
                }
            }
            a
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn laplacian_spectrum_in_unit_range(k in family(), theta in angles()) {
        let g = build(standard_families()[k]);
        let theta = &theta[..g.dim()];
        let m = assemble_laplacian(&g, theta).unwrap();
        prop_assert_eq!(m.hermitian_deviation(), 0.0);
        let ev = m.eigenvalues().unwrap();
        prop_assert!(ev[0] >= -1e-10 && ev[ev.len() - 1] <= 2.0 + 1e-10);
    }

    #[test]
    fn reflected_quasimomentum_gives_same_spectrum(k in family(), theta in angles()) {
        let g = build(standard_families()[k]);
        let theta = &theta[..g.dim()];
        let neg: Vec<f64> = theta.iter().map(|t| -t).collect();
        let a = assemble_laplacian(&g, theta).unwrap().eigenvalues().unwrap();
        let b = assemble_laplacian(&g, &neg).unwrap().eigenvalues().unwrap();
        prop_assert!(max_diff(&a, &b) < 1e-12);
    }

    #[test]
    fn constant_potential_shifts_spectrum(k in family(), theta in angles(), c in -2.0f64..2.0) {
        let g = build(standard_families()[k]);
        let theta = &theta[..g.dim()];
        let a = assemble_laplacian(&g, theta).unwrap().eigenvalues().unwrap();
        let b = assemble_schrodinger(&g, &vec![c; g.order()], theta).unwrap().eigenvalues().unwrap();
        let shifted: Vec<f64> = a.iter().map(|x| x + c).collect();
        prop_assert!(max_diff(&b, &shifted) < 1e-10);
    }

    #[test]
    fn periodic_in_each_angle(k in family(), theta in angles(), j in 0usize..3) {
        let g = build(standard_families()[k]);
        let theta = theta[..g.dim()].to_vec();
        let mut moved = theta.clone();
        let j = j % g.dim();
        moved[j] += TAU;
        let a = assemble_laplacian(&g, &theta).unwrap().eigenvalues().unwrap();
        let b = assemble_laplacian(&g, &moved).unwrap().eigenvalues().unwrap();
        prop_assert!(max_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn jacobi_matches_oracle(a in hermitian()) {
        let values = a.eigenvalues().unwrap();
        prop_assert!(max_diff(&values, &oracle_eigenvalues(&a)) < 1e-8);
        let trace: f64 = values.iter().sum();
        prop_assert!((trace - a.trace().re).abs() < 1e-10);
    }

    #[test]
    fn leading_minor_interlaces(a in hermitian()) {
        let n = a.order();
        prop_assume!(n > 1);
        let values = a.eigenvalues().unwrap();
        let minor = a.leading(n - 1).eigenvalues().unwrap();
        for k in 0..n - 1 {
            prop_assert!(values[k] <= minor[k] + 1e-10 && minor[k] <= values[k + 1] + 1e-10);
        }
    }

    #[test]
    fn graph_file_round_trip(k in family()) {
        let g = generate(standard_families()[k]).unwrap();
        prop_assert_eq!(parse_graph(&emit_graph(&g)).unwrap(), g);
    }
}
