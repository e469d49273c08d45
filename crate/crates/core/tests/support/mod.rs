#![allow(dead_code)]

use num_complex::Complex64;
use pergraph::catalog::{generate, CrystalFamily};
use pergraph::graph::PeriodicGraph;
use pergraph::linalg::FiberMatrix;
use rand::Rng;

pub fn build(f: CrystalFamily) -> PeriodicGraph {
    PeriodicGraph::new(&generate(f).unwrap()).unwrap()
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> FiberMatrix {
    let mut a = FiberMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = Complex64::new(rng.gen_range(-2.0..2.0), 0.0);
        for j in i + 1..n {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    a
}

pub fn random_theta(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    (0..d)
        .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
        .collect()
}

pub fn random_potential(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Number of eigenvalues of `a` below `x`: negative pivots of the LDL^H
/// factorisation of `a − x I` (signs of the leading principal minors).
pub fn count_below(a: &FiberMatrix, x: f64) -> usize {
    let n = a.order();
    let mut m: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| a[(i, j)] - if i == j { x } else { 0.0 })
                .collect()
        })
        .collect();
    let mut negative = 0;
    for k in 0..n {
        let mut pivot = m[k][k].re;
        if pivot == 0.0 {
            pivot = -f64::EPSILON * (1.0 + x.abs());
        }
        if pivot < 0.0 {
            negative += 1;
        }
        for i in k + 1..n {
            let l = m[i][k] / pivot;
            for j in k + 1..n {
                let u = m[k][j];
                m[i][j] -= l * u;
            }
        }
    }
    negative
}

/// Eigenvalues by bisection on the inertia count.
pub fn oracle_eigenvalues(a: &FiberMatrix) -> Vec<f64> {
    let n = a.order();
    let r = a.frobenius() + 1.0;
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-r, r);
            while hi - lo > 1e-13 * r {
                let mid = 0.5 * (lo + hi);
                if count_below(a, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
