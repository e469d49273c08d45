mod support;

use std::f64::consts::PI;

use num_complex::Complex64;
use pergraph::band::{compute_bands, gaps, spectrum_union, BzGrid, FLAT_TOL};
use pergraph::catalog::CrystalFamily;
use pergraph::estimates::{check_bipartite, check_gap_sum, check_measure_bound, report};
use pergraph::fiber::{assemble_laplacian, assemble_schrodinger};
use pergraph::linalg::jacobi;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use support::*;

fn bcc_closed_form(q1: f64, theta: &[f64]) -> [f64; 2] {
    let c: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
    let c0: f64 = c.iter().sum();
    let prod: f64 = c.iter().map(|x| 1.0 + x).product();
    let mid = 1.0 - c0 / 14.0 + q1 / 2.0;
    let r = 0.5 * ((c0 / 7.0 + q1).powi(2) + 2.0 / 7.0 * prod).sqrt();
    [mid - r, mid + r]
}

#[test]
fn bcc_fibers_match_closed_form() {
    let g = build(CrystalFamily::Bcc);
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..200 {
        let theta = random_theta(&mut rng, 3);
        let q1 = rng.gen_range(-1.0..1.0);
        let got = assemble_schrodinger(&g, &[q1, 0.0], &theta)
            .unwrap()
            .eigenvalues()
            .unwrap();
        assert!(max_diff(&got, &bcc_closed_form(q1, &theta)) < 1e-12);
    }
}

#[test]
fn bcc_coupling_entry() {
    let g = build(CrystalFamily::Bcc);
    let theta = [0.4, -1.1, 2.3];
    let m = assemble_laplacian(&g, &theta).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let expected = -theta
        .iter()
        .map(|t| one + Complex64::from_polar(1.0, -t))
        .product::<Complex64>()
        / (4.0 * 7f64.sqrt());
    assert!((m[(0, 1)] - expected).norm() < 1e-14);
}

#[test]
fn bcc_gap_above_three_sevenths() {
    let g = build(CrystalFamily::Bcc);
    let b = compute_bands(&g, &[1.0, 0.0], &BzGrid::new(3, 16).unwrap(), FLAT_TOL).unwrap();
    let gs = gaps(&b);
    assert_eq!(gs.len(), 1);
    assert!((gs[0].lower - 10.0 / 7.0).abs() < 1e-9);
    assert!((gs[0].upper - 2.0).abs() < 1e-9);
    let s = check_gap_sum(&g, &[1.0, 0.0], &BzGrid::new(3, 16).unwrap()).unwrap();
    assert!((s.gap_sum - 4.0 / 7.0).abs() < 1e-9);
    assert!(s.holds);
}

#[test]
fn bcc_measure_chain() {
    let g = build(CrystalFamily::Bcc);
    let m = check_measure_bound(&g, &[0.0, 0.0], &BzGrid::new(3, 16).unwrap()).unwrap();
    assert!((m.measure - 11.0 / 7.0).abs() < 1e-9);
    assert!((m.zeta_bound - 101.0 / 28.0).abs() < 1e-12);
    assert!(m.holds && !m.equality);
}

#[test]
fn fcc_fibers_match_characteristic_polynomial() {
    let g = build(CrystalFamily::Fcc);
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..200 {
        let theta = random_theta(&mut rng, 3);
        let c: Vec<f64> = theta.iter().map(|t| t.cos()).collect();
        let c0: f64 = c.iter().sum();
        let e = c[0] * c[1] + c[0] * c[2] + c[1] * c[2];
        let r = 0.5 * ((c0 / 9.0).powi(2) + 4.0 * c0 / 9.0 + 2.0 / 3.0 + 2.0 * e / 9.0).sqrt();
        let expected = [1.0 - c0 / 18.0 - r, 1.0, 1.0, 1.0 - c0 / 18.0 + r];
        let got = assemble_laplacian(&g, &theta)
            .unwrap()
            .eigenvalues()
            .unwrap();
        assert!(max_diff(&got, &expected) < 1e-12);
    }
}

#[test]
fn fcc_top_band_endpoints() {
    let g = build(CrystalFamily::Fcc);
    let top = |theta: [f64; 3]| {
        assemble_laplacian(&g, &theta)
            .unwrap()
            .eigenvalues()
            .unwrap()[3]
    };
    assert!((top([0.0; 3]) - 5.0 / 3.0).abs() < 1e-12);
    assert!((top([PI; 3]) - 4.0 / 3.0).abs() < 1e-12);
    assert!((top([PI, PI, 0.0]) - 10.0 / 9.0).abs() < 1e-12);
}

#[test]
fn fcc_generic_potential_has_no_flat_band() {
    let g = build(CrystalFamily::Fcc);
    let b = compute_bands(
        &g,
        &[0.1, 0.4, -0.3, 0.0],
        &BzGrid::new(3, 8).unwrap(),
        FLAT_TOL,
    )
    .unwrap();
    assert!(b.flat_bands.is_empty());
}

#[test]
fn star_bands() {
    for (d, nu) in [(1, 2), (2, 3), (2, 6), (3, 4)] {
        let g = build(CrystalFamily::StarDecorated { d, nu });
        let xi = (nu - 1 + 2 * d) as f64;
        let b = compute_bands(&g, &vec![0.0; nu], &BzGrid::new(d, 8).unwrap(), FLAT_TOL).unwrap();
        assert!(b.bands[0].lower.abs() < 1e-10);
        assert!((b.bands[0].upper - 2.0 * d as f64 / xi).abs() < 1e-10);
        assert!((b.bands[nu - 1].lower - (2.0 - 2.0 * d as f64 / xi)).abs() < 1e-10);
        assert!((b.bands[nu - 1].upper - 2.0).abs() < 1e-10);
        assert_eq!(b.flat_multiplicity_at(1.0), nu - 2);
    }
}

#[test]
fn star_repeated_potential_gives_flat_band() {
    let g = build(CrystalFamily::StarDecorated { d: 2, nu: 5 });
    let q = [0.2, 0.2, 0.2, -0.5, 0.0];
    let b = compute_bands(&g, &q, &BzGrid::new(2, 8).unwrap(), FLAT_TOL).unwrap();
    assert_eq!(b.flat_multiplicity_at(1.2), 2);
    let distinct = [0.1, 0.2, 0.3, 0.4, 0.0];
    let b = compute_bands(&g, &distinct, &BzGrid::new(2, 8).unwrap(), FLAT_TOL).unwrap();
    assert!(b.flat_bands.is_empty());
}

#[test]
fn subdivided_single_midpoint_coupling() {
    let g = build(CrystalFamily::Subdivided { d: 2, n: 1 });
    let theta = [0.7, 2.9];
    let m = assemble_laplacian(&g, &theta).unwrap();
    for j in 0..2 {
        let expected = -(Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, -theta[j]))
            / (2.0 * 2f64.sqrt());
        assert!(
            (m[(j, 2)] - expected).norm() < 1e-14,
            "{} vs {expected}",
            m[(j, 2)]
        );
    }
}

#[test]
fn bipartite_statements_on_subdivided() {
    for (d, n) in [(2, 1), (2, 2), (3, 1)] {
        let g = build(CrystalFamily::Subdivided { d, n });
        let c = check_bipartite(&g, &BzGrid::new(d, 8).unwrap()).unwrap();
        if n % 2 == 1 {
            assert!(c.fundamental_parts.is_some());
            assert!(c.symmetry_deviation.unwrap() < 1e-12);
        }
        assert!(c.periodic_bipartite);
        assert!(c.holds, "{c:?}");
    }
}

#[test]
fn spectrum_union_of_lattice() {
    let g = build(CrystalFamily::Lattice { d: 2 });
    let b = compute_bands(&g, &[0.0], &BzGrid::new(2, 8).unwrap(), FLAT_TOL).unwrap();
    let u = spectrum_union(&b);
    assert_eq!(u.components.len(), 1);
    assert!((u.measure - 2.0).abs() < 1e-12);
}

#[test]
fn report_on_catalog_passes() {
    for f in pergraph::catalog::standard_families() {
        let g = build(f);
        let r = report(&g, &vec![0.0; g.order()], &BzGrid::new(g.dim(), 4).unwrap()).unwrap();
        assert!(r.passed(), "{f:?}: {:?}", r.verdicts);
    }
}

#[test]
fn jacobi_agrees_with_inertia_oracle() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..100 {
        let n = rng.gen_range(1..=8);
        let a = random_hermitian(&mut rng, n);
        let values = jacobi(&a, false).unwrap().values;
        assert!(max_diff(&values, &oracle_eigenvalues(&a)) < 1e-8);
    }
}

#[test]
fn eigenvectors_reconstruct_matrix() {
    let mut rng = StdRng::seed_from_u64(4);
    for _ in 0..50 {
        let n = rng.gen_range(1..=8);
        let a = random_hermitian(&mut rng, n);
        let e = jacobi(&a, true).unwrap();
        for k in 0..n {
            let v = e.vector(k);
            let av = a.mul_vec(&v);
            let err = av
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - y * e.values[k]).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-10);
        }
    }
}
