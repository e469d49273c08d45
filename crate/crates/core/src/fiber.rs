//! Fiber operators of a periodic graph.
//!
//! For a quasimomentum `θ ∈ T^d` the fiber Laplacian is the `ν × ν` matrix
//!
//! ```text
//! Δ_uu(θ) = 1 − (1/κ_u) Σ_{loops e=(u,u)} cos⟨τ(e), θ⟩        (both orientations)
//! Δ_uv(θ) = −(1/√(κ_u κ_v)) Σ_{e=(u,v)} exp(−i⟨τ(e), θ⟩)     (u ≠ v)
//! ```
//!
//! and `H(θ) = Δ(θ) + diag(Q)`. Matrix entries follow the convention
//! `Δ_uv = ⟨φ_u, Δ φ_v⟩` with the inner product linear in its first slot, so
//! every phase-carrying identity below (factorization, quadratic forms) is
//! stated with the phase `exp(−i⟨τ, θ⟩)` that matches these entries.

use std::f64::consts::TAU;
use std::ops::Deref;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::graph::PeriodicGraph;
use crate::linalg::FiberMatrix;

/// A point of the torus `[0, 2π)^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quasimomentum(Vec<f64>);

impl Quasimomentum {
    /// Reduces every component into `[0, 2π)`.
    pub fn new(components: Vec<f64>) -> Self {
        Self(
            components
                .into_iter()
                .map(|x| {
                    let r = x.rem_euclid(TAU);
                    if r >= TAU {
                        0.0
                    } else {
                        r
                    }
                })
                .collect(),
        )
    }

    pub fn zero(d: usize) -> Self {
        Self(vec![0.0; d])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Quasimomentum {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

fn cis(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

/// Adds `−w e^{−iφ}` at `(u, v)` and its conjugate at `(v, u)`.
fn add_hopping(m: &mut FiberMatrix, u: usize, v: usize, w: f64, phi: f64) {
    let z = cis(-phi) * (-w);
    m[(u, v)] += z;
    m[(v, u)] += z.conj();
}

/// Hopping part `−D^{-1/2} A(θ) D^{-1/2}` restricted to the selected edges.
fn hopping(graph: &PeriodicGraph, theta: &[f64], keep: impl Fn(bool) -> bool) -> FiberMatrix {
    let n = graph.order();
    let mut m = FiberMatrix::zeros(n, n);
    for e in graph.edges().iter().filter(|e| keep(e.is_bridge())) {
        let phi = e.phase(theta);
        if e.is_loop() {
            let k = graph.degree(e.tail) as f64;
            m[(e.tail, e.tail)] -= Complex64::new(2.0 * phi.cos() / k, 0.0);
        } else {
            let w = 1.0 / ((graph.degree(e.tail) * graph.degree(e.head)) as f64).sqrt();
            add_hopping(&mut m, e.tail, e.head, w, phi);
        }
    }
    m
}

pub fn assemble_laplacian(graph: &PeriodicGraph, theta: &[f64]) -> Result<FiberMatrix> {
    graph.check_theta(theta)?;
    Ok(hopping(graph, theta, |_| true).shifted(1.0))
}

pub fn assemble_schrodinger(
    graph: &PeriodicGraph,
    q: &[f64],
    theta: &[f64],
) -> Result<FiberMatrix> {
    graph.check_potential(q)?;
    let mut m = assemble_laplacian(graph, theta)?;
    for (i, &x) in q.iter().enumerate() {
        m[(i, i)] += x;
    }
    Ok(m)
}

/// The factor `∇(θ)` with `∇(θ)^* ∇(θ) = Δ(θ)`.
///
/// One row per stored edge `e = (v, u)`: `e^{+i⟨τ,θ⟩/2}/√κ_v` in column `v`
/// and `−e^{−i⟨τ,θ⟩/2}/√κ_u` in column `u`; a loop row carries the sum of both
/// terms in its single column.
pub fn assemble_nabla(graph: &PeriodicGraph, theta: &[f64]) -> Result<FiberMatrix> {
    graph.check_theta(theta)?;
    let mut m = FiberMatrix::zeros(graph.edges().len(), graph.order());
    for (row, e) in graph.edges().iter().enumerate() {
        let half = 0.5 * e.phase(theta);
        let kv = (graph.degree(e.tail) as f64).sqrt();
        let ku = (graph.degree(e.head) as f64).sqrt();
        m[(row, e.tail)] += cis(half) / kv;
        m[(row, e.head)] -= cis(-half) / ku;
    }
    Ok(m)
}

/// `H(θ) = H₀ + h(θ)`, where `h(θ)` collects the bridge terms and `H₀` is
/// independent of `θ`.
#[derive(Debug, Clone)]
pub struct FiberSplit {
    pub constant: FiberMatrix,
    pub offset: FiberMatrix,
}

pub fn fiber_offset(graph: &PeriodicGraph, q: &[f64], theta: &[f64]) -> Result<FiberSplit> {
    graph.check_potential(q)?;
    graph.check_theta(theta)?;
    let offset = hopping(graph, theta, |bridge| bridge);
    let mut constant = hopping(graph, theta, |bridge| !bridge).shifted(1.0);
    for (i, &x) in q.iter().enumerate() {
        constant[(i, i)] += x;
    }
    Ok(FiberSplit { constant, offset })
}

/// `2 Tr B(0) = 2 Σ_{u,v} ζ_uv / √(κ_u κ_v)`.
pub fn trace_bound(graph: &PeriodicGraph) -> f64 {
    let counts = graph.bridge_counts();
    let k = graph.degrees();
    let mut s = 0.0;
    for (u, row) in counts.iter().enumerate() {
        for (v, &z) in row.iter().enumerate() {
            if z > 0 {
                s += z as f64 / ((k[u] * k[v]) as f64).sqrt();
            }
        }
    }
    2.0 * s
}

/// `½ Σ_{e=(v,u)} |f(v)/√κ_v − e^{−i⟨τ(e),θ⟩} f(u)/√κ_u|²` over all directed edges.
pub fn laplacian_form(graph: &PeriodicGraph, theta: &[f64], f: &[Complex64]) -> f64 {
    let k = graph.degrees();
    0.5 * graph
        .directed_edges()
        .map(|e| {
            let a = f[e.tail] / (k[e.tail] as f64).sqrt();
            let b = f[e.head] / (k[e.head] as f64).sqrt();
            (a - cis(-e.phase(theta)) * b).norm_sqr()
        })
        .sum::<f64>()
}

/// `½ Σ_{e=(v,u)} c_uv |f(v) − e^{−i⟨τ(e),θ⟩} f(u)|²` with
/// `c_uv = ψ(u)ψ(v)/√(κ_u κ_v)`.
pub fn weighted_form(graph: &PeriodicGraph, psi: &[f64], theta: &[f64], f: &[Complex64]) -> f64 {
    let k = graph.degrees();
    0.5 * graph
        .directed_edges()
        .map(|e| {
            let c = psi[e.tail] * psi[e.head] / ((k[e.tail] * k[e.head]) as f64).sqrt();
            c * (f[e.tail] - cis(-e.phase(theta)) * f[e.head]).norm_sqr()
        })
        .sum::<f64>()
}

/// Positive eigenvector of `H(0)` for its lowest eigenvalue.
#[derive(Debug, Clone, Serialize)]
pub struct Perron {
    pub value: f64,
    /// Unit-norm, componentwise positive.
    pub vector: Vec<f64>,
    /// `λ₂(0) − λ₁(0)`.
    pub spacing: f64,
}

pub fn perron(graph: &PeriodicGraph, q: &[f64]) -> Result<Perron> {
    use crate::error::Error;
    let h0 = assemble_schrodinger(graph, q, &vec![0.0; graph.dim()])?;
    let eig = h0.eigen()?;
    let spacing = eig
        .values
        .get(1)
        .map_or(f64::INFINITY, |l| l - eig.values[0]);
    if spacing <= 1e-8 {
        return Err(Error::DegenerateGroundState { spacing });
    }
    let x = eig.vector(0);
    let pivot = x
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("nonempty graph");
    let rot = pivot.conj() / pivot.norm();
    let vector: Vec<f64> = x.iter().map(|z| (z * rot).re).collect();
    let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
    let vector: Vec<f64> = vector.iter().map(|x| x / norm).collect();
    if let Some(&bad) = vector.iter().find(|&&x| x <= -1e-12) {
        return Err(Error::PerronSign { value: bad });
    }
    Ok(Perron {
        value: eig.values[0],
        vector,
        spacing,
    })
}
