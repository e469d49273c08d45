//! Band structure over a uniform Brillouin-zone grid.
//!
//! The `n`-th band is the range of the `n`-th smallest eigenvalue of `H(θ)`
//! over the grid. Grid evaluation runs in parallel, but results are collected
//! in grid order and reduced sequentially, so endpoints are bit-identical for
//! any number of worker threads.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fiber::{assemble_schrodinger, Quasimomentum};
use crate::graph::PeriodicGraph;
use crate::linalg::{invert_real, symmetric_eigenvalues};

pub const FLAT_TOL: f64 = 1e-8;
pub const DEFAULT_GRID: usize = 16;
pub const DEFAULT_STEP: f64 = 1e-3;
const MAX_CONDITION: f64 = 1e12;

/// `K^d` points `θ_k = 2π k / K`, `K` even so both `0` and `π` are sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BzGrid {
    pub dim: usize,
    pub per_axis: usize,
}

impl BzGrid {
    pub fn new(dim: usize, per_axis: usize) -> Result<Self> {
        if per_axis < 2 || !per_axis.is_multiple_of(2) {
            return Err(Error::OddGrid(per_axis));
        }
        Ok(Self { dim, per_axis })
    }

    pub fn len(&self) -> usize {
        self.per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point number `k`, last axis fastest.
    pub fn point(&self, mut k: usize) -> Quasimomentum {
        let mut theta = vec![0.0; self.dim];
        for j in (0..self.dim).rev() {
            let step = k % self.per_axis;
            k /= self.per_axis;
            theta[j] = PI * (2 * step) as f64 / self.per_axis as f64;
        }
        Quasimomentum::new(theta)
    }

    pub fn points(&self) -> impl Iterator<Item = Quasimomentum> + '_ {
        (0..self.len()).map(|k| self.point(k))
    }
}

/// Sorted eigenvalues of `H(θ)` at every grid point, in grid order.
pub fn sample_grid(graph: &PeriodicGraph, q: &[f64], grid: &BzGrid) -> Result<Vec<Vec<f64>>> {
    graph.check_potential(q)?;
    if grid.dim != graph.dim() {
        return Err(Error::DimensionMismatch {
            expected: graph.dim(),
            got: grid.dim,
        });
    }
    (0..grid.len())
        .into_par_iter()
        .map(|k| assemble_schrodinger(graph, q, &grid.point(k))?.eigenvalues())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
    pub flat: bool,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatBand {
    pub value: f64,
    pub multiplicity: usize,
    /// Zero-based band numbers in this group.
    pub bands: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandStructure {
    pub bands: Vec<Band>,
    pub flat_bands: Vec<FlatBand>,
    pub grid: BzGrid,
    pub flat_tol: f64,
}

impl BandStructure {
    /// Builds bands from per-point sorted spectra (reduced in the given order).
    pub fn from_samples(samples: &[Vec<f64>], grid: BzGrid, flat_tol: f64) -> Self {
        let n = samples.first().map_or(0, Vec::len);
        let mut lower = vec![f64::INFINITY; n];
        let mut upper = vec![f64::NEG_INFINITY; n];
        for s in samples {
            for (i, &x) in s.iter().enumerate() {
                lower[i] = lower[i].min(x);
                upper[i] = upper[i].max(x);
            }
        }
        let bands: Vec<Band> = lower
            .into_iter()
            .zip(upper)
            .map(|(lower, upper)| Band {
                lower,
                upper,
                flat: upper - lower < flat_tol,
            })
            .collect();

        let mut flat_bands: Vec<FlatBand> = Vec::new();
        for (i, b) in bands.iter().enumerate().filter(|(_, b)| b.flat) {
            let mid = 0.5 * (b.lower + b.upper);
            match flat_bands.last_mut() {
                Some(group) if (mid - group.value).abs() < flat_tol => {
                    group.bands.push(i);
                    group.multiplicity += 1;
                }
                _ => flat_bands.push(FlatBand {
                    value: mid,
                    multiplicity: 1,
                    bands: vec![i],
                }),
            }
        }
        for group in &mut flat_bands {
            group.value = group
                .bands
                .iter()
                .map(|&i| 0.5 * (bands[i].lower + bands[i].upper))
                .sum::<f64>()
                / group.bands.len() as f64;
        }
        Self {
            bands,
            flat_bands,
            grid,
            flat_tol,
        }
    }

    pub fn band_length_sum(&self) -> f64 {
        self.bands.iter().map(Band::width).sum()
    }

    /// `λ₁⁻`, the bottom of the spectrum.
    pub fn bottom(&self) -> f64 {
        self.bands.first().map_or(0.0, |b| b.lower)
    }

    /// `λ_ν⁺`, the top of the spectrum.
    pub fn top(&self) -> f64 {
        self.bands.last().map_or(0.0, |b| b.upper)
    }

    pub fn flat_multiplicity_at(&self, value: f64) -> usize {
        self.flat_bands
            .iter()
            .filter(|f| (f.value - value).abs() < self.flat_tol)
            .map(|f| f.multiplicity)
            .sum()
    }
}

pub fn compute_bands(
    graph: &PeriodicGraph,
    q: &[f64],
    grid: &BzGrid,
    flat_tol: f64,
) -> Result<BandStructure> {
    let samples = sample_grid(graph, q, grid)?;
    Ok(BandStructure::from_samples(&samples, *grid, flat_tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lower - tol && x <= self.upper + tol
    }
}

/// Merges closed intervals; neighbours closer than `touch` are joined.
pub fn merge_intervals(mut intervals: Vec<Interval>, touch: f64) -> Vec<Interval> {
    intervals.sort_by(|a, b| a.lower.total_cmp(&b.lower));
    let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
    for iv in intervals {
        match merged.last_mut() {
            Some(last) if iv.lower <= last.upper + touch => last.upper = last.upper.max(iv.upper),
            _ => merged.push(iv),
        }
    }
    merged
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumUnion {
    /// Components of the union of non-flat bands.
    pub components: Vec<Interval>,
    /// Flat-band values outside every component.
    pub isolated: Vec<f64>,
    /// Lebesgue measure of the spectrum.
    pub measure: f64,
}

pub fn spectrum_union(bands: &BandStructure) -> SpectrumUnion {
    let components = merge_intervals(
        bands
            .bands
            .iter()
            .filter(|b| !b.flat)
            .map(|b| Interval {
                lower: b.lower,
                upper: b.upper,
            })
            .collect(),
        bands.flat_tol,
    );
    let isolated = bands
        .flat_bands
        .iter()
        .map(|f| f.value)
        .filter(|&x| !components.iter().any(|c| c.contains(x, bands.flat_tol)))
        .collect();
    let measure = components.iter().map(Interval::length).sum();
    SpectrumUnion {
        components,
        isolated,
        measure,
    }
}

/// Open gaps between consecutive components of the non-flat union.
pub fn gaps(bands: &BandStructure) -> Vec<Interval> {
    spectrum_union(bands)
        .components
        .windows(2)
        .map(|w| Interval {
            lower: w[0].upper,
            upper: w[1].lower,
        })
        .collect()
}

/// Hessian `M` of the lowest band at `θ = 0` and its inverse `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveMass {
    pub hessian: Vec<Vec<f64>>,
    pub mass: Vec<Vec<f64>>,
    pub condition: f64,
}

fn lowest(graph: &PeriodicGraph, q: &[f64], theta: &[f64]) -> Result<f64> {
    Ok(assemble_schrodinger(graph, q, theta)?.eigenvalues()?[0])
}

fn hessian_at_step(graph: &PeriodicGraph, q: &[f64], f0: f64, h: f64) -> Result<Vec<Vec<f64>>> {
    let d = graph.dim();
    let at = |steps: &[(usize, f64)]| -> Result<f64> {
        let mut theta = vec![0.0; d];
        for &(j, s) in steps {
            theta[j] += s;
        }
        lowest(graph, q, &theta)
    };
    let mut m = vec![vec![0.0; d]; d];
    for i in 0..d {
        m[i][i] = (at(&[(i, h)])? - 2.0 * f0 + at(&[(i, -h)])?) / (h * h);
        for j in 0..i {
            let pp = at(&[(i, h), (j, h)])?;
            let pm = at(&[(i, h), (j, -h)])?;
            let mp = at(&[(i, -h), (j, h)])?;
            let mm = at(&[(i, -h), (j, -h)])?;
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

/// Central differences at steps `h` and `h/2`, combined by one Richardson step.
pub fn effective_mass(graph: &PeriodicGraph, q: &[f64], step: f64) -> Result<EffectiveMass> {
    graph.check_potential(q)?;
    let spectrum = assemble_schrodinger(graph, q, &vec![0.0; graph.dim()])?.eigenvalues()?;
    if let Some(second) = spectrum.get(1) {
        let spacing = second - spectrum[0];
        if spacing <= 1e-8 {
            return Err(Error::DegenerateGroundState { spacing });
        }
    }
    let f0 = spectrum[0];
    let coarse = hessian_at_step(graph, q, f0, step)?;
    let fine = hessian_at_step(graph, q, f0, 0.5 * step)?;
    let d = graph.dim();
    let mut hessian = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            hessian[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
        }
    }
    for i in 0..d {
        for j in 0..i {
            let s = 0.5 * (hessian[i][j] + hessian[j][i]);
            hessian[i][j] = s;
            hessian[j][i] = s;
        }
    }
    let eig = symmetric_eigenvalues(&hessian)?;
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), x| {
        (lo.min(x.abs()), hi.max(x.abs()))
    });
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::SingularMass { condition });
    }
    let mass = invert_real(&hessian).ok_or(Error::SingularMass { condition })?;
    Ok(EffectiveMass {
        hessian,
        mass,
        condition,
    })
}

/// Eigenvalues along the straight segment `from → to`, `steps + 1` samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSample {
    pub t: f64,
    pub theta: Vec<f64>,
    pub eigenvalues: Vec<f64>,
}

pub fn sample_path(
    graph: &PeriodicGraph,
    q: &[f64],
    from: &[f64],
    to: &[f64],
    steps: usize,
) -> Result<Vec<PathSample>> {
    graph.check_theta(from)?;
    graph.check_theta(to)?;
    let steps = steps.max(1);
    (0..=steps)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 / steps as f64;
            let theta: Vec<f64> = from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect();
            let eigenvalues = assemble_schrodinger(graph, q, &theta)?.eigenvalues()?;
            Ok(PathSample {
                t,
                theta,
                eigenvalues,
            })
        })
        .collect()
}
