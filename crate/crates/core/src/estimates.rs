//! Executable checks of the spectral estimates for `H = Δ + Q`.
//!
//! Each checker recomputes what it needs on a [`BzGrid`] and returns the raw
//! numbers together with a verdict, so every verdict can be recomputed from
//! the stored values. Inequalities are tested with additive slack [`SLACK`].
//! On the catalog graphs band extrema sit at `0` and `(π, …, π)`, both of
//! which lie on every even grid, so the grid values are exact there.

use num_complex::Complex64;
use serde::Serialize;

use crate::band::{
    compute_bands, effective_mass, gaps, sample_grid, spectrum_union, BandStructure, BzGrid,
    EffectiveMass, Interval, SpectrumUnion, DEFAULT_STEP, FLAT_TOL,
};
use crate::error::Result;
use crate::fiber::{
    assemble_laplacian, assemble_nabla, assemble_schrodinger, laplacian_form, perron, trace_bound,
    weighted_form,
};
use crate::graph::{PeriodicGraph, Warning};
use crate::linalg::symmetric_eigenvalues;

pub const SLACK: f64 = 1e-9;
const MASS_SLACK: f64 = 1e-6;

fn zero_potential(graph: &PeriodicGraph) -> Vec<f64> {
    vec![0.0; graph.order()]
}

fn gap_sum(gaps: &[Interval]) -> f64 {
    gaps.iter().map(Interval::length).sum()
}

/// `|σ(H)| ≤ Σ|σ_n| ≤ 2 Tr B(0) ≤ 2ζ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureBound {
    pub measure: f64,
    pub band_length_sum: f64,
    pub trace_bound: f64,
    pub zeta_bound: f64,
    /// `|σ(H)| = 2ζ` within slack.
    pub equality: bool,
    pub holds: bool,
}

impl MeasureBound {
    pub fn from_bands(graph: &PeriodicGraph, bands: &BandStructure) -> Self {
        let measure = spectrum_union(bands).measure;
        let band_length_sum = bands.band_length_sum();
        let trace_bound = trace_bound(graph);
        let zeta_bound = 2.0 * graph.zeta().value;
        Self {
            measure,
            band_length_sum,
            trace_bound,
            zeta_bound,
            equality: (measure - zeta_bound).abs() <= SLACK,
            holds: measure <= band_length_sum + SLACK
                && band_length_sum <= trace_bound + SLACK
                && trace_bound <= zeta_bound + SLACK,
        }
    }
}

pub fn check_measure_bound(
    graph: &PeriodicGraph,
    q: &[f64],
    grid: &BzGrid,
) -> Result<MeasureBound> {
    let bands = compute_bands(graph, q, grid, FLAT_TOL)?;
    Ok(MeasureBound::from_bands(graph, &bands))
}

/// `Σ|γ_n| ≥ λ_ν⁺ − λ₁⁻ − 2ζ` and `λ_ν⁺ − λ₁⁻ ≥ C₀ = |λ_ν^{0+} − q•|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSum {
    pub gap_sum: f64,
    pub span: f64,
    pub zeta_lower: f64,
    pub laplacian_top: f64,
    pub potential_spread: f64,
    pub c0_lower: f64,
    /// First inequality is an equality within slack.
    pub equality: bool,
    pub holds: bool,
}

impl GapSum {
    pub fn from_bands(
        graph: &PeriodicGraph,
        q: &[f64],
        bands: &BandStructure,
        laplacian: &BandStructure,
    ) -> Self {
        let gap_sum = gap_sum(&gaps(bands));
        let span = bands.top() - bands.bottom();
        let zeta_lower = span - 2.0 * graph.zeta().value;
        let laplacian_top = laplacian.top();
        let max_q = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_q = q.iter().copied().fold(f64::INFINITY, f64::min);
        let potential_spread = max_q - min_q;
        let c0_lower = (laplacian_top - potential_spread).abs();
        Self {
            gap_sum,
            span,
            zeta_lower,
            laplacian_top,
            potential_spread,
            c0_lower,
            equality: (gap_sum - zeta_lower).abs() <= SLACK,
            holds: gap_sum >= zeta_lower - SLACK && span >= c0_lower - SLACK,
        }
    }
}

pub fn check_gap_sum(graph: &PeriodicGraph, q: &[f64], grid: &BzGrid) -> Result<GapSum> {
    let bands = compute_bands(graph, q, grid, FLAT_TOL)?;
    let laplacian = compute_bands(graph, &zero_potential(graph), grid, FLAT_TOL)?;
    Ok(GapSum::from_bands(graph, q, &bands, &laplacian))
}

/// `ψ± = max/min ψ(v)/√κ_v` and `c₀ = ψ₊/ψ₋` for the Perron vector `ψ` of `H(0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronRatio {
    pub psi: Vec<f64>,
    pub psi_min: f64,
    pub psi_max: f64,
    pub c0: f64,
}

pub fn perron_ratio(graph: &PeriodicGraph, q: &[f64]) -> Result<PerronRatio> {
    let p = perron(graph, q)?;
    let scaled: Vec<f64> = p
        .vector
        .iter()
        .zip(graph.degrees())
        .map(|(x, &k)| x / (k as f64).sqrt())
        .collect();
    let psi_min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let psi_max = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(PerronRatio {
        psi: p.vector,
        psi_min,
        psi_max,
        c0: psi_max / psi_min,
    })
}

/// `c₀⁻² |σ₁(Δ)| ≤ |σ₁(H)| ≤ c₀² |σ₁(Δ)|` and `|σ₁(H)| > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstBand {
    pub c0: f64,
    pub laplacian_width: f64,
    pub width: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

impl FirstBand {
    pub fn from_bands(c0: f64, bands: &BandStructure, laplacian: &BandStructure) -> Self {
        let width = bands.bands[0].width();
        let laplacian_width = laplacian.bands[0].width();
        let lower = laplacian_width / (c0 * c0);
        let upper = laplacian_width * c0 * c0;
        Self {
            c0,
            laplacian_width,
            width,
            lower,
            upper,
            holds: lower <= width + SLACK && width <= upper + SLACK && width > SLACK,
        }
    }
}

pub fn check_first_band(graph: &PeriodicGraph, q: &[f64], grid: &BzGrid) -> Result<FirstBand> {
    let ratio = perron_ratio(graph, q)?;
    let bands = compute_bands(graph, q, grid, FLAT_TOL)?;
    let laplacian = compute_bands(graph, &zero_potential(graph), grid, FLAT_TOL)?;
    Ok(FirstBand::from_bands(ratio.c0, &bands, &laplacian))
}

/// `c₀⁻² m₀ ≤ m ≤ c₀² m₀` in the order of symmetric matrices.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MassBound {
    Checked {
        c0: f64,
        mass: Vec<Vec<f64>>,
        laplacian_mass: Vec<Vec<f64>>,
        /// Smallest eigenvalue of `c₀² m₀ − m`.
        upper_margin: f64,
        /// Smallest eigenvalue of `m − c₀⁻² m₀`.
        lower_margin: f64,
        holds: bool,
    },
    Skipped {
        reason: String,
    },
}

impl MassBound {
    pub fn holds(&self) -> Option<bool> {
        match self {
            MassBound::Checked { holds, .. } => Some(*holds),
            MassBound::Skipped { .. } => None,
        }
    }
}

pub fn check_effective_mass_bound(graph: &PeriodicGraph, q: &[f64]) -> Result<MassBound> {
    let c0 = perron_ratio(graph, q)?.c0;
    let (m, m0) = match (
        effective_mass(graph, q, DEFAULT_STEP),
        effective_mass(graph, &zero_potential(graph), DEFAULT_STEP),
    ) {
        (Ok(m), Ok(m0)) => (m, m0),
        (Err(e), _) | (_, Err(e)) => {
            return Ok(MassBound::Skipped {
                reason: e.to_string(),
            })
        }
    };
    let d = graph.dim();
    let combine = |a: f64, x: &EffectiveMass, b: f64, y: &EffectiveMass| -> Vec<Vec<f64>> {
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| a * x.mass[i][j] + b * y.mass[i][j])
                    .collect()
            })
            .collect()
    };
    let c2 = c0 * c0;
    let upper = symmetric_eigenvalues(&combine(c2, &m0, -1.0, &m))?;
    let lower = symmetric_eigenvalues(&combine(1.0, &m, -1.0 / c2, &m0))?;
    let upper_margin = upper[0];
    let lower_margin = lower[0];
    Ok(MassBound::Checked {
        c0,
        mass: m.mass,
        laplacian_mass: m0.mass,
        upper_margin,
        lower_margin,
        holds: upper_margin >= -MASS_SLACK && lower_margin >= -MASS_SLACK,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactLoopCheck {
    pub theta0: Vec<f64>,
    /// `max_n |λ_n⁺ − λ_n(θ₀)|`.
    pub top_deviation: f64,
    pub band_length_sum: f64,
    pub zeta_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleVertexCheck {
    pub measure: f64,
    pub band_length_sum: f64,
    pub holds: bool,
}

/// Band edges of loop graphs: `λ_n⁻ = λ_n(0)`, and on exact loop graphs
/// `λ_n⁺ = λ_n(θ₀)` with `Σ|σ_n| = 2ζ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopGraphCheck {
    /// `max_n |λ_n⁻ − λ_n(0)|`.
    pub bottom_deviation: f64,
    pub exact: Option<ExactLoopCheck>,
    pub single_vertex: Option<SingleVertexCheck>,
    pub holds: bool,
}

fn max_deviation(a: impl Iterator<Item = f64>, b: &[f64]) -> f64 {
    a.zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

impl LoopGraphCheck {
    pub fn from_bands(graph: &PeriodicGraph, q: &[f64], bands: &BandStructure) -> Result<Self> {
        let theta0 = graph.exact_quasimomentum()?;
        let at_zero = assemble_schrodinger(graph, q, &vec![0.0; graph.dim()])?.eigenvalues()?;
        let bottom_deviation = max_deviation(bands.bands.iter().map(|b| b.lower), &at_zero);
        let band_length_sum = bands.band_length_sum();
        let exact = match theta0 {
            Some(theta0) => {
                let top = assemble_schrodinger(graph, q, &theta0)?.eigenvalues()?;
                let top_deviation = max_deviation(bands.bands.iter().map(|b| b.upper), &top);
                let zeta_bound = 2.0 * graph.zeta().value;
                Some(ExactLoopCheck {
                    theta0,
                    top_deviation,
                    band_length_sum,
                    zeta_bound,
                    holds: top_deviation <= SLACK && (band_length_sum - zeta_bound).abs() <= SLACK,
                })
            }
            None => None,
        };
        let single_vertex = graph.bridges_at_single_vertex().then(|| {
            let measure = spectrum_union(bands).measure;
            SingleVertexCheck {
                measure,
                band_length_sum,
                holds: (measure - band_length_sum).abs() <= SLACK,
            }
        });
        let holds = bottom_deviation <= SLACK
            && exact.as_ref().is_none_or(|e| e.holds)
            && single_vertex.as_ref().is_none_or(|s| s.holds);
        Ok(Self {
            bottom_deviation,
            exact,
            single_vertex,
            holds,
        })
    }
}

pub fn check_loop_graph(graph: &PeriodicGraph, q: &[f64], grid: &BzGrid) -> Result<LoopGraphCheck> {
    graph.exact_quasimomentum()?;
    let bands = compute_bands(graph, q, grid, FLAT_TOL)?;
    LoopGraphCheck::from_bands(graph, q, &bands)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatOneCheck {
    pub required: usize,
    pub found: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartiteGapCheck {
    pub gap_sum: f64,
    pub lower: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopEndpointCheck {
    /// Largest distance of a band endpoint from its predicted eigenvalue.
    pub deviation: f64,
    pub holds: bool,
}

/// Spectral symmetry and flat-band statements for bipartite graphs (Laplacian only).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartiteCheck {
    /// Part sizes when the fundamental graph is bipartite.
    pub fundamental_parts: Option<(usize, usize)>,
    /// `max_θ max_k |λ_k(θ) + λ_{ν+1−k}(θ) − 2|` over the grid.
    pub symmetry_deviation: Option<f64>,
    pub flat_one: Option<FlatOneCheck>,
    pub periodic_bipartite: bool,
    pub gap_sum: Option<BipartiteGapCheck>,
    pub loop_endpoints: Option<LoopEndpointCheck>,
    pub holds: bool,
}

impl BipartiteCheck {
    fn build(
        graph: &PeriodicGraph,
        samples: &[Vec<f64>],
        laplacian: &BandStructure,
    ) -> Result<Self> {
        let parts = graph.is_bipartite();
        let fundamental_parts = parts.as_ref().map(|p| (p.first.len(), p.second.len()));
        let symmetry_deviation = parts.as_ref().map(|_| {
            samples
                .iter()
                .flat_map(|s| {
                    let n = s.len();
                    (0..n).map(move |k| (s[k] + s[n - 1 - k] - 2.0).abs())
                })
                .fold(0.0, f64::max)
        });
        let flat_one = parts.as_ref().filter(|p| p.imbalance() > 0).map(|p| {
            let found = laplacian.flat_multiplicity_at(1.0);
            FlatOneCheck {
                required: p.imbalance(),
                found,
                holds: found >= p.imbalance(),
            }
        });
        let periodic_bipartite = graph.is_periodic_bipartite();
        let gap_sum = periodic_bipartite.then(|| {
            let sum = gap_sum(&gaps(laplacian));
            let lower = 2.0 * (1.0 - graph.zeta().value);
            BipartiteGapCheck {
                gap_sum: sum,
                lower,
                holds: sum >= lower - SLACK,
            }
        });
        let loop_endpoints = if periodic_bipartite && graph.is_loop_graph() {
            let at_zero = assemble_laplacian(graph, &vec![0.0; graph.dim()])?.eigenvalues()?;
            let n = at_zero.len();
            let reflected: Vec<f64> = (0..n).map(|k| 2.0 - at_zero[n - 1 - k]).collect();
            let deviation = max_deviation(laplacian.bands.iter().map(|b| b.lower), &at_zero).max(
                max_deviation(laplacian.bands.iter().map(|b| b.upper), &reflected),
            );
            Some(LoopEndpointCheck {
                deviation,
                holds: deviation <= SLACK,
            })
        } else {
            None
        };
        let holds = symmetry_deviation.is_none_or(|d| d <= SLACK)
            && flat_one.as_ref().is_none_or(|f| f.holds)
            && gap_sum.as_ref().is_none_or(|g| g.holds)
            && loop_endpoints.as_ref().is_none_or(|l| l.holds);
        Ok(Self {
            fundamental_parts,
            symmetry_deviation,
            flat_one,
            periodic_bipartite,
            gap_sum,
            loop_endpoints,
            holds,
        })
    }
}

pub fn check_bipartite(graph: &PeriodicGraph, grid: &BzGrid) -> Result<BipartiteCheck> {
    let samples = sample_grid(graph, &zero_potential(graph), grid)?;
    let laplacian = BandStructure::from_samples(&samples, *grid, FLAT_TOL);
    BipartiteCheck::build(graph, &samples, &laplacian)
}

/// `max |∇(θ)^*∇(θ) − Δ(θ)|` entrywise.
pub fn factorization_residual(graph: &PeriodicGraph, theta: &[f64]) -> Result<f64> {
    let nabla = assemble_nabla(graph, theta)?;
    let product = &nabla.adjoint() * &nabla;
    Ok((&product - &assemble_laplacian(graph, theta)?).max_abs())
}

/// Relative mismatches of the two quadratic-form identities at `(θ, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormResiduals {
    /// `⟨Δ(θ)f, f⟩` against the edge sum.
    pub laplacian: f64,
    /// `⟨(H(θ) − λ₁(0))Ψf, Ψf⟩` against the `c_uv`-weighted edge sum.
    pub weighted: f64,
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

pub fn form_residuals(
    graph: &PeriodicGraph,
    q: &[f64],
    theta: &[f64],
    f: &[Complex64],
) -> Result<FormResiduals> {
    let lap = assemble_laplacian(graph, theta)?;
    let lhs = lap.quadratic_form(f);
    let laplacian = relative(lhs.re, laplacian_form(graph, theta, f)).max(lhs.im.abs());

    let p = perron(graph, q)?;
    let psi_f: Vec<Complex64> = f.iter().zip(&p.vector).map(|(z, &s)| z * s).collect();
    let shifted = assemble_schrodinger(graph, q, theta)?.shifted(-p.value);
    let lhs = shifted.quadratic_form(&psi_f);
    let weighted = relative(lhs.re, weighted_form(graph, &p.vector, theta, f)).max(lhs.im.abs());
    Ok(FormResiduals {
        laplacian,
        weighted,
    })
}

/// Smallest and largest eigenvalue of `Δ(θ)` over the grid.
pub fn laplacian_range(graph: &PeriodicGraph, grid: &BzGrid) -> Result<(f64, f64)> {
    let samples = sample_grid(graph, &zero_potential(graph), grid)?;
    Ok(samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
            (
                lo.min(*s.first().unwrap_or(&lo)),
                hi.max(*s.last().unwrap_or(&hi)),
            )
        }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl From<bool> for Status {
    fn from(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub loop_graph: bool,
    pub exact_quasimomentum: Option<Vec<f64>>,
    pub bridges_at_single_vertex: bool,
    pub fundamental_bipartite: bool,
    pub periodic_bipartite: bool,
    pub bridge_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub zeta: f64,
    pub zeta_bound: f64,
    pub bands: BandStructure,
    pub union: SpectrumUnion,
    pub gaps: Vec<Interval>,
    pub gap_sum: f64,
    pub measure_bound: MeasureBound,
    pub gap_bound: GapSum,
    pub perron: PerronRatio,
    pub first_band: FirstBand,
    pub effective_mass: Option<EffectiveMass>,
    pub mass_bound: MassBound,
    pub loop_graph: Option<LoopGraphCheck>,
    pub bipartite: BipartiteCheck,
    pub classification: Classification,
    pub warnings: Vec<String>,
    pub verdicts: Vec<Verdict>,
}

impl SpectralReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.status != Status::Fail)
    }
}

/// Runs every applicable check on `(graph, Q)`.
pub fn report(graph: &PeriodicGraph, q: &[f64], grid: &BzGrid) -> Result<SpectralReport> {
    let zeta = graph.zeta();
    let bands = compute_bands(graph, q, grid, FLAT_TOL)?;
    let lap_samples = sample_grid(graph, &zero_potential(graph), grid)?;
    let laplacian = BandStructure::from_samples(&lap_samples, *grid, FLAT_TOL);
    let union = spectrum_union(&bands);
    let gap_list = gaps(&bands);

    let measure_bound = MeasureBound::from_bands(graph, &bands);
    let gap_bound = GapSum::from_bands(graph, q, &bands, &laplacian);
    let ratio = perron_ratio(graph, q)?;
    let first_band = FirstBand::from_bands(ratio.c0, &bands, &laplacian);
    let effective_mass = effective_mass(graph, q, DEFAULT_STEP).ok();
    let mass_bound = check_effective_mass_bound(graph, q)?;
    let loop_graph = if graph.is_loop_graph() {
        Some(LoopGraphCheck::from_bands(graph, q, &bands)?)
    } else {
        None
    };
    let bipartite = BipartiteCheck::build(graph, &lap_samples, &laplacian)?;

    let classification = Classification {
        loop_graph: graph.is_loop_graph(),
        exact_quasimomentum: loop_graph
            .as_ref()
            .and_then(|l| l.exact.as_ref().map(|e| e.theta0.clone())),
        bridges_at_single_vertex: graph.bridges_at_single_vertex(),
        fundamental_bipartite: bipartite.fundamental_parts.is_some(),
        periodic_bipartite: bipartite.periodic_bipartite,
        bridge_rank: graph.bridge_rank(),
    };

    let mut warnings: Vec<String> = graph
        .to_fundamental()
        .validate()
        .warnings
        .iter()
        .map(Warning::to_string)
        .collect();
    if !zeta.within_bound {
        warnings.push(format!(
            "zeta {} exceeds the spanning-tree bound {}; indices are not tree-normalised",
            zeta.value, zeta.bound
        ));
    }

    let verdict = |check: &str, status: Status| Verdict {
        check: check.to_string(),
        status,
    };
    let skipped = Status::Skipped;
    let verdicts = vec![
        verdict("measure_bound", measure_bound.holds.into()),
        verdict("gap_sum_bound", gap_bound.holds.into()),
        verdict("first_band", first_band.holds.into()),
        verdict(
            "effective_mass_bound",
            mass_bound.holds().map_or(skipped, Status::from),
        ),
        verdict(
            "loop_graph_edges",
            loop_graph.as_ref().map_or(skipped, |l| l.holds.into()),
        ),
        verdict("bipartite", bipartite.holds.into()),
    ];

    Ok(SpectralReport {
        zeta: zeta.value,
        zeta_bound: zeta.bound,
        gap_sum: gap_sum(&gap_list),
        bands,
        union,
        gaps: gap_list,
        measure_bound,
        gap_bound,
        perron: ratio,
        first_band,
        effective_mass,
        mass_bound,
        loop_graph,
        bipartite,
        classification,
        warnings,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{generate, CrystalFamily};
    use crate::error::Error;

    fn graph(f: CrystalFamily) -> PeriodicGraph {
        PeriodicGraph::new(&generate(f).unwrap()).unwrap()
    }

    fn grid(d: usize) -> BzGrid {
        BzGrid::new(d, 8).unwrap()
    }

    #[test]
    fn lattice_measure_equals_two_zeta() {
        let g = graph(CrystalFamily::Lattice { d: 2 });
        let m = check_measure_bound(&g, &[0.0], &grid(2)).unwrap();
        assert!(m.holds && m.equality);
        assert!((m.measure - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_gap_sum_is_saturated() {
        let g = graph(CrystalFamily::Lattice { d: 3 });
        let s = check_gap_sum(&g, &[0.0], &grid(3)).unwrap();
        assert_eq!(s.gap_sum, 0.0);
        assert!(s.zeta_lower.abs() < 1e-12);
        assert!(s.holds);
    }

    #[test]
    fn zero_potential_collapses_first_band_chain() {
        for f in crate::catalog::standard_families() {
            let g = graph(f);
            let fb = check_first_band(&g, &zero_potential(&g), &grid(g.dim())).unwrap();
            assert!((fb.c0 - 1.0).abs() < 1e-10, "{f:?}");
            assert!((fb.lower - fb.width).abs() < 1e-9 && (fb.upper - fb.width).abs() < 1e-9);
            assert!(fb.holds);
        }
    }

    #[test]
    fn mass_bound_trivial_without_potential() {
        let g = graph(CrystalFamily::Lattice { d: 3 });
        match check_effective_mass_bound(&g, &[0.0]).unwrap() {
            MassBound::Checked {
                c0,
                upper_margin,
                lower_margin,
                mass,
                holds,
                ..
            } => {
                assert!((c0 - 1.0).abs() < 1e-12);
                assert!(upper_margin.abs() < 1e-9 && lower_margin.abs() < 1e-9);
                assert!((mass[0][0] - 3.0).abs() < 1e-4);
                assert!(holds);
            }
            MassBound::Skipped { reason } => panic!("skipped: {reason}"),
        }
    }

    #[test]
    fn loop_check_requires_loop_graph() {
        let g = graph(CrystalFamily::Subdivided { d: 2, n: 1 });
        assert!(matches!(
            check_loop_graph(&g, &[0.0; 3], &grid(2)),
            Err(Error::NotLoopGraph { .. })
        ));
    }

    #[test]
    fn lattice_loop_and_bipartite_checks() {
        let g = graph(CrystalFamily::Lattice { d: 2 });
        let l = check_loop_graph(&g, &[0.0], &grid(2)).unwrap();
        assert!(l.holds);
        let e = l.exact.unwrap();
        assert!((e.band_length_sum - 2.0).abs() < 1e-12);
        let b = check_bipartite(&g, &grid(2)).unwrap();
        assert!(b.fundamental_parts.is_none());
        assert!(b.periodic_bipartite);
        assert!(b.loop_endpoints.unwrap().holds);
        assert!(b.holds);
    }

    #[test]
    fn fcc_skips_symmetry() {
        let g = graph(CrystalFamily::Fcc);
        let b = check_bipartite(&g, &grid(3)).unwrap();
        assert!(b.fundamental_parts.is_none() && b.symmetry_deviation.is_none());
        assert!(!b.periodic_bipartite);
        assert!(b.holds);
    }

    #[test]
    fn factorization_holds_at_random_point() {
        let g = graph(CrystalFamily::Bcc);
        assert!(factorization_residual(&g, &[0.3, 4.0, 5.5]).unwrap() < 1e-14);
    }
}
