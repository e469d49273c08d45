//! Periodic graphs described through their fundamental (quotient) graph.
//!
//! A `Z^d`-periodic graph is stored as a finite multigraph on `ν` vertex
//! classes. Each stored edge `(u, v, τ)` is one representative of an
//! undirected edge; the reverse orientation `(v, u, −τ)` is implied. Loops
//! and multi-edges are allowed. The integer vector `τ` is the edge index:
//! the cell offset that the edge crosses relative to a fixed set of
//! fundamental vertices. Edges with nonzero index are *bridges*.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vertex class with its periodic potential value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vertex {
    pub id: String,
    #[serde(default)]
    pub potential: f64,
}

impl Vertex {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            potential: 0.0,
        }
    }
}

/// One representative of an undirected edge of the fundamental graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    #[serde(rename = "u")]
    pub tail: String,
    #[serde(rename = "v")]
    pub head: String,
    pub index: Vec<i64>,
}

impl EdgeRecord {
    pub fn new(tail: impl Into<String>, head: impl Into<String>, index: Vec<i64>) -> Self {
        Self {
            tail: tail.into(),
            head: head.into(),
            index,
        }
    }
}

/// Unchecked fundamental graph, as read from a file or built by hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FundamentalGraph {
    pub dimension: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<EdgeRecord>,
}

/// A bond `u (cell 0) -> v (cell shift)` of a periodic description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bond {
    #[serde(rename = "u")]
    pub tail: String,
    #[serde(rename = "v")]
    pub head: String,
    pub shift: Vec<i64>,
}

impl Bond {
    pub fn new(tail: impl Into<String>, head: impl Into<String>, shift: Vec<i64>) -> Self {
        Self {
            tail: tail.into(),
            head: head.into(),
            shift,
        }
    }
}

/// Periodic graph given by vertex classes and cell-shifted bonds.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicDescription {
    pub dimension: usize,
    pub vertices: Vec<Vertex>,
    pub bonds: Vec<Bond>,
}

/// Spanning tree chosen by [`assign_indices`] and the coordinates of the
/// fundamental vertex representatives it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTreeAssignment {
    /// Positions (into the bond list) of the tree bonds.
    pub tree_bonds: Vec<usize>,
    /// Cell coordinate `[v]` of the chosen representative of each vertex.
    pub coordinates: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    NoVertices,
    ZeroDimension,
    DuplicateVertex(String),
    DanglingEndpoint { edge: usize, id: String },
    IndexDimension { edge: usize, len: usize, dim: usize },
    ZeroDegree(String),
    Disconnected { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "graph has no vertices"),
            Violation::ZeroDimension => write!(f, "dimension must be positive"),
            Violation::DuplicateVertex(id) => write!(f, "duplicate vertex id {id:?}"),
            Violation::DanglingEndpoint { edge, id } => {
                write!(f, "edge {edge} references unknown vertex {id:?}")
            }
            Violation::IndexDimension { edge, len, dim } => write!(
                f,
                "index dimension mismatch: edge {edge} has length {len}, expected {dim}"
            ),
            Violation::ZeroDegree(id) => write!(f, "vertex {id:?} has degree 0"),
            Violation::Disconnected { components } => {
                write!(f, "disconnected: quotient has {components} components")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Warning {
    /// No bridges at all: the periodic graph is a disjoint union of copies.
    NoBridges,
    /// The bridge indices span a sublattice of rank below `d`.
    BridgeRankDeficient { rank: usize, dim: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::NoBridges => write!(f, "no bridges: periodic graph cannot be connected"),
            Warning::BridgeRankDeficient { rank, dim } => write!(
                f,
                "bridge indices span rank {rank} < {dim}: periodic graph is not connected"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Counts connected components of an undirected multigraph on `n` vertices.
fn component_count(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> usize {
    let mut adj = vec![Vec::new(); n];
    for (a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    let mut components = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    components
}

/// Resolves vertex ids to positions, collecting every structural problem.
fn resolve(
    dimension: usize,
    vertices: &[Vertex],
    endpoints: impl Iterator<Item = (String, String, usize)>,
) -> (Vec<Violation>, Vec<(usize, usize)>) {
    let mut violations = Vec::new();
    if dimension == 0 {
        violations.push(Violation::ZeroDimension);
    }
    if vertices.is_empty() {
        violations.push(Violation::NoVertices);
    }
    let mut position = HashMap::new();
    for (i, v) in vertices.iter().enumerate() {
        if position.insert(v.id.as_str(), i).is_some() {
            violations.push(Violation::DuplicateVertex(v.id.clone()));
        }
    }
    let mut resolved = Vec::new();
    for (k, (tail, head, len)) in endpoints.enumerate() {
        if len != dimension {
            violations.push(Violation::IndexDimension {
                edge: k,
                len,
                dim: dimension,
            });
        }
        let t = position.get(tail.as_str()).copied();
        let h = position.get(head.as_str()).copied();
        if t.is_none() {
            violations.push(Violation::DanglingEndpoint { edge: k, id: tail });
        }
        if h.is_none() {
            violations.push(Violation::DanglingEndpoint { edge: k, id: head });
        }
        if let (Some(t), Some(h)) = (t, h) {
            resolved.push((t, h));
        }
    }
    (violations, resolved)
}

/// Rank over the rationals of a set of integer vectors (fraction-free elimination).
pub fn integer_rank(vectors: &[Vec<i64>], dim: usize) -> usize {
    let mut rows: Vec<Vec<i128>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| x as i128).collect())
        .collect();
    let mut rank = 0;
    for col in 0..dim {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank].clone();
        for r in rows.iter_mut().skip(rank + 1) {
            let f = r[col];
            if f == 0 {
                continue;
            }
            for c in 0..dim {
                r[c] = r[c] * p[col] - f * p[c];
            }
            let g = r.iter().fold(0i128, |g, &x| gcd(g, x.abs()));
            if g > 1 {
                r.iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FundamentalGraph {
    pub fn new(dimension: usize, vertices: Vec<Vertex>, edges: Vec<EdgeRecord>) -> Self {
        Self {
            dimension,
            vertices,
            edges,
        }
    }

    /// Checks every structural invariant and reports all violations at once.
    pub fn validate(&self) -> Validation {
        let (mut violations, resolved) = resolve(
            self.dimension,
            &self.vertices,
            self.edges
                .iter()
                .map(|e| (e.tail.clone(), e.head.clone(), e.index.len())),
        );
        let n = self.vertices.len();
        let mut degree = vec![0usize; n];
        for &(t, h) in &resolved {
            degree[t] += 1;
            degree[h] += 1;
        }
        for (v, &k) in self.vertices.iter().zip(&degree) {
            if k == 0 {
                violations.push(Violation::ZeroDegree(v.id.clone()));
            }
        }
        if n > 0 {
            let components = component_count(n, resolved.iter().copied());
            if components > 1 {
                violations.push(Violation::Disconnected { components });
            }
        }

        let mut warnings = Vec::new();
        if violations.is_empty() {
            let bridges: Vec<Vec<i64>> = self
                .edges
                .iter()
                .filter(|e| e.index.iter().any(|&x| x != 0))
                .map(|e| e.index.clone())
                .collect();
            if bridges.is_empty() {
                warnings.push(Warning::NoBridges);
            } else {
                let rank = integer_rank(&bridges, self.dimension);
                if rank < self.dimension {
                    warnings.push(Warning::BridgeRankDeficient {
                        rank,
                        dim: self.dimension,
                    });
                }
            }
        }
        Validation {
            violations,
            warnings,
        }
    }
}

/// Directed edge of a validated fundamental graph, endpoints by position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub index: Vec<i64>,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }

    pub fn is_bridge(&self) -> bool {
        self.index.iter().any(|&x| x != 0)
    }

    /// `⟨τ(e), θ⟩`.
    pub fn phase(&self, theta: &[f64]) -> f64 {
        self.index
            .iter()
            .zip(theta)
            .map(|(&t, &x)| t as f64 * x)
            .sum()
    }

    pub fn reversed(&self) -> Edge {
        Edge {
            tail: self.head,
            head: self.tail,
            index: self.index.iter().map(|x| -x).collect(),
        }
    }
}

/// Per-vertex bridge counts and the directed bridge list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bridges {
    /// All directed bridges, both orientations of each representative.
    pub directed: Vec<Edge>,
    /// `ζ_v`: number of directed bridges starting at `v`.
    pub per_vertex: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Zeta {
    /// `ζ = Σ_v ζ_v / κ_v`.
    pub value: f64,
    /// `1` when `ν = 1`, otherwise `ν − Σ_v 1/κ_v`.
    pub bound: f64,
    pub within_bound: bool,
    pub no_bridges: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bipartition {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

impl Bipartition {
    /// `|#V₁ − #V₂|`.
    pub fn imbalance(&self) -> usize {
        self.first.len().abs_diff(self.second.len())
    }
}

/// A validated fundamental graph with resolved endpoints and degrees.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicGraph {
    dim: usize,
    ids: Vec<String>,
    potential: Vec<f64>,
    edges: Vec<Edge>,
    degree: Vec<usize>,
}

impl PeriodicGraph {
    pub fn new(graph: &FundamentalGraph) -> Result<Self> {
        let validation = graph.validate();
        if !validation.is_ok() {
            return Err(Error::Invalid(validation.violations));
        }
        let position: HashMap<&str, usize> = graph
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.as_str(), i))
            .collect();
        let edges: Vec<Edge> = graph
            .edges
            .iter()
            .map(|e| Edge {
                tail: position[e.tail.as_str()],
                head: position[e.head.as_str()],
                index: e.index.clone(),
            })
            .collect();
        let mut degree = vec![0; graph.vertices.len()];
        for e in &edges {
            degree[e.tail] += 1;
            degree[e.head] += 1;
        }
        Ok(Self {
            dim: graph.dimension,
            ids: graph.vertices.iter().map(|v| v.id.clone()).collect(),
            potential: graph.vertices.iter().map(|v| v.potential).collect(),
            edges,
            degree,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of vertex classes `ν`.
    pub fn order(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    /// Potential values stored with the vertices.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Stored edge representatives, in input order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Both orientations of every stored representative.
    pub fn directed_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().flat_map(|e| [e.clone(), e.reversed()])
    }

    /// `κ_v`, the number of directed edges starting at `v`.
    pub fn degree(&self, v: usize) -> usize {
        self.degree[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degree
    }

    pub fn to_fundamental(&self) -> FundamentalGraph {
        FundamentalGraph {
            dimension: self.dim,
            vertices: self
                .ids
                .iter()
                .zip(&self.potential)
                .map(|(id, &q)| Vertex {
                    id: id.clone(),
                    potential: q,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    tail: self.ids[e.tail].clone(),
                    head: self.ids[e.head].clone(),
                    index: e.index.clone(),
                })
                .collect(),
        }
    }

    pub fn bridges(&self) -> Bridges {
        let directed: Vec<Edge> = self.directed_edges().filter(Edge::is_bridge).collect();
        let mut per_vertex = vec![0; self.order()];
        for e in &directed {
            per_vertex[e.tail] += 1;
        }
        Bridges {
            directed,
            per_vertex,
        }
    }

    /// `ζ_uv`: number of directed bridges from `u` to `v`.
    pub fn bridge_counts(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut counts = vec![vec![0; n]; n];
        for e in self.directed_edges().filter(Edge::is_bridge) {
            counts[e.tail][e.head] += 1;
        }
        counts
    }

    pub fn zeta(&self) -> Zeta {
        let bridges = self.bridges();
        let value: f64 = bridges
            .per_vertex
            .iter()
            .zip(&self.degree)
            .map(|(&z, &k)| z as f64 / k as f64)
            .sum();
        let bound = if self.order() == 1 {
            1.0
        } else {
            self.order() as f64 - self.degree.iter().map(|&k| 1.0 / k as f64).sum::<f64>()
        };
        Zeta {
            value,
            bound,
            within_bound: value <= bound + 1e-12,
            no_bridges: bridges.directed.is_empty(),
        }
    }

    pub fn is_loop_graph(&self) -> bool {
        self.edges
            .iter()
            .filter(|e| e.is_bridge())
            .all(Edge::is_loop)
    }

    fn require_loop_graph(&self) -> Result<()> {
        match self.edges.iter().find(|e| e.is_bridge() && !e.is_loop()) {
            Some(e) => Err(Error::NotLoopGraph {
                tail: self.ids[e.tail].clone(),
                head: self.ids[e.head].clone(),
            }),
            None => Ok(()),
        }
    }

    /// True when every bridge is a loop at one and the same vertex.
    pub fn bridges_at_single_vertex(&self) -> bool {
        let mut at = self
            .edges
            .iter()
            .filter(|e| e.is_bridge())
            .map(|e| (e.tail, e.head));
        match at.next() {
            None => true,
            Some((t, h)) => t == h && at.all(|(a, b)| a == t && b == t),
        }
    }

    /// Searches `{0, π}^d` for a `θ₀` with `cos⟨τ(e), θ₀⟩ = −1` on every bridge.
    ///
    /// Candidates are scanned with bit `j` of a counter selecting `θ₀_j = π`,
    /// so the first hit has the fewest leading `π` components. The test is
    /// exact: the cosine is `−1` iff `Σ_{j: θ₀_j = π} τ_j` is odd.
    pub fn exact_quasimomentum(&self) -> Result<Option<Vec<f64>>> {
        self.require_loop_graph()?;
        let bridges: Vec<&Edge> = self.edges.iter().filter(|e| e.is_bridge()).collect();
        for mask in 0u64..(1u64 << self.dim) {
            let odd = bridges.iter().all(|e| {
                let s: i64 = (0..self.dim)
                    .filter(|j| mask >> j & 1 == 1)
                    .map(|j| e.index[j])
                    .sum();
                s.rem_euclid(2) == 1
            });
            if odd {
                return Ok(Some(
                    (0..self.dim)
                        .map(|j| {
                            if mask >> j & 1 == 1 {
                                std::f64::consts::PI
                            } else {
                                0.0
                            }
                        })
                        .collect(),
                ));
            }
        }
        Ok(None)
    }

    /// Two-colouring of the fundamental multigraph; `None` when it has an odd
    /// cycle (any loop counts as one).
    pub fn is_bipartite(&self) -> Option<Bipartition> {
        if self.edges.iter().any(Edge::is_loop) {
            return None;
        }
        let n = self.order();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.tail].push(e.head);
            adj[e.head].push(e.tail);
        }
        let mut colour: Vec<Option<bool>> = vec![None; n];
        colour[0] = Some(false);
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            let c = colour[u].expect("queued vertices are coloured");
            for &w in &adj[u] {
                match colour[w] {
                    None => {
                        colour[w] = Some(!c);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == c => return None,
                    Some(_) => {}
                }
            }
        }
        let (first, second): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|&v| colour[v] == Some(false));
        Some(Bipartition { first, second })
    }

    /// Bipartiteness of the infinite periodic graph.
    ///
    /// A connected `Z^d` cover is bipartite iff there are a class colouring
    /// `c: V* → Z₂` and a character `χ: Z^d → Z₂` with
    /// `c(u) + c(v) + χ(τ(e)) = 1` on every edge. That is a linear system over
    /// GF(2) in `ν + d` unknowns, solved here by elimination.
    pub fn is_periodic_bipartite(&self) -> bool {
        let n = self.order();
        let width = n + self.dim;
        let mut rows: Vec<(Vec<bool>, bool)> = self
            .edges
            .iter()
            .map(|e| {
                let mut row = vec![false; width];
                row[e.tail] ^= true;
                row[e.head] ^= true;
                for (j, &t) in e.index.iter().enumerate() {
                    row[n + j] ^= t.rem_euclid(2) == 1;
                }
                (row, true)
            })
            .collect();
        let mut rank = 0;
        for col in 0..width {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].0[col]) else {
                continue;
            };
            rows.swap(rank, p);
            let (pivot, rhs) = rows[rank].clone();
            for (i, (row, b)) in rows.iter_mut().enumerate() {
                if i != rank && row[col] {
                    row.iter_mut().zip(&pivot).for_each(|(x, &y)| *x ^= y);
                    *b ^= rhs;
                }
            }
            rank += 1;
        }
        rows.iter().all(|(row, b)| row.iter().any(|&x| x) || !b)
    }

    /// Rank of the lattice spanned by the bridge indices.
    pub fn bridge_rank(&self) -> usize {
        let idx: Vec<Vec<i64>> = self
            .edges
            .iter()
            .filter(|e| e.is_bridge())
            .map(|e| e.index.clone())
            .collect();
        integer_rank(&idx, self.dim)
    }

    pub fn check_potential(&self, q: &[f64]) -> Result<()> {
        if q.len() != self.order() {
            return Err(Error::PotentialLength {
                expected: self.order(),
                got: q.len(),
            });
        }
        Ok(())
    }

    pub fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: theta.len(),
            });
        }
        Ok(())
    }
}

/// Builds the fundamental graph of a periodic description.
///
/// A spanning tree is grown breadth-first from the lexicographically smallest
/// vertex id, scanning bonds in input order. The tree fixes one representative
/// per vertex class at cell `[v]`; a bond `u (cell 0) → v (cell m)` then gets
/// index `τ = m + [u] − [v]`, which vanishes on tree bonds.
pub fn assign_indices(
    desc: &PeriodicDescription,
) -> Result<(FundamentalGraph, SpanningTreeAssignment)> {
    let (violations, resolved) = resolve(
        desc.dimension,
        &desc.vertices,
        desc.bonds
            .iter()
            .map(|b| (b.tail.clone(), b.head.clone(), b.shift.len())),
    );
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let n = desc.vertices.len();
    if component_count(n, resolved.iter().copied()) > 1 {
        return Err(Error::QuotientDisconnected);
    }

    let root = (0..n)
        .min_by(|&a, &b| desc.vertices[a].id.cmp(&desc.vertices[b].id))
        .expect("at least one vertex");
    let d = desc.dimension;
    let mut coords: Vec<Option<Vec<i64>>> = vec![None; n];
    coords[root] = Some(vec![0; d]);
    let mut tree = Vec::new();
    let mut in_tree = HashSet::new();
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let cu = coords[u].clone().expect("queued vertices have coordinates");
        for (k, (&(t, h), bond)) in resolved.iter().zip(&desc.bonds).enumerate() {
            let (other, c) = if t == u && coords[h].is_none() {
                // v sits in cell [u] + m
                (h, cu.iter().zip(&bond.shift).map(|(a, m)| a + m).collect())
            } else if h == u && coords[t].is_none() {
                (t, cu.iter().zip(&bond.shift).map(|(a, m)| a - m).collect())
            } else {
                continue;
            };
            coords[other] = Some(c);
            tree.push(k);
            in_tree.insert(k);
            queue.push_back(other);
        }
    }
    let coordinates: Vec<Vec<i64>> = coords
        .into_iter()
        .map(|c| c.expect("quotient is connected"))
        .collect();

    let edges = resolved
        .iter()
        .zip(&desc.bonds)
        .map(|(&(t, h), bond)| {
            let index = (0..d)
                .map(|j| bond.shift[j] + coordinates[t][j] - coordinates[h][j])
                .collect();
            EdgeRecord::new(bond.tail.clone(), bond.head.clone(), index)
        })
        .collect();
    Ok((
        FundamentalGraph::new(d, desc.vertices.clone(), edges),
        SpanningTreeAssignment {
            tree_bonds: tree,
            coordinates,
        },
    ))
}
