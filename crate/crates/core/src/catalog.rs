//! Built-in crystal families: the cubic lattice, its star decoration and
//! edge subdivision, and the body- and face-centred cubic lattices.
//!
//! Vertex ids are `v1..vν` in matrix order. Loop bridges are listed first,
//! then the remaining edges, so the generated edge lists are byte-stable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeRecord, FundamentalGraph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrystalFamily {
    /// `Z^d` with one vertex and `d` loop bridges.
    Lattice { d: usize },
    /// `Z^d` with `ν − 1` pendant vertices attached to every lattice vertex.
    StarDecorated { d: usize, nu: usize },
    /// `Z^d` with `n` extra vertices on every lattice edge.
    Subdivided { d: usize, n: usize },
    /// Body-centred cubic lattice.
    Bcc,
    /// Face-centred cubic lattice.
    Fcc,
}

impl CrystalFamily {
    pub fn dimension(&self) -> usize {
        match *self {
            CrystalFamily::Lattice { d }
            | CrystalFamily::StarDecorated { d, .. }
            | CrystalFamily::Subdivided { d, .. } => d,
            CrystalFamily::Bcc | CrystalFamily::Fcc => 3,
        }
    }

    fn check(&self) -> Result<()> {
        let d = self.dimension();
        if d == 0 {
            return Err(Error::InvalidFamily("dimension must be at least 1".into()));
        }
        if d > 16 {
            return Err(Error::InvalidFamily(format!("dimension {d} is too large")));
        }
        match *self {
            CrystalFamily::StarDecorated { nu, .. } if nu < 2 => Err(Error::InvalidFamily(
                format!("star decoration needs nu >= 2, got {nu}"),
            )),
            CrystalFamily::Subdivided { n, .. } if n < 1 => {
                Err(Error::InvalidFamily("subdivision needs n >= 1".into()))
            }
            _ => Ok(()),
        }
    }
}

fn unit(d: usize, j: usize) -> Vec<i64> {
    let mut a = vec![0; d];
    a[j] = 1;
    a
}

fn vid(i: usize) -> String {
    format!("v{i}")
}

fn vertices(n: usize) -> Vec<Vertex> {
    (1..=n).map(|i| Vertex::new(vid(i))).collect()
}

fn loops_at(hub: &str, d: usize) -> impl Iterator<Item = EdgeRecord> + '_ {
    (0..d).map(move |j| EdgeRecord::new(hub, hub, unit(d, j)))
}

pub fn generate(family: CrystalFamily) -> Result<FundamentalGraph> {
    family.check()?;
    let graph = match family {
        CrystalFamily::Lattice { d } => {
            FundamentalGraph::new(d, vertices(1), loops_at("v1", d).collect())
        }
        CrystalFamily::StarDecorated { d, nu } => {
            let hub = vid(nu);
            let mut edges: Vec<EdgeRecord> = loops_at(&hub, d).collect();
            edges.extend((1..nu).map(|j| EdgeRecord::new(vid(j), hub.clone(), vec![0; d])));
            FundamentalGraph::new(d, vertices(nu), edges)
        }
        CrystalFamily::Subdivided { d, n } => {
            let nu = d * n + 1;
            let hub = vid(nu);
            let mut edges = Vec::with_capacity(d * (n + 1));
            for j in 0..d {
                // chain hub -> m_1 -> ... -> m_n -> hub + a_j
                let chain: Vec<String> = (1..=n).map(|k| vid(j * n + k)).collect();
                edges.push(EdgeRecord::new(hub.clone(), chain[0].clone(), vec![0; d]));
                for w in chain.windows(2) {
                    edges.push(EdgeRecord::new(w[0].clone(), w[1].clone(), vec![0; d]));
                }
                edges.push(EdgeRecord::new(
                    chain[n - 1].clone(),
                    hub.clone(),
                    unit(d, j),
                ));
            }
            FundamentalGraph::new(d, vertices(nu), edges)
        }
        CrystalFamily::Bcc => {
            let mut edges: Vec<EdgeRecord> = loops_at("v2", 3).collect();
            let centre = [
                [0, 0, 0],
                [1, 0, 0],
                [0, 1, 0],
                [0, 0, 1],
                [1, 1, 0],
                [1, 0, 1],
                [0, 1, 1],
                [1, 1, 1],
            ];
            edges.extend(
                centre
                    .iter()
                    .map(|t| EdgeRecord::new("v1", "v2", t.to_vec())),
            );
            FundamentalGraph::new(3, vertices(2), edges)
        }
        CrystalFamily::Fcc => {
            let mut edges: Vec<EdgeRecord> = loops_at("v4", 3).collect();
            let faces: [(&str, [[i64; 3]; 4]); 3] = [
                ("v1", [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]]),
                ("v2", [[0, 0, 0], [1, 0, 0], [0, 0, 1], [1, 0, 1]]),
                ("v3", [[0, 0, 0], [0, 1, 0], [0, 0, 1], [0, 1, 1]]),
            ];
            for (face, idx) in faces {
                edges.extend(idx.iter().map(|t| EdgeRecord::new(face, "v4", t.to_vec())));
            }
            FundamentalGraph::new(3, vertices(4), edges)
        }
    };
    Ok(graph)
}

/// Every family exercised by the test-suites, at small parameters.
pub fn standard_families() -> Vec<CrystalFamily> {
    vec![
        CrystalFamily::Lattice { d: 1 },
        CrystalFamily::Lattice { d: 2 },
        CrystalFamily::Lattice { d: 3 },
        CrystalFamily::StarDecorated { d: 2, nu: 3 },
        CrystalFamily::StarDecorated { d: 2, nu: 5 },
        CrystalFamily::StarDecorated { d: 3, nu: 4 },
        CrystalFamily::Subdivided { d: 2, n: 1 },
        CrystalFamily::Subdivided { d: 2, n: 2 },
        CrystalFamily::Subdivided { d: 3, n: 1 },
        CrystalFamily::Bcc,
        CrystalFamily::Fcc,
    ]
}
