//! File formats: graph and potential files (JSON), band and path CSV, and
//! the quasimomentum path syntax used on the command line.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::band::{BandStructure, PathSample};
use crate::error::{Error, Result};
use crate::graph::{
    assign_indices, Bond, EdgeRecord, FundamentalGraph, PeriodicDescription, PeriodicGraph, Vertex,
};

/// On-disk graph: either explicit edge indices or cell-shifted bonds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub dimension: usize,
    pub vertices: Vec<Vertex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<EdgeRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bonds: Option<Vec<Bond>>,
}

impl GraphFile {
    pub fn into_fundamental(self) -> Result<FundamentalGraph> {
        match (self.edges, self.bonds) {
            (Some(edges), None) => Ok(FundamentalGraph::new(self.dimension, self.vertices, edges)),
            (None, Some(bonds)) => {
                let desc = PeriodicDescription {
                    dimension: self.dimension,
                    vertices: self.vertices,
                    bonds,
                };
                Ok(assign_indices(&desc)?.0)
            }
            (Some(_), Some(_)) => Err(Error::Parse(
                "graph file has both \"edges\" and \"bonds\"".into(),
            )),
            (None, None) => Err(Error::Parse(
                "graph file needs \"edges\" or \"bonds\"".into(),
            )),
        }
    }
}

impl From<&FundamentalGraph> for GraphFile {
    fn from(g: &FundamentalGraph) -> Self {
        Self {
            dimension: g.dimension,
            vertices: g.vertices.clone(),
            edges: Some(g.edges.clone()),
            bonds: None,
        }
    }
}

pub fn parse_graph(text: &str) -> Result<FundamentalGraph> {
    let file: GraphFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph file: {e}")))?;
    file.into_fundamental()
}

pub fn load_graph(text: &str) -> Result<PeriodicGraph> {
    PeriodicGraph::new(&parse_graph(text)?)
}

pub fn emit_graph(graph: &FundamentalGraph) -> String {
    let value = serde_json::to_value(GraphFile::from(graph)).expect("graph serializes");
    let mut out = serde_json::to_string_pretty(&round_json(value)).expect("value serializes");
    out.push('\n');
    out
}

/// Reads `{"id": value, ...}`; vertices not listed get potential 0.
pub fn parse_potential(text: &str, graph: &PeriodicGraph) -> Result<Vec<f64>> {
    let map: HashMap<String, f64> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("potential file: {e}")))?;
    let mut q = vec![0.0; graph.order()];
    let mut unknown: Vec<&String> = map.keys().filter(|k| graph.position(k).is_none()).collect();
    if !unknown.is_empty() {
        unknown.sort();
        return Err(Error::Parse(format!(
            "potential file names unknown vertices: {}",
            unknown
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    for (id, &value) in &map {
        if !value.is_finite() {
            return Err(Error::Parse(format!("potential at {id} is not finite")));
        }
        q[graph.position(id).expect("checked above")] = value;
    }
    Ok(q)
}

/// `x` rounded to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

/// Formats like C's `%.15g`.
pub fn sig15(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..15).contains(&exp) {
        let decimals = (14 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Rounds every float in a JSON document to 15 significant digits.
pub fn round_json(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round15(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect())
        }
        other => other,
    }
}

/// Serializes `value` as pretty JSON with rounded floats.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let mut out =
        serde_json::to_string_pretty(&round_json(v)).map_err(|e| Error::Parse(e.to_string()))?;
    out.push('\n');
    Ok(out)
}

/// `band_index,lambda_min,lambda_max,flat,multiplicity`; bands are 1-based.
pub fn bands_csv(bands: &BandStructure) -> String {
    let mut out = String::from("band_index,lambda_min,lambda_max,flat,multiplicity\n");
    for (n, b) in bands.bands.iter().enumerate() {
        let multiplicity = bands
            .flat_bands
            .iter()
            .find(|f| f.bands.contains(&n))
            .map_or(String::new(), |f| f.multiplicity.to_string());
        writeln!(
            out,
            "{},{},{},{},{}",
            n + 1,
            sig15(b.lower),
            sig15(b.upper),
            b.flat,
            multiplicity
        )
        .expect("write to string");
    }
    out
}

/// `t,theta_1..theta_d,lambda_1..lambda_nu`.
pub fn path_csv(samples: &[PathSample]) -> String {
    let Some(first) = samples.first() else {
        return String::new();
    };
    let mut header = vec!["t".to_string()];
    header.extend((1..=first.theta.len()).map(|j| format!("theta_{j}")));
    header.extend((1..=first.eigenvalues.len()).map(|n| format!("lambda_{n}")));
    let mut out = header.join(",");
    out.push('\n');
    for s in samples {
        let row: Vec<String> = std::iter::once(s.t)
            .chain(s.theta.iter().copied())
            .chain(s.eigenvalues.iter().copied())
            .map(sig15)
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses an angle such as `0.5`, `pi`, `-pi/2`, `3pi/4` or `2pi`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let s = text.trim();
    let bad = || Error::Parse(format!("bad angle '{text}'"));
    let Some(at) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| bad());
    };
    let (coef, rest) = (&s[..at], &s[at + 2..]);
    let coef = match coef.trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let denom = match rest {
        "" => 1.0,
        r => r
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(bad)?,
    };
    Ok(coef * PI / denom)
}

fn parse_point(text: &str) -> Result<Vec<f64>> {
    text.split(',').map(parse_angle).collect()
}

/// A straight quasimomentum path `from..to:steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    pub from: Vec<f64>,
    pub to: Vec<f64>,
    pub steps: usize,
}

pub fn parse_path(text: &str) -> Result<PathSpec> {
    let bad = |why: &str| Error::Parse(format!("bad path '{text}': {why}"));
    let (ends, steps) = text
        .rsplit_once(':')
        .ok_or_else(|| bad("expected from..to:steps"))?;
    let steps: usize = steps
        .trim()
        .parse()
        .map_err(|_| bad("steps is not an integer"))?;
    if steps == 0 {
        return Err(bad("steps must be positive"));
    }
    let (from, to) = ends
        .split_once("..")
        .ok_or_else(|| bad("expected from..to"))?;
    let (from, to) = (parse_point(from)?, parse_point(to)?);
    if from.len() != to.len() {
        return Err(bad("endpoints differ in dimension"));
    }
    Ok(PathSpec { from, to, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::{compute_bands, BzGrid, FLAT_TOL};
    use crate::catalog::{generate, CrystalFamily};

    #[test]
    fn sig15_matches_printf() {
        assert_eq!(sig15(0.0), "0");
        assert_eq!(sig15(1.0), "1");
        assert_eq!(sig15(-2.5), "-2.5");
        assert_eq!(sig15(1.0 / 3.0), "0.333333333333333");
        assert_eq!(sig15(11.0 / 7.0), "1.57142857142857");
        assert_eq!(sig15(1e-20), "1e-20");
        assert_eq!(sig15(1.5e20), "1.5e+20");
        assert_eq!(sig15(0.0001), "0.0001");
        assert_eq!(sig15(123456789012345.0), "123456789012345");
    }

    #[test]
    fn round_trip_generated_graph() {
        let g = generate(CrystalFamily::Bcc).unwrap();
        assert_eq!(parse_graph(&emit_graph(&g)).unwrap(), g);
    }

    #[test]
    fn bonds_get_indices() {
        let text = r#"{"dimension": 1, "vertices": [{"id": "a"}, {"id": "b"}],
            "bonds": [{"u": "a", "v": "b", "shift": [0]}, {"u": "b", "v": "a", "shift": [1]}]}"#;
        let g = parse_graph(text).unwrap();
        assert_eq!(g.edges[0].index, vec![0]);
        assert_eq!(g.edges[1].index, vec![1]);
    }

    #[test]
    fn rejects_unknown_fields_and_ambiguity() {
        assert!(
            parse_graph(r#"{"dimension": 1, "vertices": [], "edges": [], "extra": 1}"#).is_err()
        );
        assert!(
            parse_graph(r#"{"dimension": 1, "vertices": [], "edges": [], "bonds": []}"#).is_err()
        );
        assert!(parse_graph(r#"{"dimension": 1, "vertices": []}"#).is_err());
    }

    #[test]
    fn potential_file() {
        let g = PeriodicGraph::new(&generate(CrystalFamily::Bcc).unwrap()).unwrap();
        assert_eq!(
            parse_potential(r#"{"v1": 0.5}"#, &g).unwrap(),
            vec![0.5, 0.0]
        );
        assert!(parse_potential(r#"{"v9": 1}"#, &g).is_err());
    }

    #[test]
    fn angles_and_paths() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("2pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_angle("3pi/4").unwrap(), 0.75 * PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("tau").is_err());
        let p = parse_path("0,0..pi,pi/2:10").unwrap();
        assert_eq!(p.to, vec![PI, PI / 2.0]);
        assert_eq!(p.steps, 10);
        assert!(parse_path("0..pi").is_err());
        assert!(parse_path("0..pi,0:3").is_err());
    }

    #[test]
    fn csv_marks_flat_bands() {
        let g = PeriodicGraph::new(&generate(CrystalFamily::Fcc).unwrap()).unwrap();
        let b = compute_bands(&g, &[0.0; 4], &BzGrid::new(3, 4).unwrap(), FLAT_TOL).unwrap();
        let csv = bands_csv(&b);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[2], "2,1,1,true,2");
        assert!(lines[1].ends_with(",false,"));
    }
}
