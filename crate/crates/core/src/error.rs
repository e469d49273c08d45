use thiserror::Error;

use crate::graph::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("quotient not connected")]
    QuotientDisconnected,

    #[error("graph is not a loop graph: bridge {tail} -> {head} is not a loop")]
    NotLoopGraph { tail: String, head: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("potential has {got} entries, graph has {expected} vertices")]
    PotentialLength { expected: usize, got: usize },

    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),

    #[error("grid must be even to include π (got {0} points per axis)")]
    OddGrid(usize),

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (residual {residual:.3e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("lowest eigenvalue of H(0) is degenerate (spacing {spacing:.3e})")]
    DegenerateGroundState { spacing: f64 },

    #[error("effective mass undefined (M singular, condition number {condition:.3e})")]
    SingularMass { condition: f64 },

    #[error("Perron vector has non-positive component {value:.3e}")]
    PerronSign { value: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
