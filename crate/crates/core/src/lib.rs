//! Spectra of the normalized Laplacian and of Schrödinger operators on
//! `Z^d`-periodic graphs, computed fiber by fiber.

pub mod band;
pub mod catalog;
pub mod error;
pub mod estimates;
pub mod fiber;
pub mod graph;
pub mod io;
pub mod linalg;

pub use error::{Error, Result};
