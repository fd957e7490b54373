//! Vector-valued hypergraph decompositions over labelled complexes.
//!
//! The crate models a decomposition problem as a labelled complex `Φ`, a
//! permutation group `Σ` on its labels, a vector system `γ` describing what a
//! single embedded copy contributes, and a target vector `G`. On top of that it
//! provides orbit and atom machinery, exact lattice membership tests, small
//! exact solvers and builders for classical design problems.

pub mod applications;
pub mod complex;
pub mod error;
pub mod io;
pub mod lattice;
pub mod solver;
pub mod symmetry;
pub mod vsys;

pub use error::{Error, Result};
