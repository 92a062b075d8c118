//! Simulation and verification of inhomogeneous continuum random trees.
//!
//! The crate covers both sides of the correspondence between p-trees and
//! ICRTs: excursions of exchangeable-increment bridges and their reflected
//! versions ([`paths`], [`yprocess`]), breadth-first and depth-first p-tree
//! constructions ([`ptree`]), the line-breaking construction and reduced
//! trees ([`icrt`]), and the statistical machinery used to compare them
//! ([`stats`], [`suites`]).

pub mod error;
pub mod icrt;
pub mod paths;
pub mod ptree;
pub mod rng;
pub mod stats;
pub mod suites;
pub mod yprocess;

pub use error::{Error, Result};
pub use paths::{CadlagPath, Knot, Theta};
pub use rng::RngState;
