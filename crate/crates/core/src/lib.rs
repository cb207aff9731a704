//! Ontological models of prepare-and-measure quantum fragments.
//!
//! The crate is layered: [`quantum`] holds the Hilbert-space side (matrices,
//! states, POVMs, fragments), [`prob`] the finite probability calculus,
//! [`onto`] the model representation with its verifiers and classifiers,
//! [`models`] the concrete built-in models, [`antidist`] the
//! antidistinguishing-measurement constructions and [`chained`] the chained
//! Bell correlations. [`cli`] drives everything from the `ontokit` binary.

pub mod antidist;
pub mod chained;
pub mod cli;
pub mod error;
mod exact;
pub mod models;
pub mod onto;
pub mod prob;
pub mod quantum;
pub mod report;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Default tolerance for POVM, orthogonality and reproduction residuals.
pub const POVM_TOL: f64 = 1e-10;
/// Default tolerance for arithmetic identities.
pub const ARITH_TOL: f64 = 1e-12;
/// Weights at or below this are treated as exact zeros by support predicates.
pub const ZERO_WEIGHT: f64 = 1e-15;
/// Overlap at or below this counts as "D = 1" for ontological distinctness.
pub const DISTINCT_TOL: f64 = 1e-12;
