//! Finite laboratory for weak equivalence of group actions.
//!
//! The crate builds the congruence quotients `SL_d(Z/nZ)`, their translation
//! actions by a finitely generated subgroup of `SL_d(Z)`, and the statistics
//! used to compare actions up to weak equivalence: W-vectors, the sup and
//! Hausdorff metrics, step functions on products and their φ-convolutions.
//! On top of that sit the expansion diagnostics (vertex boundary, Cheeger
//! constant, spectral gap), convolution mixing checks for quasirandom groups,
//! and the step-function experiment on `G_n × G_m` in [`steplab`].
//!
//! All W statistics are exact: counts over a common denominator, compared
//! as rationals. Floating point appears only in search heuristics, spectral
//! estimates and mixing checks.

pub mod action;
pub mod error;
pub mod expansion;
pub mod group;
pub mod quasirandom;
pub mod rational;
pub mod steplab;
pub mod wstat;

mod unionfind;

pub use action::{FiniteAction, OrbitPartition, Provenance};
pub use error::{Error, Result};
pub use expansion::{CheegerValue, ExpansionReport};
pub use group::{FiniteGroup, GeneratorSet, IntMatrix, ModMatrix};
pub use quasirandom::GroupFunction;
pub use rational::Q;
pub use steplab::{DiscontinuityReport, ExperimentConfig, ProductStepFunction};
pub use wstat::{Partition, PhiTable, WSetSample, WVector};

/// Crate version embedded in every emitted report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
