//! Exact and stochastic verification toolkit for beta-ensemble edge
//! statistics.
//!
//! The crate computes moments of beta-ensemble additions along several
//! independent routes — non-crossing partition sums, power-series
//! coefficients, numerical contour quadrature, an exact symbolic operator
//! expansion, and Monte Carlo on random matrices and conditioned walks —
//! and cross-checks the edge asymptotics (critical point, edge location,
//! step-law parameters, saddle-point constants) that tie them together.
//!
//! Everything combinatorial is exact rational arithmetic; everything
//! stochastic is seeded and reproducible.

/// Crate version, exposed for provenance metadata in tool output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod addition;
pub mod ballot;
pub mod brownian;
pub mod cumulants;
pub mod dunkl;
pub mod edge;
pub mod ensemble;
pub mod error;
pub mod exact;
pub mod excursion;
pub mod ks;
pub mod mc;
pub mod moments;
pub mod ncpart;
pub mod series;
pub mod spectra;
pub mod stepdist;
pub mod tridiag;
pub mod voiculescu;
pub mod walkfn;
pub mod walks;

pub use addition::{sample_classical_addition, ClassicalBeta};
pub use cumulants::CumulantSequence;
pub use spectra::{sample_spectrum, SpectrumSample};
pub use tridiag::SymTridiag;
pub use dunkl::{
    classify_against_walks, dunkl_joint_moment, dunkl_moment, DunklExpansion, JumpSignature,
    LowerConvention,
};
pub use edge::EdgeParameters;
pub use ensemble::{Centering, Component, EnsembleSpec};
pub use excursion::BridgeSampler;
pub use mc::McEstimate;
pub use stepdist::StepDistribution;
pub use voiculescu::VoiculescuTransform;
pub use walkfn::FunctionalSignature;
pub use walks::LukasiewiczWalk;
