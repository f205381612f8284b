//! Error types shared across the crate. Each functional area gets its own
//! enum so callers can match on the failures they can actually handle.

use thiserror::Error;

/// Failure to parse a rational literal (`"p/q"`, integer, or decimal string).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Invalid ensemble specification.
#[derive(Debug, Error)]
pub enum SpecError {
    #[error("delta must be nonnegative, got {0}")]
    NegativeDelta(String),
    #[error("component {index}: gamma must be >= 1, got {gamma}")]
    GammaTooSmall { index: usize, gamma: String },
    #[error("component {index}: alpha must be nonzero")]
    ZeroAlpha { index: usize },
    #[error("components must be ordered with strictly decreasing |alpha| (violated between components {0} and {1})")]
    AlphaOrder(usize, usize),
    #[error("spec has no Gaussian part and no components")]
    Empty,
    #[error("cumulant of order {order} is negative: {value}")]
    NegativeCumulant { order: u32, value: String },
    #[error(transparent)]
    ParseRational(#[from] ParseRationalError),
    #[error("invalid spec JSON: {0}")]
    Json(String),
}

/// Errors from exact enumeration routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CombinatoricsError {
    #[error("enumeration at M = {m} exceeds the cap M <= {cap}")]
    EnumerationTooLarge { m: u32, cap: u32 },
    #[error("need cumulants up to order {needed}, only {available} available")]
    MissingCumulants { needed: u32, available: u32 },
    #[error("ballot walk length must be positive")]
    ZeroLength,
    #[error("start height {y0} not reachable to 0 in {len} steps with steps >= -1")]
    UnreachableEndpoint { y0: u32, len: u32 },
}

/// Errors from the edge-parameter and quadrature machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EdgeError {
    #[error("evaluation at z = {z} hits a pole of the transform")]
    PoleEvaluation { z: String },
    #[error("no sign change found when bracketing the critical point")]
    NoSignChange,
    #[error("quadrature did not converge within {max_nodes} nodes (last relative change {last_change:e})")]
    NoConvergence { max_nodes: u32, last_change: f64 },
    #[error("edge hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("single-saddle asymptotics do not apply to a pure Gaussian spec (two symmetric saddles)")]
    PureGaussian,
}

/// Errors from the symmetric-operator expansion engine.
#[derive(Debug, Error)]
pub enum DunklError {
    #[error("operator expansion limited to N <= {cap_n}, M <= {cap_m} (requested N = {n}, M = {m})")]
    LimitExceeded { n: u32, m: u32, cap_n: u32, cap_m: u32 },
    #[error("term budget of {budget} monomial/signature pairs exceeded")]
    TermBudgetExceeded { budget: usize },
    #[error("theta must be positive, got {0}")]
    InvalidTheta(String),
    #[error("expansion to order {needed} needs cumulants up to kappa_{needed}, have {have}")]
    MissingCumulants { needed: u32, have: u32 },
    #[error("unsupported walk-functional signature: {0}")]
    UnsupportedSignature(String),
    #[error("classification mismatches:\n{0}")]
    MismatchReport(String),
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

/// Errors from samplers, matrix models, and Monte Carlo drivers.
#[derive(Debug, Error)]
pub enum StochasticsError {
    #[error("step-law tail not below {tol:e} within {cap} support points")]
    TailTruncation { tol: f64, cap: usize },
    #[error("step law has negative probability p[{step}] = {value:e}")]
    NegativeProbability { step: i64, value: f64 },
    #[error("variance guard: exponent coefficient {coefficient} exceeds {limit}")]
    VarianceGuard { coefficient: f64, limit: f64 },
    #[error("eigensolver failed to converge at index {0}")]
    EigenNoConvergence(usize),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("ensemble not realizable by this sampler: {0}")]
    UnsupportedEnsemble(String),
    #[error("conditioned-walk table is degenerate: no admissible path (M = {m})")]
    DegenerateBridge { m: u32 },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Edge(#[from] EdgeError),
}
