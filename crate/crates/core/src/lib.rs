//! Characteristic-function stability toolkit.
//!
//! The crate provides an exactly-evaluable algebra of finite Gaussian-mixture
//! laws ([`dist`]), characteristic-function machinery and dependence metrics
//! ([`charfn`]), quadrature-backed information quantities ([`info`]), a
//! constructive stability engine for Cauchy's functional equation ([`cauchy`]),
//! Gaussian-surrogate fitting with certified error constants ([`surrogate`]),
//! and soft-doubling capacity audits for additive-Gaussian-noise channels
//! ([`agn`]).
//!
//! All numerical kernels are generic over the scalar type through [`Scalar`];
//! the concrete aliases below fix `f64` as the working precision.

pub mod agn;
pub mod cauchy;
pub mod charfn;
pub mod dist;
pub mod info;
pub mod linalg;
pub mod surrogate;

use nalgebra::RealField;
use num_traits::FromPrimitive;

/// Scalar field the numerical kernels are generic over.
///
/// `f32` and `f64` both satisfy the bound; every tolerance in the crate is
/// stated for `f64`, so `f32` instantiations are only useful for smoke tests.
pub trait Scalar: RealField + FromPrimitive + Copy {
    /// Lossy conversion from `f64`, used for literals and tolerances.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal conversion")
    }
}

impl<T: RealField + FromPrimitive + Copy> Scalar for T {}

/// Working precision used by the CLI and the test suite.
pub type Real = f64;
/// Probability law over `R^d` at working precision.
pub type Dist = dist::Distribution<Real>;
/// Coupled pair of random vectors at working precision.
pub type Pair = dist::JointPair<Real>;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("matrix is not a covariance: {0}")]
    NotCovariance(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("no density available: {0}")]
    NoDensity(String),
    #[error("branch of the logarithm lost: {0}")]
    BranchLost(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("all grid points below the floor")]
    AllBelowFloor,
    #[error("quadrature box captures too little mass: {captured}")]
    MassDeficit { captured: f64 },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("function is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error("fit audit failed: {0}")]
    AuditFailed(String),
    #[error("dependence level exceeds the admissible threshold: {eps} > {threshold}")]
    ThresholdExceeded { eps: f64, threshold: f64 },
    #[error("characteristic-function floor hit zero on the audit ball; shrink the radius")]
    PFloorZero,
    #[error("degenerate doubling anchor: |Phi(t0)| = {0}")]
    DegenerateAnchor(f64),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("empty high-probability letter set")]
    EmptyS,
    #[error("candidate invalid: {0}")]
    InvalidCandidate(String),
    #[error("extremal challenge violated by candidate {index}: value {value} > cap {cap}")]
    ChallengeViolation { index: usize, value: f64, cap: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<V> = std::result::Result<V, Error>;
