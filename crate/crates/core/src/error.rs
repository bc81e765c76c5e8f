use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the numerical routines.
///
/// Payloads are reported as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("root isolation could not certify separation: {0}")]
    Degenerate(String),

    #[error("all weight-function derivatives vanish at z = {z}")]
    AllDerivativesVanish { z: f64 },

    #[error("z = {z} is not covered by the admissible region")]
    NotCovered {
        z: f64,
        /// Open intervals of the region, infinite endpoints included.
        region: Vec<(f64, f64)>,
    },

    #[error("z = {z} lies on the region boundary {endpoint}")]
    BoundaryPoint { z: f64, endpoint: f64 },

    #[error("z = {z} is not interior to any admissible interval")]
    ZOutsideRegion { z: f64 },

    #[error("support points are singular: {0}")]
    SingularSupport(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}
