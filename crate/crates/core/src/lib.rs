//! c-optimal experimental designs for estimating the slope of a polynomial
//! regression without intercept on `[0, a]`.
//!
//! The regression functions are `f(x) = (x, x², …, xⁿ)` and the quantity of
//! interest is the derivative of the regression function at a target point
//! `z`, i.e. `c = f'(z) = (1, 2z, …, n zⁿ⁻¹)`. The crate provides
//!
//! * [`polynomial`]: dense real polynomials, Chebyshev polynomials and
//!   Sturm-sequence root isolation;
//! * [`designs`]: the Chebyshev-point support, the intercept-free Lagrange
//!   basis, closed-form weights and the set of targets for which that design
//!   is optimal;
//! * [`elfving`]: information matrices, the variance functional and an
//!   Elfving-type optimality certificate;
//! * [`oracle`]: independent numerical cross-checks (a grid linear program
//!   and a fixed-support weight optimizer).
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! below fix the scalar to `f64`, which is what the CLI uses.

pub mod designs;
pub mod elfving;
mod error;
pub mod linalg;
pub mod oracle;
pub mod polynomial;
mod scalar;
pub mod simplex;
mod tolerances;

pub use designs::{AdmissibleRegion, Design, DesignProblem, Interval, Location};
pub use elfving::{CertifyOptions, ElfvingCertificate, InfoMatrix, Verdict};
pub use error::{Error, Result};
pub use oracle::{GridSpec, LpDesign, OracleReport, RestrictedSolution};
pub use polynomial::{Poly, RootList};
pub use scalar::Scalar;
pub use tolerances::Tolerances;

pub type Poly64 = Poly<f64>;
pub type Poly32 = Poly<f32>;
pub type RootList64 = RootList<f64>;
pub type Problem64 = DesignProblem<f64>;
pub type Problem32 = DesignProblem<f32>;
pub type Design64 = Design<f64>;
pub type Design32 = Design<f32>;
pub type Region64 = AdmissibleRegion<f64>;
pub type Certificate64 = ElfvingCertificate<f64>;
pub type InfoMatrix64 = InfoMatrix<f64>;
pub type OracleReport64 = OracleReport<f64>;
pub type GridSpec64 = GridSpec;
