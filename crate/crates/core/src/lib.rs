//! Sharp constants of Bernstein–Nikolskii inequalities for trigonometric
//! polynomials and entire functions of exponential type.

// Negated comparisons double as NaN rejection.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod bandlimited;
pub mod body;
pub mod constants;
pub mod error;
pub mod exponent;
pub mod grid;
pub mod levitan;
pub mod quadrature;
pub mod trigpoly;

pub use bandlimited::{
    norm_lp_truncated, BandLimitedFunction, Decay, DecayKind, RealDomainNormEstimate,
    TruncationConfig,
};
pub use body::{ConvexBody, LatticeSet, Shape};
pub use constants::{
    optimize_sharp_constant, EstimateKind, OptimizerConfig, SharpConstantEstimate,
};
pub use error::{Error, Result};
pub use exponent::Exponent;
pub use trigpoly::{
    norm_lp, random_polynomial, DifferentialOperator, NormEstimate, TrigPolynomial,
};
