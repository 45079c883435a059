//! Half-space, simplicial and band depth for laws on coordinate sequences.
//!
//! Depth values come with certificates: Markov witnesses for zero depth,
//! Paley–Zygmund and Rademacher-sum constants for positive lower bounds, and
//! Kakutani products for admissible translates. The empirical modules show
//! the sample estimators collapsing to zero where the true depth is positive.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissibility;
pub mod analytic;
pub mod bounds;
pub mod empirical;
pub mod error;
mod export;
pub mod models;
pub mod montecarlo;
pub mod quadrature;
pub mod series;
pub mod simplicial;
pub mod special;

pub use error::{DepthError, Result};
