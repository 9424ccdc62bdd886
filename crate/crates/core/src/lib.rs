//! Numerical workbench for the extended Harper's model.
//!
//! The crate is organised by object: continued fractions of the frequency,
//! trigonometric products along the rotation orbit, the coupling-space
//! geometry of the model, its cocycles and Lyapunov exponents, finite
//! truncation spectra, and the boundary Fourier coefficients used to exclude
//! point spectrum. [`verify`] bundles the acceptance suite.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cocycles;
pub mod contfrac;
pub mod error;
pub mod esproducts;
pub mod fourier;
pub mod model;
pub mod spectra;
pub mod util;
pub mod verify;

pub use error::{Error, Result};
pub use model::Coupling;
