//! Spectral analysis of polynomial neural networks.
//!
//! Closed-form neural tangent kernels for two-layer ReLU networks with and
//! without a multiplicative (Hadamard) interaction layer, their Mercer
//! eigenvalues on the sphere, a small reverse-mode autodiff engine, and
//! runners for spectral-bias experiments.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod autodiff;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod kernels;
pub mod linalg;
pub mod networks;
pub mod quadrature;
pub mod rng;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
