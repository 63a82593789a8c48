//! Penalized Poisson-likelihood reconstruction by sequential separable
//! quadratic approximation (SPIRAL).
//!
//! Given counts `y ~ Poisson(Af⋆)` from a nonnegative linear map `A`, the
//! solver minimizes `F(f) + τ·pen(f)` over `f >= 0`, where `F` is the negative
//! Poisson log-likelihood and `pen` is one of an ℓ1 norm (canonical or in a
//! wavelet basis), total variation, or a recursive dyadic partition
//! complexity.

// `!(x >= 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod denoise;
pub mod error;
pub mod harness;
pub mod likelihood;
pub mod operators;
pub mod signal;
pub mod solver;
mod vecops;

pub use error::{Result, SpiralError};
pub use likelihood::PoissonModel;
pub use signal::Signal;
