//! Finite-section analysis of the block covariance operators of locally
//! stationary multivariate time series.
//!
//! The crate builds windows of the doubly infinite covariance operator
//! `C = (C_{t,τ})` of a parametric process, inverts and approximates them,
//! extracts time-varying autoregressive coefficients and partial
//! covariances, and measures how far each quantity sits from its frozen
//! (stationary) counterpart.
//!
//! Lag convention used throughout: the local autocovariance `C_r(u)` is the
//! block the frozen operator carries at `(t, t - r)`, so
//! `C^{(N)}_{t,τ} ≈ C_{t-τ}(t/N)`, and the local spectral density is
//! `f(ω;u) = Σ_r C_r(u) e^{-irω}` (no `1/2π`).

// `!(x < y)` is used on purpose so that NaN takes the failing branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_harness;
pub mod error;
pub mod exec;
pub mod inverse_analysis;
pub mod models;
pub mod operator_core;
pub mod partial_cov;
pub mod var_extraction;

pub use error::{Error, Result};
pub use operator_core::{BandedBlockWindow, BlockWindow, EigRange};
