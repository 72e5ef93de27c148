//! Numerical tunneling-time laboratory.
//!
//! Group delay, dwell time and stored energy of waves crossing quantum and
//! photonic barriers, computed from stationary solutions and cross-checked in
//! the time domain.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod photonic;
pub mod quantum;
pub mod spectral;
pub mod timedomain;

pub use error::{Error, Result};
