//! Limiting spectral law of the singular values of a lag-`s` sample
//! auto-covariance matrix
//! `X_T = (1/T) Σ_{t=s+1}^{s+T} ε_t ε_{t-s}ᵀ`, studied through the Gram
//! matrix `A_T = X_T X_Tᵀ` as `p, T → ∞` with `p/T → y`.
//!
//! The law is computed along independent routes that check each other:
//!
//! * [`combinatorics`] counts admissible characteristic sequences (brute
//!   force, closed form, and coupled recursions);
//! * [`moments`] produces the exact limiting moments `m_k(y)` three ways;
//! * [`spectral`] solves the cubic Stieltjes equation for the density, the
//!   CDF and the support endpoints;
//! * [`matrix_lab`] simulates the actual matrices with an in-repo symmetric
//!   eigensolver;
//! * [`acceptance`] bundles the end-to-end checks.

pub mod acceptance;
pub mod combinatorics;
pub mod error;
pub mod matrix_lab;
pub mod moments;
pub mod spectral;

pub use error::{Error, Result};
