//! Set-membership conjugate-gradient (SM-CG) LCMV beamforming.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: complex vector helpers and a Hermitian matrix carrier.
//! - [`array_model`]: uniform linear array steering vectors and snapshot generation.
//! - [`smcg`]: the data-selective CG beamformer with its variable forgetting factor.
//! - [`bounds`]: fixed, parameter-dependent and parameter-and-interference-dependent bounds.
//! - [`baselines`]: MVDR oracle and full-rate constrained SG / RLS / CG beamformers.
//! - [`metrics`]: output SINR, update-rate accounting and arithmetic-complexity counts.
//! - [`harness`]: experiment configuration, presets, Monte-Carlo execution and CSV output.

pub mod array_model;
pub mod baselines;
pub mod bounds;
mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod smcg;

pub use error::{Error, Result};
pub use linalg::{ComplexVector, HermitianMatrix};
pub use num_complex::Complex64;
