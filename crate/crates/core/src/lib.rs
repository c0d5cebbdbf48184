//! Thresholded Laplace count release for smart-card tap data, together with
//! the adversarial analyses that can be run against it.
//!
//! The crate is organised around the life of a released count:
//!
//! - [`synth`] builds deterministic transit scenarios and their raw tap events.
//! - [`mechanism`] counts attribute combinations exactly and privatizes them,
//!   either with the zero-skipping release (zero counts are published as an
//!   exact 0) or with the corrected release that perturbs every cell.
//! - [`audit`] computes the exact output distribution of a released count and
//!   the resulting (ε, δ) curve for neighbouring counts.
//! - [`attacks`] recovers the noise scale from paired counts, estimates
//!   suppressed cells from independently released marginals, and flags
//!   outputs that prove presence.
//! - [`distributions`] holds the Laplace primitives and scale estimators the
//!   rest of the crate builds on.
//! - [`cli`] wires all of the above into the `tapaudit` binary.
//!
//! ```
//! use tapaudit::audit::{audit_pair, default_epsilon_grid};
//! use tapaudit::distributions::NoiseScale;
//! use tapaudit::mechanism::ReleaseConfig;
//!
//! let config = ReleaseConfig::new(NoiseScale::new(1.4).unwrap(), 18.0, true, true, 0).unwrap();
//! let result = audit_pair(1, 0, &config, &default_epsilon_grid()).unwrap();
//! assert!(result.pure_dp_violation_witness.is_some());
//! ```

pub mod attacks;
pub mod audit;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod mechanism;
mod optimize;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
