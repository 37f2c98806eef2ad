//! Selective classification with learned uncertainty scores.
//!
//! The crate provides reject-option solvers on discrete risk distributions,
//! risk-coverage evaluation, a bundle-method solver for regularized risk
//! minimization, linear base classifiers, the SELE/REG/TCP uncertainty
//! scores and an experimental protocol with rank statistics.

pub mod bench;
pub mod dataio;
pub mod dataset;
pub mod error;
pub mod loss;
pub mod metrics;
pub mod models;
pub mod numeric;
pub mod optimize;
pub mod rejection;
pub mod rng;
pub mod scores;

pub use dataset::{Dataset, Features, Row};
pub use error::{Error, Result};
pub use loss::LossSpec;
pub use rng::Rng;
