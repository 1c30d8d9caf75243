//! Simulation and analysis toolkit for a two-cavity, one-mechanical-mode
//! electromechanical entanglement source.
//!
//! * [`gaussian`]: two-mode covariance matrices and entanglement/discord measures.
//! * [`model`]: drive bookkeeping, stability, input-output scattering and the
//!   filtered output-field covariance matrix.
//! * [`lab`]: a synthetic detection chain (amplifier noise, calibration,
//!   quadrature sampling and covariance estimation).

pub mod constants;
pub mod error;
pub mod gaussian;
pub mod lab;
pub mod model;
pub mod quadrature;

pub use error::{Error, ErrorClass, Result};
pub use gaussian::{CovMat4, EntanglementReport, Quadrature, TmstParams};
