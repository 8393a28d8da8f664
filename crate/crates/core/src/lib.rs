//! Minimum-error discrimination of qubit pure states, quantum versus
//! preparation-noncontextual.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: real-plane qubit states, effects, POVMs and the Born rule.
//! - [`analytic`]: closed-form optima and noncontextual bounds for two
//!   states (arbitrary priors) and three mirror-symmetric states.
//! - [`oracle`]: brute-force maximisation of the success functional over
//!   measurements, used to cross-check the closed forms.
//! - [`ontic`]: finite ontological models and the inequalities behind the
//!   noncontextual bounds.
//! - [`advantage`]: the (θ, p) advantage map and its CSV/JSON encodings.

pub mod advantage;
pub mod analytic;
mod error;
pub mod ontic;
pub mod oracle;
pub mod qcore;

pub use error::{Error, Result};
