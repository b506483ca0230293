//! Error type shared across the crate.

use thiserror::Error;

/// Errors raised by validation and numerical routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Input lies outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument violates a precondition that is not a domain restriction.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Initial compartment values do not describe a usable epidemic state.
    #[error("invalid initial condition: {0}")]
    InvalidInitialCondition(String),

    /// The threshold M falls outside the window I(0) < M < S(0) + I(0).
    #[error("invalid threshold: {0}")]
    InvalidThreshold(String),

    /// The closed-form peak only holds for R0 >= N/S(0); caller asked for it
    /// outside that regime.
    #[error("regime error: {0}")]
    Regime(String),

    /// A requested range is malformed or outside its admissible window.
    #[error("invalid range: {0}")]
    InvalidRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
