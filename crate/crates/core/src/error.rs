//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters or options (rejected before any computation runs).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A coordinate point or radius lies outside the region where the
    /// requested quantity is defined (horizon, axis, r <= alpha, ...).
    #[error("outside valid domain: {0}")]
    Domain(String),

    /// An operation that assumes an equatorial state got a non-equatorial one.
    #[error(
        "state is not equatorial: |theta - pi/2| = {dtheta:.3e}, |theta_dot| = {theta_dot:.3e}"
    )]
    NonEquatorial { dtheta: f64, theta_dot: f64 },

    /// A tetrad failed the orthonormality check.
    #[error("frame is not orthonormal: max inner-product residual {residual:.3e}")]
    Frame { residual: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
