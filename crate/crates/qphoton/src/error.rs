//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid arguments: quantum numbers out of range, parity violations,
    /// non-normalized states, malformed spectra, and similar caller mistakes.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical guard tripped: singular Fisher matrix, unitarity defect
    /// beyond tolerance, cross-check discrepancy between two computation
    /// routes, and similar conditions that indicate an unreliable result.
    #[error("numerical guard: {0}")]
    Numerical(String),

    /// A search or optimizer failed to produce a usable result.
    #[error("search failure: {0}")]
    Search(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
