use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    /// The Möbius table is too short for the requested accuracy.
    #[error("Möbius table holds {available} entries but {needed} are required")]
    Resource { needed: u64, available: u64 },

    /// A table or precision budget above the configured ceiling.
    #[error("resource limit exceeded: {0}")]
    Limit(String),

    /// The direct method would need more working precision than allowed.
    #[error("{0}")]
    Precision(String),

    #[error("no sign change of R on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for errors that mean "more memory or precision would fix this".
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::Resource { .. } | Error::Limit(_) | Error::Precision(_)
        )
    }
}
