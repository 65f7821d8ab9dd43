use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("insufficient precision: {have} bits available, {needed} bits required")]
    InsufficientPrecision { needed: u32, have: u32 },
    #[error("theta value of {label} vanishes numerically (|theta| ~ 2^{log2_abs:.1})")]
    VanishingTheta { label: String, log2_abs: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
