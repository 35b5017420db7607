// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("normal dispersion (D2 = {d2}); soliton runs require D2 > 0")]
    NormalDispersion { d2: f64 },

    #[error("mode index {l} outside [-{half}, {half}]")]
    ModeIndex { l: i64, half: i64 },

    #[error("grid of {grid} points cannot resolve {modes} modes")]
    Resolution { grid: usize, modes: usize },

    #[error("integration diverged at step {step}{}", trajectory.map(|t| format!(" (trajectory {t})")).unwrap_or_default())]
    Divergence {
        step: u64,
        trajectory: Option<usize>,
    },

    #[error("field did not converge: {0}")]
    NonConvergence(String),

    #[error("more than one soliton found ({peaks} contrast peaks above half maximum)")]
    MultiSoliton { peaks: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate density: mean density {mean} is not positive")]
    DegenerateDensity { mean: f64 },

    #[error("no decay signal: {0}")]
    NoSignal(String),

    #[error("only {found} comb peaks above the prominence threshold (need 3)")]
    InsufficientComb { found: usize },

    #[error("sampling interval {interval} aliases the comb (limit {limit})")]
    Aliasing { interval: f64, limit: f64 },

    #[error("hash mismatch: expected {expected}, found {found}")]
    HashMismatch { expected: String, found: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the `simulate` front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ParameterDomain(_)
            | Error::NormalDispersion { .. }
            | Error::ModeIndex { .. }
            | Error::Resolution { .. }
            | Error::Config(_)
            | Error::HashMismatch { .. }
            | Error::Aliasing { .. } => 2,
            Error::Divergence { .. } | Error::NonConvergence(_) | Error::MultiSoliton { .. } => 3,
            Error::NoSignal(_)
            | Error::InsufficientComb { .. }
            | Error::InsufficientData(_)
            | Error::DegenerateDensity { .. } => 4,
            Error::Format(_) | Error::Io(_) => 5,
        }
    }
}

impl From<bincode::Error> for Error {
    fn from(e: bincode::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Config(e.to_string())
    }
}
