use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the crate. Variant names are part of the CLI
/// contract: domain errors are reported by name with exit status 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ZeroNorm: wavefunction norm is zero")]
    ZeroNorm,
    #[error("GridMismatch: operands live on different grids")]
    GridMismatch,
    #[error("InvalidGrid: {0}")]
    InvalidGrid(String),
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
    #[error("PathTooShort: a path needs at least 2 samples, got {0}")]
    PathTooShort(usize),
    #[error("OutOfTable: potential queried at x = {x} outside [{min}, {max}]")]
    OutOfTable { x: f64, min: f64, max: f64 },
    #[error("NonFinite: {0}")]
    NonFinite(String),
    #[error("GridTooCoarse: dx^2 = {dx2:e} exceeds pi*hbar*eps/m = {limit:e}")]
    GridTooCoarse { dx2: f64, limit: f64 },
    #[error("UnsupportedPotential: no closed-form kernel for {0} potentials")]
    UnsupportedPotential(&'static str),
    #[error("BranchCount: expected 2 branches, got {0}")]
    BranchCount(usize),
    #[error("TargetBelowInitial: target width {target:e} is below the initial width {initial:e}")]
    TargetBelowInitial { target: f64, initial: f64 },
    #[error("InsufficientTrials: need at least {min} trials, got {got}")]
    InsufficientTrials { got: usize, min: usize },
}

impl Error {
    /// Stable short name used by the CLI when reporting domain errors.
    pub fn name(&self) -> &'static str {
        match self {
            Error::ZeroNorm => "ZeroNorm",
            Error::GridMismatch => "GridMismatch",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::PathTooShort(_) => "PathTooShort",
            Error::OutOfTable { .. } => "OutOfTable",
            Error::NonFinite(_) => "NonFinite",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::UnsupportedPotential(_) => "UnsupportedPotential",
            Error::BranchCount(_) => "BranchCount",
            Error::TargetBelowInitial { .. } => "TargetBelowInitial",
            Error::InsufficientTrials { .. } => "InsufficientTrials",
        }
    }
}
