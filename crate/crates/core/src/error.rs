use alloc::string::String;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is singular")]
    Singular,
    #[error("map is parabolic or elliptic")]
    ParabolicOrElliptic,
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(&'static str),
    #[error("series diverges (lambda1 estimate {lambda1:.6} after {levels} levels)")]
    Diverging { lambda1: f64, levels: usize },
    #[error("lost track during continuation at t = {t:.6}")]
    LostTrack { t: f64 },
    #[error("tracked boundary word became non-loxodromic at t = {t:.6}")]
    NonLoxodromic { t: f64 },
    #[error("square-root branch point hit")]
    BranchAmbiguity,
    #[error("fixed-point iteration did not converge")]
    NoConvergence,
    #[error("pressure does not change sign on the search bracket")]
    NoSignChange,
    #[error("loop is not closed")]
    NotClosed,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;
