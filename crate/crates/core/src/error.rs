use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid director frame: {0}")]
    InvalidFrame(String),

    #[error("grid has {nodes} nodes, at least {required} are required")]
    InsufficientGrid { nodes: usize, required: usize },

    #[error("orientation constraint violated: third tangent component {v3} is not positive")]
    Orientation { v3: f64 },

    #[error("tensor `{name}` is not symmetric positive definite ({detail})")]
    NotPositiveDefinite { name: &'static str, detail: String },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("missing context: {0}")]
    MissingContext(&'static str),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("input history kind mismatch: expected {expected}, got {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("current-strain viscosity mu is zero; use the mu = 0 creep path")]
    ViscosityZero,

    #[error("current-strain viscosity mu = {0} is nonzero; this path requires mu = 0")]
    ViscosityNonZero(f64),

    #[error("singular linear system: {0}")]
    Singular(&'static str),

    #[error("integration failed to converge at t = {t} (step {step}): {detail}")]
    NonConvergence { t: f64, step: f64, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
