use thiserror::Error;

/// Errors produced by the discretization, assembly and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid user input (mesh sizes, degrees, penalties, mismatched data).
    #[error("invalid input: {0}")]
    Input(String),

    /// A numerical construction failed (quadrature, eigen-solve, ...).
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// No weight satisfies the requested coercivity bound.
    #[error("coercivity target infeasible: {0}")]
    Infeasible(String),

    /// A per-slab linear solve failed or missed its residual tolerance.
    #[error("slab {slab}: {reason} (condition estimate {condition:.3e})")]
    Solver {
        slab: usize,
        reason: String,
        condition: f64,
    },

    /// A configuration entry failed to parse or validate.
    #[error("config{}: {message}", line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
