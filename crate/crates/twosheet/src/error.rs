use thiserror::Error;

/// Errors produced by the computational modules.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// The scaling law violates one of the admissibility inequalities.
    #[error("inadmissible scaling law: {0}")]
    InadmissibleLaw(String),

    /// The supplied limits match no homogenized problem.
    #[error("uncovered regime: {0}")]
    UncoveredRegime(String),

    /// 0 < D < inf requires the limit Q, which was not supplied.
    #[error("limit Q is required when 0 < D < inf but was not supplied")]
    MissingQ,

    /// A root or evaluation point is too close to a tan/cot asymptote.
    #[error("pole proximity: {0}")]
    PoleProximity(String),

    /// Requested more discrete eigenvalues than the grid can provide.
    #[error("resolution too coarse: requested {requested} eigenvalues, grid has {available}")]
    ResolutionTooCoarse { requested: usize, available: usize },

    /// The base spectrum is too short for the requested index.
    #[error("insufficient base spectrum: need index {needed}, have {available} eigenvalues")]
    InsufficientBase { needed: usize, available: usize },

    /// Discrete model geometry is inconsistent.
    #[error("geometry error: {0}")]
    GeometryError(String),

    /// The iterative eigensolver did not reach the residual target.
    #[error("eigensolver failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
