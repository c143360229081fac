use thiserror::Error;

/// Errors produced by graph construction, linear algebra and solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("zero-length edge `{0}`")]
    ZeroLengthEdge(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("degenerate embedding: {0}")]
    DegenerateEmbedding(String),
    #[error(
        "oriented edges are not incident (terminus of the first must be the origin of the second)"
    )]
    NotIncident,
    #[error("backtracking pair has no turning angle")]
    BacktrackPair,
    #[error("edge `{0}` is not isoradial: half-rhombus angle falls outside (0, pi/2)")]
    NotIsoradial(String),
    #[error("invalid weight {0}: high-temperature weights must lie in [0, 1] and couplings must be positive")]
    InvalidWeight(f64),
    #[error("{0}")]
    TooLarge(String),
    #[error("sign tracking ambiguous: {0}")]
    SignAmbiguous(String),
    #[error("no admissible Kasteleyn orientation: {0}")]
    NoOrientation(String),
    #[error("bracketing failed: {0}")]
    BracketFailure(String),
    #[error("non-positive determinant sample at (theta, eta) = ({theta}, {eta}): {value}")]
    NonPositiveSample { theta: f64, eta: f64, value: f64 },
    #[error("unknown example `{0}`")]
    UnknownExample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
