use std::fmt;

/// Errors produced by coefficient derivation, integration, and analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Node set is empty.
    EmptyNodeSet,
    /// Two collocation nodes closer than the minimum pairwise gap.
    NonDistinctNodes { gap: f64 },
    /// A coefficient solve left a residual too large to trust.
    IllConditioned { residual: f64 },
    /// Step-size ratio q must be positive.
    NonPositiveRatio(f64),
    /// Step-size ratio outside the controller clamp interval.
    RatioOutOfRange { q: f64, lo: f64, hi: f64 },
    /// Dense-output parameter outside [0, 1].
    OutOfRangeXi(f64),
    /// Embedded stage index list is invalid (empty, out of range, repeated, or not a strict subset).
    BadEmbeddedIndices,
    /// Vector lengths do not agree.
    DimensionMismatch { expected: usize, got: usize },
    /// Integration produced a non-finite value (blow-up).
    NonFiniteState { t: f64 },
    /// (t_end - t0)/h is not an integer number of steps.
    GridMismatch,
    /// Too many consecutive step rejections; tolerance unreachable.
    MaxRejections { t: f64 },
    /// Reference solver could not reach the requested accuracy.
    ToleranceUnreachable { est: f64 },
    /// Starting procedure failed to produce accurate stage values.
    OracleFailure { est: f64 },
    /// Operation requires a problem with a closed-form solution.
    MissingExactSolution,
    /// Eigenvalue iteration did not converge.
    NoConvergence,
    /// Method name not in the registry.
    UnknownMethod(String),
    /// Problem name not in the registry.
    UnknownProblem(String),
    /// Bad configuration value.
    InvalidConfig(String),
    /// Malformed input document.
    ParseError(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyNodeSet => write!(f, "node set must contain at least one node"),
            Error::NonDistinctNodes { gap } => {
                write!(
                    f,
                    "collocation nodes are not distinct (min pairwise gap {gap:e})"
                )
            }
            Error::IllConditioned { residual } => {
                write!(f, "coefficient solve residual {residual:e} exceeds tolerance; node set is numerically unusable")
            }
            Error::NonPositiveRatio(q) => write!(f, "step-size ratio must be positive, got {q}"),
            Error::RatioOutOfRange { q, lo, hi } => {
                write!(f, "step-size ratio {q} outside [{lo}, {hi}]")
            }
            Error::OutOfRangeXi(xi) => write!(f, "dense-output parameter {xi} outside [0, 1]"),
            Error::BadEmbeddedIndices => write!(f, "invalid embedded stage index list"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NonFiniteState { t } => write!(f, "non-finite state at t = {t}"),
            Error::GridMismatch => write!(f, "(t_end - t0)/h must be an integer step count"),
            Error::MaxRejections { t } => {
                write!(f, "too many consecutive step rejections at t = {t}")
            }
            Error::ToleranceUnreachable { est } => {
                write!(f, "reference solver stalled at estimated error {est:e}")
            }
            Error::OracleFailure { est } => {
                write!(f, "starting procedure error estimate {est:e} above target")
            }
            Error::MissingExactSolution => write!(f, "problem has no closed-form solution"),
            Error::NoConvergence => write!(f, "eigenvalue iteration did not converge"),
            Error::UnknownMethod(name) => write!(f, "unknown method '{name}'"),
            Error::UnknownProblem(name) => write!(f, "unknown problem '{name}'"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::ParseError(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
