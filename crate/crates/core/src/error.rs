use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unresolved section reference `{0}`")]
    UnresolvedSection(String),
    #[error("root permutation of `{0}` is not a bijection of the alphabet")]
    NotABijection(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("inconsistent alphabet size: {0}")]
    AlphabetMismatch(String),
    #[error("level {level} not supported: {reason}")]
    Level { level: usize, reason: String },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("designated Schur block is singular")]
    SingularBlock,
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not square")]
    NotSquare,
    #[error("measures have different total mass ({0} vs {1})")]
    MassMismatch(f64, f64),
    #[error("point is an indeterminacy point of the map")]
    Indeterminate,
    #[error("orbit hits indeterminacy at step {0}")]
    OrbitIndeterminate(usize),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("division by an identically zero denominator")]
    ZeroDenominator,
    #[error("sample rejection exhausted after {0} attempts")]
    SamplingExhausted(usize),
    #[error("root bracketing failed: {0}")]
    Bracketing(String),
    #[error("exceptional seed point: {0}")]
    ExceptionalSeed(String),
    #[error("complex branch encountered: {0}")]
    ComplexBranch(String),
    #[error("basis mismatch between class and surface")]
    BasisMismatch,
    #[error("invalid surface data: {0}")]
    Surface(String),
    #[error("insufficient data: {0}")]
    Insufficient(String),
}

pub type Result<T> = std::result::Result<T, Error>;
