use thiserror::Error;

/// Errors produced by the numerical routines.
///
/// Variants split into two families: input problems (bad parameters, values
/// outside the declared domain) and numerical failures (non-convergence,
/// failed brackets, audit failures). The CLI maps them to different exit
/// codes through [`Error::is_numerical`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("parameter {lambda} lies outside [{lo}, {hi}]")]
    OutOfParameterRange { lambda: f64, lo: f64, hi: f64 },

    #[error("evaluator returned a non-finite value ({what})")]
    NonFinite { what: String },

    #[error("symbol {symbol} is outside the alphabet 1..={alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },

    #[error("word id {id} out of range for {count} cylinders")]
    WordIdOutOfRange { id: usize, count: usize },

    #[error("cylinder space {alphabet}^{depth} exceeds the cap of {cap} cells")]
    DepthCap { alphabet: usize, depth: usize, cap: usize },

    #[error("enumeration of {alphabet}^{n} words exceeds the cap")]
    EnumerationCap { alphabet: usize, n: usize },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("eigenvector is identically zero")]
    ZeroEigenvector,

    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("singular recursion denominator at n = {n} ({value:e})")]
    SingularDenominator { n: usize, value: f64 },

    #[error("probability audit failed: {0}")]
    ProbabilityAudit(String),

    #[error("support mismatch at cylinder {witness}")]
    SupportMismatch { witness: String },

    #[error("no admissible half-width: {0}")]
    NoHalfwidth(String),

    #[error("multiplicity {count} > 2 at x = {point}")]
    Multiplicity { point: f64, count: usize },

    #[error("estimator failure: {0}")]
    Estimator(String),
}

impl Error {
    /// True for failures of a numerical method, false for bad inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::NonConvergence { .. }
                | Error::ZeroEigenvector
                | Error::BracketFailure(_)
                | Error::SingularDenominator { .. }
                | Error::ProbabilityAudit(_)
                | Error::SupportMismatch { .. }
                | Error::NoHalfwidth(_)
                | Error::Estimator(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
