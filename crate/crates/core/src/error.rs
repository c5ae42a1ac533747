//! Crate-wide error type.

use crate::markov::GeneratorReport;

/// Errors produced by construction, numerical routines, and experiment drivers.
///
/// Diagnostic payloads are reported as `f64` regardless of the scalar type the
/// computation ran in.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A matrix entry was negative where a probability was required.
    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    /// A row of a stochastic matrix does not sum to one within tolerance.
    #[error("row {row} sums to 1{deviation:+e}, outside tolerance")]
    RowSumViolation { row: usize, deviation: f64 },

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A reward function is constant, so the family it would generate is degenerate.
    #[error("reward function is constant")]
    ConstantReward,

    /// The transition matrix is not irreducible.
    #[error("matrix is not irreducible")]
    NotIrreducible,

    /// The matrix is neither irreducible nor of the zero-column block shape
    /// handled by the eigenproblem solver.
    #[error("matrix structure unsupported by the Perron-Frobenius solver")]
    StructureUnsupported,

    /// Power iteration exhausted its budget before meeting the residual target.
    #[error("eigenproblem did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },

    /// The generator pair fails one of the family conditions.
    #[error("generator conditions violated: {report}")]
    GeneratorConditions { report: GeneratorReport },

    /// A probability vector is invalid (wrong length, negative mass, bad sum,
    /// or zero mass where positive mass is required).
    #[error("invalid distribution: {reason}")]
    InvalidDistribution { reason: String },

    /// A mean argument lies outside the admissible range.
    #[error("mean {value} outside admissible range ({min}, {max})")]
    MeanOutOfRange { value: f64, min: f64, max: f64 },

    /// An empirical quantity was requested before any sample supports it.
    #[error("not enough samples")]
    InsufficientSamples,

    /// No single arm attains the maximal mean.
    #[error("no unique best arm")]
    NoUniqueBest,

    /// Observed data contains a transition carrying zero probability under a
    /// model it is being scored against.
    #[error("transition ({from} -> {to}) has zero probability under the model")]
    SupportMismatch { from: usize, to: usize },

    /// Reward values do not live on a common rational lattice of bounded
    /// denominator, so exact tail enumeration is unavailable.
    #[error("rewards are not representable on a rational lattice with denominator <= {max_denom}")]
    RewardsNotLatticed { max_denom: u64 },

    /// The exact tail recursion would need more lattice cells than permitted.
    #[error("tail recursion needs {cells} lattice cells (limit {limit})")]
    StateSpaceTooLarge { cells: usize, limit: usize },

    /// A strategy run hit the sample cap before stopping.
    #[error("run exceeded the sample cap of {cap}")]
    Timeout { cap: u64 },

    /// A configuration document failed to parse.
    #[error("config parse error: {0}")]
    Parse(String),

    /// A configuration document parsed but failed validation.
    #[error("invalid config field `{field}`: {reason}")]
    Validation { field: String, reason: String },

    /// An I/O failure while reading configs or writing reports.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
