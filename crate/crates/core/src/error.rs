use num_complex::Complex64;
use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Malformed arguments: bad labels, mismatched conventions, out-of-range indices.
    #[error("invalid input: {0}")]
    Input(String),

    /// An operation needed a nonzero vector and got (numerically) zero.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Pre- and post-selected states are (nearly) orthogonal, so the weak value is undefined.
    #[error("anomalous selection: overlap {overlap} is below the threshold")]
    AnomalousSelection { overlap: Complex64 },

    /// A scenario parameter sits on a boundary where the construction breaks down.
    #[error("degenerate scenario: {0}")]
    DegenerateScenario(String),

    /// The constraint system has only the trivial solution.
    #[error("infeasible targets: {0}")]
    Infeasible(String),

    /// Every solution of the constraint system is orthogonal to the pre-selected state.
    #[error("vacuous selection: every candidate post-state is orthogonal to the pre-state")]
    VacuousSelection,

    /// A circuit is structurally invalid (unbound output, bad addressing, ...).
    #[error("circuit configuration: {0}")]
    Configuration(String),

    /// No beam-splitter setting realizes the requested post-selection.
    #[error("calibration failed: best residual {residual:e}")]
    CalibrationFailed { residual: f64 },

    /// Text input failed to parse.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
