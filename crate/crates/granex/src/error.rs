use std::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidInput(String),
    /// The right-hand side has a component outside the range of a singular operator.
    InconsistentSystem {
        /// Relative size of the out-of-range component.
        residual: f64,
    },
    /// Geometry too degenerate to continue (coincident spring endpoints,
    /// non-positive shape determinant, vanishing agitation, ...).
    Degenerate(String),
    /// The integrated state stopped being finite.
    Divergence {
        /// Step index at which a non-finite value first appeared.
        step: usize,
    },
    /// A numerical routine could not reach its accuracy target.
    Accuracy(String),
    /// A density that must be strictly monotone on its support is not.
    NonMonotone,
    /// A user-supplied closure broke its contract (e.g. returned a
    /// non-symmetric tensor where a symmetric one is required).
    ContractViolation(String),
    /// Filesystem or formatting failure while emitting reports.
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::InconsistentSystem { residual } => {
                write!(f, "inconsistent system: rhs outside operator range (relative residual {residual:.3e})")
            }
            Error::Degenerate(msg) => write!(f, "degenerate geometry: {msg}"),
            Error::Divergence { step } => write!(f, "non-finite state at step {step}"),
            Error::Accuracy(msg) => write!(f, "accuracy failure: {msg}"),
            Error::NonMonotone => write!(f, "density is not strictly monotone on its support"),
            Error::ContractViolation(msg) => write!(f, "closure contract violation: {msg}"),
            Error::Io(msg) => write!(f, "i/o failure: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
