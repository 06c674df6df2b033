use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range {lo}..={hi}")]
    IndexOutOfRange { index: usize, lo: usize, hi: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("model point (lambda={lambda}, gamma={gamma}) is not critical")]
    NotCritical { lambda: f64, gamma: f64 },

    #[error(
        "quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e}"
    )]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("no (nu, 1-nu) partner found for eigenvalue {0}")]
    Pairing(f64),

    #[error("requested {requested} Schmidt states but only {available} exist")]
    TooManyStates { requested: u128, available: u128 },

    #[error("linear fit is singular: {0}")]
    SingularFit(String),

    #[error(
        "no lattice state matches CFT state {index} (dimension {dimension}) within {tolerance}"
    )]
    Unmatched {
        index: usize,
        dimension: f64,
        tolerance: f64,
    },

    #[error("U(1) charge is undefined when the pairing blocks do not vanish")]
    ChargeUndefined,

    #[error("exact arithmetic: {0}")]
    Exact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature { .. }
                | Error::Eigensolver(_)
                | Error::Pairing(_)
                | Error::SingularFit(_)
        )
    }
}
