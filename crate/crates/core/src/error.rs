use thiserror::Error;

/// Errors raised by the numerical kernel and the analysis modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("iterative solver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported algebra kind: {0}")]
    UnsupportedKind(String),

    #[error("element is not in the diagonal Cartan subalgebra")]
    NotDiagonal,

    #[error("derivation is not diagonalizable over C")]
    NotDiagonalizable,

    #[error("weight {0:?} is not dominant")]
    NotDominant(Vec<i64>),

    #[error("constructed dimension {got} disagrees with the Weyl dimension formula {expected}")]
    DimensionOracleMismatch { expected: usize, got: usize },

    #[error("Cartan elements do not commute in the representation (residual {0:.3e})")]
    NonCommutingCartan(f64),

    #[error("representation is not irreducible: {0}")]
    NotIrreducible(String),

    #[error("representation is not injective on the Lie algebra")]
    NonInjective,

    #[error("operator is not positive semidefinite (minimal eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("invalid symplectic splitting: {0}")]
    SplitInvalid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix does not lie in the Lie algebra (residual {0:.3e})")]
    NotInAlgebra(f64),

    #[error("invalid Lie algebra data: {0}")]
    InvalidAlgebra(String),

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("entries {0} and {1} of the diagonal sequence coincide")]
    RepeatedEntries(usize, usize),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, used in CLI reports and exit statuses.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "not_hermitian",
            Error::ConvergenceFailure(_) => "convergence_failure",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::UnsupportedKind(_) => "unsupported_kind",
            Error::NotDiagonal => "not_diagonal",
            Error::NotDiagonalizable => "not_diagonalizable",
            Error::NotDominant(_) => "not_dominant",
            Error::DimensionOracleMismatch { .. } => "dimension_oracle_mismatch",
            Error::NonCommutingCartan(_) => "non_commuting_cartan",
            Error::NotIrreducible(_) => "not_irreducible",
            Error::NonInjective => "non_injective",
            Error::NotPsd(_) => "not_psd",
            Error::SplitInvalid(_) => "split_invalid",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::NotInAlgebra(_) => "not_in_algebra",
            Error::InvalidAlgebra(_) => "invalid_algebra",
            Error::InvalidRepresentation(_) => "invalid_representation",
            Error::RepeatedEntries(..) => "repeated_entries",
            Error::Schema(_) => "schema_error",
            Error::Io(_) => "io_error",
            Error::Json(_) => "json_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
