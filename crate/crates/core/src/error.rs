use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNormExceeded(f64),

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("parameters outside chart domain: {0}")]
    OutsideChartDomain(String),

    #[error("matrix is not in the affine span of the chart (residual {residual:e})")]
    NotInSpan { residual: f64 },

    #[error("state is on or too close to the boundary (min eigenvalue {min_eigenvalue:e})")]
    BoundaryState { min_eigenvalue: f64 },

    #[error("distance classes {a} and {b} are closer than the separation threshold")]
    ClassCollision { a: f64, b: f64 },

    #[error("no distance class near {0}")]
    UnknownClass(f64),

    #[error("point ({x}, {y}) lies outside the section domain")]
    Outside { x: f64, y: f64 },

    #[error("scenario calibration failed: {0}")]
    CalibrationMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPsd { .. } => "NotPSD",
            Error::NoConvergence(_) => "NoConvergence",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::BlochNormExceeded(_) => "BlochNormExceeded",
            Error::InvalidState(_) => "InvalidState",
            Error::OutsideChartDomain(_) => "OutsideChartDomain",
            Error::NotInSpan { .. } => "NotInSpan",
            Error::BoundaryState { .. } => "BoundaryState",
            Error::ClassCollision { .. } => "ClassCollision",
            Error::UnknownClass(_) => "UnknownClass",
            Error::Outside { .. } => "Outside",
            Error::CalibrationMismatch(_) => "CalibrationMismatch",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "IoFailure",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
