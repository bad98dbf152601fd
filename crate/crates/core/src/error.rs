use thiserror::Error;

/// Errors raised by the numerical kernel, the state and channel layers, and
/// the scenario runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("state is singular: smallest eigenvalue {min_eigenvalue:.3e} is below the floor")]
    SingularState { min_eigenvalue: f64 },

    #[error("quadrature did not reach tolerance {tolerance:.1e} (error estimate {estimate:.3e})")]
    QuadratureFailure { estimate: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed matrix: {0}")]
    Shape(String),

    #[error("invalid Bloch parameters: {0}")]
    InvalidBloch(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("operation not supported for this drive: {0}")]
    UnsupportedForDrive(String),

    #[error("closed form does not apply to this channel: {0}")]
    ChannelMismatch(String),

    #[error("divergence evaluated to {value:.3e}, below the negative tolerance")]
    NegativeDivergence { value: f64 },

    #[error("numerical contract violated: {0}")]
    NumericalContract(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("at grid cell [{coords}]: {source}")]
    AtCell {
        coords: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Strips any grid-coordinate wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtCell { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
