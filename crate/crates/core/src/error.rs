use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("steady state is not unique: {0}")]
    DegenerateSteadyState(String),

    #[error("time integration failed: {0}")]
    Integration(String),

    #[error("non-finite integrand at velocity {velocity} m/s")]
    Evaluation { velocity: f64 },

    #[error("singular expression: {0}")]
    Singularity(String),

    #[error("division by zero: {0}")]
    Division(String),

    #[error("propagation failed at slice {slice}: {reason}")]
    Propagation { slice: usize, reason: String },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("evaluation failed at axis value {axis}: {source}")]
    Backend {
        axis: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no peak found: {0}")]
    NoPeak(String),

    #[error("ambiguous peak: candidates at {candidates:?}")]
    AmbiguousPeak { candidates: Vec<f64> },

    #[error("malformed data: {0}")]
    Data(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// True for failures caused by bad inputs rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::InvalidSpec(_) | Error::Data(_) | Error::Io(_))
    }
}
