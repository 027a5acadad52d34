use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("mesh deposit is degenerate: all particles share one position")]
    DegenerateDeposit,

    #[error("{what} = {value} is outside the domain of the function")]
    Domain { what: &'static str, value: f64 },

    #[error("could not bracket the inverse of T for t = {t}")]
    Bracket { t: f64 },

    #[error("integration broke down at step {step}: {reason}")]
    Breakdown { step: usize, reason: String },

    #[error("adaptive step failed at step {step}: step factor {lambda} is not finite")]
    AdaptiveFailure { step: usize, lambda: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by the numerics rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateDeposit
                | Error::Bracket { .. }
                | Error::Breakdown { .. }
                | Error::AdaptiveFailure { .. }
        )
    }
}
