use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    Field(String),

    #[error("invalid label: {0}")]
    Label(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid distribution: {0}")]
    Distribution(String),

    #[error("infeasible ensemble: {0}")]
    Infeasible(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An eligible set became empty: the observations are inconsistent with
    /// every codeword.
    #[error("contradiction: eligible set of variable {var} became empty")]
    Contradiction { var: usize },

    #[error("oracle budget exceeded: {0}")]
    Budget(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
