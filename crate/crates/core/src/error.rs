use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A phantom or field violates the requirement that its support lies
    /// strictly inside the unit ball.
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} is outside the admissible range {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: String,
    },

    #[error("gamma function pole at x = {0}")]
    GammaPole(f64),

    #[error("malformed {kind} file: {msg}")]
    Format { kind: &'static str, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
