use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("enumeration needs {} ring elements, budget is {budget}", required_text(*.required))]
    Capacity { required: u64, budget: u64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("element does not belong to this ring")]
    RingMismatch,

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("transport error: {0}")]
    Transport(String),

    #[error("no fixture for level {level}, weight {weight}")]
    MissingFixture { level: u64, weight: u32 },

    #[error("malformed payload at `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn required_text(required: u64) -> String {
    if required == u64::MAX {
        "more than 2^64".to_string()
    } else {
        required.to_string()
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub(crate) fn parse(field: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
