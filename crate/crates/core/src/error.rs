use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the supported range {range}")]
    Range {
        what: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: i128, modulus: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A computed quantity contradicts a proven inequality. Seeing this means
    /// either a bug or an unsound error bound somewhere upstream.
    #[error("internal contradiction: {0}")]
    Contradiction(String),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
