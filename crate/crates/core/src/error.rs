use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("word is not in the commutator subgroup: letter l{letter} has exponent sum {sum}")]
    NotInCommutatorSubgroup { letter: u32, sum: i64 },

    #[error("invalid expression at {path}: {reason}")]
    Invalid { path: String, reason: String },

    #[error("expression has nonzero winding vector {0}")]
    NonzeroWinding(String),

    #[error("expected an omega or tau product, got {0}")]
    NotAProduct(&'static str),

    #[error("not a bijection: {0}")]
    NotBijective(String),

    #[error("standard neighborhood spec does not fit the word: {0}")]
    SpecMismatch(String),

    #[error("fiber of a word of length {len} is empty in X^{n}")]
    EmptyFiber { len: usize, n: usize },

    #[error("size bound exceeded: {0}")]
    SizeBound(String),

    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse {
        line: usize,
        column: usize,
        msg: String,
    },
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }

    pub(crate) fn parse(line: usize, column: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            msg: msg.into(),
        }
    }
}
