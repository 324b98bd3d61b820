use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),

    #[error("invalid prime power p={p}, e={e}: {reason}")]
    InvalidPrimePower { p: u32, e: u32, reason: &'static str },

    #[error("elements belong to different algebras (q={left} vs q={right})")]
    ContextMismatch { left: u64, right: u64 },

    #[error("P^{a} P^{b} is already admissible for q={q}")]
    AlreadyAdmissible { a: u64, b: u64, q: u64 },

    #[error("word {0} is not admissible")]
    NotAdmissible(String),

    #[error("the May filtration of zero is infinite")]
    ZeroElement,

    #[error("element is not homogeneous")]
    NotHomogeneous,

    #[error("element is not in the requested subalgebra")]
    NotInSubalgebra,

    #[error("resource guard: {what} is {requested}, limit is {limit}")]
    ResourceGuard {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn guard(what: &'static str, requested: u64, limit: u64) -> Self {
        Error::ResourceGuard {
            what,
            requested,
            limit,
        }
    }

    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}
