use thiserror::Error;

use crate::bignum::BigReal;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument {value} lies outside the oracle domain |x| <= {limit}")]
    OutOfDomain { value: String, limit: String },

    #[error(
        "direct summation of {terms} terms exceeds the cap of {cap} terms; \
         use the accelerated method or pass the override flag"
    )]
    ResourceRefused { terms: u64, cap: u64 },

    #[error(
        "{requested} digits requested but only {achievable} are reachable \
         at L = {l} with correction order {order}"
    )]
    AccuracyRefused {
        requested: u32,
        achievable: u32,
        l: u64,
        order: u32,
    },

    #[error("quadrature stopped after {levels} levels agreeing on {agreement_digits} digits (best estimate {best})")]
    QuadratureNotConverged {
        best: BigReal,
        agreement_digits: u32,
        levels: u32,
    },

    #[error("malformed numeric string {0:?}")]
    MalformedNumber(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
