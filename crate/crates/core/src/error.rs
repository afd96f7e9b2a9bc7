use thiserror::Error;

/// Errors shared across the laboratory modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The arithmetic table does not reach far enough for a requested
    /// dilation or product evaluation.
    #[error("arithmetic table too small: need values up to {required}, table holds {available}")]
    TableTooSmall { required: u64, available: u64 },

    /// g(d) = |E_d(N)|/|E(N)| is undefined because the base exceptional
    /// set is empty (only possible for N < 11).
    #[error("exceptional ratio undefined: E({modulus}) is empty")]
    UndefinedRatio { modulus: u64 },

    #[error("no primes in ({low}, {high}]")]
    NoPrimesInRange { low: u64, high: u64 },

    /// Subset enumeration of 2^(r-1) candidates is capped.
    #[error("subset oracle unsupported for r = {r} (limit {limit})")]
    UnsupportedMode { r: u64, limit: u64 },

    /// Exact rational reconstruction exceeded 128-bit range.
    #[error("128-bit overflow in exact rational reconstruction")]
    Overflow,

    /// An odd M >= 11 admitted no split with lambda(n) = lambda(M - n);
    /// this contradicts a proven guarantee, so it is surfaced loudly.
    #[error("no sign-agreement split found for M = {m}; expected one for every odd M >= 11")]
    MissingSquareSplit { m: u64 },

    #[error("set is empty: {0} undefined")]
    EmptySet(&'static str),

    #[error("table cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
