use alloc::string::String;

/// Errors raised by constructions and exact computations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("size guard exceeded: {what} = {value} > {limit}")]
    SizeGuard {
        what: &'static str,
        value: u128,
        limit: u128,
    },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("not a 2-design: {0}")]
    NotADesign(String),

    #[error("not a unital: {0}")]
    NotAUnital(String),

    #[error("zero has no discrete logarithm")]
    ZeroLog,

    #[error("prime {p} divides the group order {order}")]
    PrimeDividesOrder { p: u64, order: u64 },

    #[error("invalid monomial: {0}")]
    InvalidMonomial(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invariant factors not a divisor chain: {0} does not divide {1}")]
    DivisorChain(u64, u64),

    #[error("precision {l} too low for p = {p}: {censored} invariant factors censored")]
    Censored { p: u64, l: u32, censored: u64 },

    #[error("internal cross-check failed: {0}")]
    Mismatch(String),
}

pub type Result<T> = core::result::Result<T, Error>;
