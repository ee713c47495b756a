use thiserror::Error;

/// Errors raised by the field, exponent and scan routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field degree {0} outside supported range 1..=64")]
    DegreeOutOfRange(u32),

    #[error("modulus {modulus:#x} is not an irreducible polynomial of degree {degree}")]
    InvalidModulus { degree: u32, modulus: u128 },

    #[error("element {0:#x} does not belong to the field")]
    InvalidElement(u64),

    #[error("division by zero")]
    DivisionByZero,

    #[error("degree {degree} exceeds the exhaustive scan cap {cap}")]
    AboveScanCap { degree: u32, cap: u32 },

    #[error("exponent is not invertible modulo 2^{n}-1 (gcd = {gcd})")]
    NotInvertible { n: u32, gcd: String },

    #[error("complement of the residue 0 or 2^n-1 is degenerate")]
    DegenerateComplement,

    #[error("invalid exponent set: {0}")]
    InvalidExpansion(String),

    #[error("reflection parameter k = {k} must satisfy 0 < k < {m} for n = {n}")]
    ReflectionOutOfRange { k: u64, m: u64, n: u32 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("candidate subfield degree {degree} exceeds probe cap {cap}")]
    ProbeCapExceeded { degree: u32, cap: u32 },

    #[error("cell time budget exhausted")]
    Timeout,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
