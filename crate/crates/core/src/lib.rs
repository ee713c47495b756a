//! Power maps `x -> x^d` over GF(2^n): the two-parameter exponent family
//! `e(l, k) = sum_{j<l} 2^(jk)`, exact 0-APN and APN testing, and
//! classification of exponents up to cyclotomic equivalence against the six
//! known APN monomial families.
//!
//! ```
//! use apnforge::{exponent::e_lk, field::FieldCtx, apn::is_apn, kernel::ScanOptions};
//!
//! let ctx = FieldCtx::new(5).unwrap();
//! assert!(is_apn(&e_lk(3, 2), &ctx, &ScanOptions::default()).unwrap());
//! ```

pub mod apn;
pub mod error;
pub mod exponent;
pub mod family;
pub mod field;
pub mod kernel;
pub mod scan;
pub mod theorems;
pub mod zero_apn;

pub use error::{Error, Result};
pub use exponent::{BigNat, ReducedExponent};
pub use field::{FieldCtx, FieldElement};
