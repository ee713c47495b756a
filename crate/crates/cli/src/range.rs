//! Inclusive integer ranges written `a:b` (or a single value `a`).

use std::ops::RangeInclusive;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeError(pub String);

impl std::fmt::Display for RangeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for RangeError {}

/// Parses `a:b` or `a` into a nonempty inclusive range.
pub fn parse_range<T>(text: &str) -> Result<RangeInclusive<T>, RangeError>
where
    T: FromStr + PartialOrd + Copy,
{
    let number = |s: &str| -> Result<T, RangeError> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(RangeError(format!("invalid range bound {s:?} in {text:?}")));
        }
        s.parse::<T>().map_err(|_| RangeError(format!("range bound {s:?} out of bounds in {text:?}")))
    };
    let (lo, hi) = match text.split_once(':') {
        Some((a, b)) => (number(a)?, number(b)?),
        None => {
            let v = number(text)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(RangeError(format!("empty range {text:?}: start exceeds end")));
    }
    Ok(lo..=hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_range::<u64>("3:9"), Ok(3..=9));
        assert_eq!(parse_range::<u32>("7"), Ok(7..=7));
        assert_eq!(parse_range::<u64>("0:0"), Ok(0..=0));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", ":", "3:", ":4", "9:3", "a:b", "-1:2", "1:2:3", " 1:2", "1 :2", "+1", "99999999999:1"] {
            assert!(parse_range::<u32>(bad).is_err(), "{bad:?}");
        }
    }
}
