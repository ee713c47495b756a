//! Exponent arithmetic modulo the Mersenne number `2^n - 1`.
//!
//! Power maps `x -> x^d` on GF(2^n) only depend on `d` modulo `2^n - 1`,
//! with one exception: `d = 0` (the constant 1) and `d = 2^n - 1` (the
//! indicator of nonzero elements) are different maps. The canonical residue
//! therefore lives in `1..=2^n-1` for every nonzero `d` and is `0` only for
//! `d = 0`.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision natural number.
pub type BigNat = BigUint;

/// `2^n - 1`.
pub fn mersenne(n: u32) -> BigNat {
    (BigNat::one() << n) - 1u32
}

/// Serde adapter writing big naturals as decimal strings.
pub mod decimal {
    use super::{parse_decimal, BigNat};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigNat, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigNat, D::Error> {
        let text = String::deserialize(d)?;
        parse_decimal(&text).map_err(D::Error::custom)
    }
}

/// Parses a nonnegative decimal integer with no sign, spaces or separators.
pub fn parse_decimal(text: &str) -> Result<BigNat> {
    if text.is_empty() || !text.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Precondition(format!("not a decimal natural number: {text:?}")));
    }
    BigNat::parse_bytes(text.as_bytes(), 10)
        .ok_or_else(|| Error::Precondition(format!("not a decimal natural number: {text:?}")))
}

/// Canonical residue of an exponent modulo `2^n - 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReducedExponent {
    #[serde(with = "decimal")]
    value: BigNat,
    n: u32,
}

impl ReducedExponent {
    /// Wraps a value already known to be canonical.
    fn from_canonical(value: BigNat, n: u32) -> Self {
        debug_assert!(value.bits() <= u64::from(n));
        ReducedExponent { value, n }
    }

    pub fn value(&self) -> &BigNat {
        &self.value
    }

    pub fn into_value(self) -> BigNat {
        self.value
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.value.to_u64()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// True for the residue `2^n - 1`.
    pub fn is_all_ones(&self) -> bool {
        self.value.count_ones() == u64::from(self.n)
    }

    /// Residue of `2^a * self`: a left rotation of the `n`-bit pattern.
    pub fn rotate(&self, a: u32) -> ReducedExponent {
        let a = a % self.n;
        if a == 0 || self.is_zero() {
            return self.clone();
        }
        let mask = mersenne(self.n);
        let rotated = ((&self.value << a) & &mask) | (&self.value >> (self.n - a));
        ReducedExponent::from_canonical(rotated, self.n)
    }
}

impl fmt::Debug for ReducedExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod 2^{}-1)", self.value, self.n)
    }
}

impl fmt::Display for ReducedExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.value, f)
    }
}

/// `e(l, k) = sum_{j<l} 2^(jk) = (2^(lk) - 1) / (2^k - 1)`.
pub fn e_lk(l: u64, k: u64) -> BigNat {
    let mut out = BigNat::zero();
    for j in 0..l {
        out.set_bit(j * k, true);
    }
    debug_assert_eq!(out, e_lk_closed_form(l, k));
    out
}

/// Geometric-series form of [`e_lk`].
pub fn e_lk_closed_form(l: u64, k: u64) -> BigNat {
    let lk = usize::try_from(l * k).expect("exponent size");
    let num = (BigNat::one() << lk) - 1u32;
    let den = (BigNat::one() << usize::try_from(k).expect("stride")) - 1u32;
    num / den
}

/// Canonical residue of `d` modulo `2^n - 1`.
///
/// Folds `n`-bit limbs (`2^n = 1`) until the value fits in `n` bits.
pub fn reduce_mod_mersenne(d: &BigNat, n: u32) -> ReducedExponent {
    assert!(n >= 1, "modulus exponent must be positive");
    if d.bits() <= u64::from(n) {
        return ReducedExponent::from_canonical(d.clone(), n);
    }
    let mut value = fold_limbs(d, n);
    while value.bits() > u64::from(n) {
        value = fold_limbs(&value, n);
    }
    ReducedExponent::from_canonical(value, n)
}

/// Sum of the consecutive `n`-bit limbs of `d`.
fn fold_limbs(d: &BigNat, n: u32) -> BigNat {
    let digits = d.to_u64_digits();
    let total_bits = d.bits();
    let n64 = u64::from(n);
    let mut acc = BigNat::zero();
    let mut start = 0u64;
    while start < total_bits {
        acc += extract_bits(&digits, start, n64.min(total_bits - start));
        start += n64;
    }
    acc
}

fn extract_bits(digits: &[u64], start: u64, len: u64) -> BigNat {
    let mut out = Vec::with_capacity((len / 64 + 1) as usize);
    let mut taken = 0u64;
    while taken < len {
        let pos = start + taken;
        let word = (pos / 64) as usize;
        let offset = pos % 64;
        let lo = digits.get(word).copied().unwrap_or(0) >> offset;
        let hi = if offset == 0 { 0 } else { digits.get(word + 1).copied().unwrap_or(0) << (64 - offset) };
        let mut chunk = lo | hi;
        let want = (len - taken).min(64);
        if want < 64 {
            chunk &= (1u64 << want) - 1;
        }
        out.push(chunk);
        taken += want;
    }
    BigNat::new(out.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect())
}

/// Hamming weight of the canonical residue: the algebraic degree of `x^r`.
pub fn weight(r: &ReducedExponent) -> u64 {
    r.value.count_ones()
}

/// `d^-1` modulo `2^n - 1`, as a canonical residue.
pub fn mod_inverse(d: &BigNat, n: u32) -> Result<BigNat> {
    let modulus = mersenne(n);
    if modulus.is_one() {
        return Ok(BigNat::one());
    }
    let a = BigInt::from_biguint(Sign::Plus, d % &modulus);
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let egcd = a.extended_gcd(&m);
    if !egcd.gcd.is_one() {
        return Err(Error::NotInvertible { n, gcd: egcd.gcd.to_string() });
    }
    let inv = egcd.x.mod_floor(&m);
    Ok(inv.to_biguint().expect("non-negative after mod_floor"))
}

/// Residue of `-r`, whose `n`-bit pattern is the complement of `r`'s.
pub fn negate_complement(r: &ReducedExponent) -> Result<ReducedExponent> {
    if r.is_zero() || r.is_all_ones() {
        return Err(Error::DegenerateComplement);
    }
    Ok(ReducedExponent::from_canonical(mersenne(r.n) - &r.value, r.n))
}

/// A multiset of bit positions modulo `n`, standing for `sum 2^p (mod 2^n - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpSet {
    positions: Vec<u32>,
    n: u32,
}

impl ExpSet {
    /// Builds a multiset; positions are taken modulo `n` (`2^n = 1`).
    pub fn new(positions: impl IntoIterator<Item = u64>, n: u32) -> ExpSet {
        assert!(n >= 1);
        let mut positions: Vec<u32> = positions.into_iter().map(|p| (p % u64::from(n)) as u32).collect();
        positions.sort_unstable();
        ExpSet { positions, n }
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_set(&self) -> bool {
        self.positions.windows(2).all(|w| w[0] != w[1])
    }

    /// `sum 2^p` as a canonical residue. Empty sets represent 0.
    pub fn residue(&self) -> ReducedExponent {
        let mut sum = BigNat::zero();
        for &p in &self.positions {
            sum += BigNat::one() << p;
        }
        reduce_mod_mersenne(&sum, self.n)
    }
}

/// Bit positions of a canonical residue.
pub fn exp_set(r: &ReducedExponent) -> ExpSet {
    let positions = (0..u64::from(r.n)).filter(|&p| r.value.bit(p));
    ExpSet::new(positions, r.n)
}

/// Merges duplicate positions `j, j -> j + 1` (wrapping `n - 1 -> 0`) until
/// every position occurs once.
pub fn compress(s: &ExpSet) -> ExpSet {
    let n = s.n as usize;
    let mut counts = vec![0u64; n];
    for &p in &s.positions {
        counts[p as usize] += 1;
    }
    // Each merge removes one element, so this terminates; ascending sweeps
    // pick up carries that wrap past position n - 1.
    loop {
        let mut merged = false;
        for p in 0..n {
            if counts[p] >= 2 {
                let pairs = counts[p] / 2;
                counts[p] %= 2;
                counts[(p + 1) % n] += pairs;
                merged = true;
            }
        }
        if !merged {
            break;
        }
    }
    let positions = (0..n).filter(|&p| counts[p] == 1).map(|p| p as u64);
    ExpSet::new(positions, s.n)
}

/// Residue of `e(l, k)` modulo `2^n - 1` without materializing `e(l, k)`.
pub fn elk_residue(l: u64, k: u64, n: u32) -> ReducedExponent {
    let n64 = u64::from(n);
    let stride = k % n64;
    let positions = (0..l).map(|j| (j % n64) * stride % n64);
    compress(&ExpSet::new(positions, n)).residue()
}

/// Checks the congruence `sum 2^a_i = sum 2^b_i (mod 2^n - 1)` by direct
/// evaluation, for exponent lists whose members are pairwise distinct
/// modulo `n` (and of equal length).
pub fn check_unique_expansion(a: &[u64], b: &[u64], n: u32) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::InvalidExpansion(format!("lengths differ: {} vs {}", a.len(), b.len())));
    }
    for (name, list) in [("A", a), ("B", b)] {
        if !ExpSet::new(list.iter().copied(), n).is_set() {
            return Err(Error::InvalidExpansion(format!("{name} has repeated residues modulo {n}")));
        }
    }
    let sum = |list: &[u64]| -> BigNat {
        list.iter().fold(BigNat::zero(), |acc, &p| acc + (BigNat::one() << p))
    };
    let modulus = mersenne(n);
    Ok(sum(a) % &modulus == sum(b) % &modulus)
}

/// Whether two exponent lists agree as sets of residues modulo `n`.
pub fn residue_sets_equal(a: &[u64], b: &[u64], n: u32) -> bool {
    let mut ra: Vec<u64> = a.iter().map(|x| x % u64::from(n)).collect();
    let mut rb: Vec<u64> = b.iter().map(|x| x % u64::from(n)).collect();
    ra.sort_unstable();
    rb.sort_unstable();
    ra == rb
}

/// Stride pair exchanged by the half-dimension reflection, together with the
/// shift `X` such that `2^X e(l, low) = e(l, high) (mod 2^n - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reflection {
    pub l: u64,
    pub low: u64,
    pub high: u64,
    pub shift: u64,
    pub n: u32,
}

impl Reflection {
    /// Evaluates the claimed congruence with exact arithmetic.
    pub fn holds(&self) -> bool {
        let lhs = reduce_mod_mersenne(&(e_lk(self.l, self.low) << self.shift), self.n);
        let rhs = reduce_mod_mersenne(&e_lk(self.l, self.high), self.n);
        lhs == rhs
    }
}

/// For `n = 2m`, pairs stride `m - k` with `m + k`; for `n = 2m + 1`, pairs
/// `m - k + 1` with `m + k`. Requires `0 < k < m`.
pub fn reflect_k(l: u64, k: u64, n: u32) -> Result<Reflection> {
    let m = u64::from(n / 2);
    if k == 0 || k >= m {
        return Err(Error::ReflectionOutOfRange { k, m, n });
    }
    let reflection = if n % 2 == 0 {
        Reflection { l, low: m - k, high: m + k, shift: l * k + l * m + m - k, n }
    } else {
        Reflection { l, low: m - k + 1, high: m + k, shift: l * (m + k) + m - k + 1, n }
    };
    Ok(reflection)
}
