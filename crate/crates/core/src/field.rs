//! Arithmetic in GF(2^n), `1 <= n <= 64`, in a polynomial basis.
//!
//! Elements are bit vectors: bit `i` is the coefficient of `x^i`. The field
//! is fixed by an irreducible modulus of degree `n`; [`FieldCtx::new`] picks
//! the numerically smallest one so that every run sees the same
//! representation.

use std::fmt;
use std::ops::{Add, AddAssign, RangeInclusive};

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::exponent::reduce_mod_mersenne;

pub const MAX_DEGREE: u32 = 64;

/// An element of GF(2^n). Only meaningful together with the [`FieldCtx`] it
/// was created for.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u64);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Caller guarantees the bits fit the field in use.
    #[inline]
    pub(crate) const fn from_bits_unchecked(bits: u64) -> Self {
        FieldElement(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({:#b})", self.0)
    }
}

/// Addition in characteristic 2 is XOR.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Add for FieldElement {
    type Output = FieldElement;

    #[inline]
    fn add(self, rhs: FieldElement) -> FieldElement {
        FieldElement(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl AddAssign for FieldElement {
    #[inline]
    fn add_assign(&mut self, rhs: FieldElement) {
        self.0 ^= rhs.0;
    }
}

/// A concrete representation of GF(2^n). Immutable once built.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldCtx {
    degree: u32,
    modulus: u128,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("degree", &self.degree)
            .field("modulus", &format_args!("{:#x}", self.modulus))
            .finish()
    }
}

impl FieldCtx {
    /// GF(2^n) modulo the smallest irreducible polynomial of degree `n` with
    /// nonzero constant term.
    pub fn new(n: u32) -> Result<FieldCtx> {
        check_degree(n)?;
        let mut candidate: u128 = (1u128 << n) | 1;
        loop {
            if is_irreducible(candidate) {
                return Ok(FieldCtx { degree: n, modulus: candidate });
            }
            candidate += 2;
        }
    }

    /// GF(2^n) modulo an explicitly chosen polynomial.
    pub fn with_modulus(n: u32, modulus: u128) -> Result<FieldCtx> {
        check_degree(n)?;
        let valid = poly_degree(modulus) == Some(n) && modulus & 1 == 1 && is_irreducible(modulus);
        if !valid {
            return Err(Error::InvalidModulus { degree: n, modulus });
        }
        Ok(FieldCtx { degree: n, modulus })
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    /// Bit mask of valid element bits, which is also `2^n - 1`.
    #[inline]
    pub fn mask(&self) -> u64 {
        u64::MAX >> (64 - self.degree)
    }

    /// Order of the multiplicative group, `2^n - 1`.
    pub fn group_order(&self) -> BigUint {
        BigUint::from(self.mask())
    }

    /// Number of field elements, `2^n`.
    pub fn size(&self) -> u128 {
        1u128 << self.degree
    }

    pub fn element(&self, bits: u64) -> Result<FieldElement> {
        if bits & !self.mask() != 0 {
            return Err(Error::InvalidElement(bits));
        }
        Ok(FieldElement(bits))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(mulmod(a.0 as u128, b.0 as u128, self.modulus, self.degree) as u64)
    }

    #[inline]
    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// `a^e` for an exponent already reduced to a machine word. No reduction
    /// of `e` happens here; `pow_u64(a, 0) == 1` for every `a`.
    pub fn pow_u64(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e != 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e != 0 {
                base = self.square(base);
            }
        }
        acc
    }

    /// `a^e`. The exponent is first brought to its canonical residue modulo
    /// `2^n - 1`, so `0^0 = 1`, `0^e = 0` for `e > 0`, and `a^(2^n-1) = 1`
    /// for `a != 0`.
    pub fn pow(&self, a: FieldElement, e: &BigUint) -> FieldElement {
        let reduced = reduce_mod_mersenne(e, self.degree);
        self.pow_u64(a, reduced.to_u64().expect("residue fits the field word"))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow_u64(a, self.mask() - 1))
    }

    /// All `2^n` elements in increasing bit-pattern order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..=self.mask()).map(FieldElement)
    }

    /// Splits `0..=2^n-1` into at most `parts` contiguous, non-empty,
    /// ordered ranges.
    pub fn chunks(&self, parts: usize) -> Vec<RangeInclusive<u64>> {
        split_range(0, self.mask(), parts)
    }
}

fn check_degree(n: u32) -> Result<()> {
    if n == 0 || n > MAX_DEGREE {
        return Err(Error::DegreeOutOfRange(n));
    }
    Ok(())
}

pub(crate) fn split_range(lo: u64, hi: u64, parts: usize) -> Vec<RangeInclusive<u64>> {
    let total = (hi - lo) as u128 + 1;
    let parts = (parts.max(1) as u128).min(total);
    let base = total / parts;
    let extra = total % parts;
    let mut out = Vec::with_capacity(parts as usize);
    let mut start = lo as u128;
    for i in 0..parts {
        let len = base + u128::from(i < extra);
        out.push(start as u64..=(start + len - 1) as u64);
        start += len;
    }
    out
}

/// Degree of a nonzero polynomial over F_2 packed into an integer.
pub fn poly_degree(p: u128) -> Option<u32> {
    (p != 0).then(|| 127 - p.leading_zeros())
}

/// Product of two residues modulo `modulus` (degree `degree`). Inputs must
/// already have degree below `degree`. Works for any modulus, irreducible or
/// not, which the irreducibility test relies on.
#[inline]
fn mulmod(mut a: u128, mut b: u128, modulus: u128, degree: u32) -> u128 {
    let top = 1u128 << degree;
    let mut acc = 0u128;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus;
        }
    }
    acc
}

fn poly_rem(mut a: u128, b: u128) -> u128 {
    let db = poly_degree(b).expect("nonzero divisor");
    while let Some(da) = poly_degree(a) {
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

fn poly_gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = poly_rem(a, b);
        a = b;
        b = r;
    }
    a
}

fn prime_divisors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test for a polynomial of degree `1..=64` over F_2.
///
/// `f` of degree `n` is irreducible iff `x^(2^n) = x (mod f)` and
/// `gcd(x^(2^(n/q)) - x, f) = 1` for every prime `q | n`.
pub fn is_irreducible(f: u128) -> bool {
    let n = match poly_degree(f) {
        Some(d) if (1..=MAX_DEGREE).contains(&d) => d,
        _ => return false,
    };
    if n == 1 {
        return true;
    }
    let x = 2u128;
    let frob = |times: u32| {
        let mut t = x;
        for _ in 0..times {
            t = mulmod(t, t, f, n);
        }
        t
    };
    if frob(n) != x {
        return false;
    }
    prime_divisors(n).into_iter().all(|q| poly_gcd(frob(n / q) ^ x, f) == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent irreducibility check: trial division by every polynomial
    /// of degree 1..=deg/2.
    fn irreducible_by_trial_division(f: u128) -> bool {
        let deg = poly_degree(f).unwrap();
        if deg == 0 {
            return false;
        }
        for d in 2u128..(1u128 << (deg / 2 + 1)) {
            if poly_rem(f, d) == 0 {
                return false;
            }
        }
        true
    }

    fn smallest_irreducible_brute(n: u32) -> u128 {
        ((1u128 << n)..(1u128 << (n + 1)))
            .find(|&f| f & 1 == 1 && irreducible_by_trial_division(f))
            .unwrap()
    }

    #[test]
    fn default_moduli() {
        assert_eq!(FieldCtx::new(2).unwrap().modulus(), 7);
        assert_eq!(FieldCtx::new(3).unwrap().modulus(), 11);
        // x^8 + x^4 + x^3 + x + 1, found by brute force below.
        assert_eq!(FieldCtx::new(8).unwrap().modulus(), 0x11b);
        for n in 2..=16 {
            assert_eq!(FieldCtx::new(n).unwrap().modulus(), smallest_irreducible_brute(n), "n = {n}");
        }
    }

    #[test]
    fn rabin_agrees_with_trial_division() {
        for f in 2u128..(1 << 13) {
            assert_eq!(is_irreducible(f), irreducible_by_trial_division(f), "f = {f:#b}");
        }
    }

    #[test]
    fn degree_limits() {
        assert_eq!(FieldCtx::new(0), Err(Error::DegreeOutOfRange(0)));
        assert_eq!(FieldCtx::new(65), Err(Error::DegreeOutOfRange(65)));
        let big = FieldCtx::new(64).unwrap();
        assert_eq!(poly_degree(big.modulus()), Some(64));
        assert_eq!(big.mask(), u64::MAX);
        let one = FieldCtx::new(1).unwrap();
        assert_eq!(one.modulus(), 3);
    }

    #[test]
    fn with_modulus_rejects_reducible() {
        assert!(FieldCtx::with_modulus(8, 0x11b).is_ok());
        assert!(FieldCtx::with_modulus(8, 0x11d).is_ok());
        // x^8 + 1 = (x + 1)^8
        assert!(FieldCtx::with_modulus(8, 0x101).is_err());
        assert!(FieldCtx::with_modulus(9, 0x11b).is_err());
    }

    #[test]
    fn gf8_products() {
        let f = FieldCtx::new(3).unwrap();
        let x = f.element(0b010).unwrap();
        let x2 = f.element(0b100).unwrap();
        assert_eq!(f.mul(x, x2), f.element(0b011).unwrap());
        // Log-table oracle: powers of x enumerate GF(8)^* for x^3 + x + 1.
        let mut logs = [0usize; 8];
        let mut p = FieldElement::ONE;
        for i in 0..7 {
            logs[p.bits() as usize] = i;
            p = f.mul(p, x);
        }
        let mut exp = [0u64; 7];
        for (v, &l) in logs.iter().enumerate().skip(1) {
            exp[l] = v as u64;
        }
        for a in 1..8u64 {
            for b in 1..8u64 {
                let want = exp[(logs[a as usize] + logs[b as usize]) % 7];
                assert_eq!(f.mul(FieldElement(a), FieldElement(b)).bits(), want);
            }
        }
    }

    #[test]
    fn identities_and_inverse() {
        let f = FieldCtx::new(3).unwrap();
        let x = f.element(0b010).unwrap();
        assert_eq!(f.inv(x).unwrap(), f.element(0b101).unwrap());
        assert_eq!(f.inv(FieldElement::ONE).unwrap(), FieldElement::ONE);
        assert_eq!(f.inv(FieldElement::ZERO), Err(Error::DivisionByZero));
        for n in [1, 2, 5, 9] {
            let f = FieldCtx::new(n).unwrap();
            for a in f.elements() {
                assert_eq!(f.mul(a, FieldElement::ONE), a);
                assert_eq!(f.mul(a, FieldElement::ZERO), FieldElement::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
            }
        }
    }

    #[test]
    fn pow_conventions() {
        let f = FieldCtx::new(5).unwrap();
        let x = f.element(2).unwrap();
        assert_eq!(f.pow(x, &BigUint::from(33u32)), f.element(4).unwrap());
        assert_eq!(f.pow(FieldElement::ZERO, &BigUint::from(21u32)), FieldElement::ZERO);
        assert_eq!(f.pow(FieldElement::ZERO, &BigUint::from(0u32)), FieldElement::ONE);
        assert_eq!(f.pow(FieldElement::ZERO, &BigUint::from(31u32)), FieldElement::ZERO);
        for a in f.elements().skip(1) {
            assert_eq!(f.pow(a, &f.group_order()), FieldElement::ONE);
        }
    }

    #[test]
    fn enumeration_order_and_chunks() {
        let f = FieldCtx::new(2).unwrap();
        let all: Vec<u64> = f.elements().map(FieldElement::bits).collect();
        assert_eq!(all, vec![0, 1, 2, 3]);
        let f = FieldCtx::new(3).unwrap();
        let all: Vec<u64> = f.elements().map(FieldElement::bits).collect();
        assert_eq!(all.len(), 8);
        assert_eq!(all[0], 0);
        assert_eq!(*all.last().unwrap(), 0b111);

        let f = FieldCtx::new(10).unwrap();
        for parts in [1, 3, 7, 64, 5000] {
            let flat: Vec<u64> = f.chunks(parts).into_iter().flatten().collect();
            let direct: Vec<u64> = f.elements().map(FieldElement::bits).collect();
            assert_eq!(flat, direct, "parts = {parts}");
        }
    }

    #[test]
    fn element_validation() {
        let f = FieldCtx::new(4).unwrap();
        assert!(f.element(15).is_ok());
        assert_eq!(f.element(16), Err(Error::InvalidElement(16)));
    }
}
