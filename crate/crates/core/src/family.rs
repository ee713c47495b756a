//! The known APN monomial families and cyclotomic equivalence.
//!
//! Two exponents are cyclotomic equivalent over GF(2^n) when
//! `d = 2^a e (mod 2^n - 1)` or, if `e` is invertible, `d = 2^a e^-1`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::gcd;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{elk_residue, mod_inverse, reduce_mod_mersenne, BigNat, ReducedExponent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Gold,
    Kasami,
    Welch,
    NihoEven,
    NihoOdd,
    Inverse,
    Dobbertin,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::Gold,
        Family::Kasami,
        Family::Welch,
        Family::NihoEven,
        Family::NihoOdd,
        Family::Inverse,
        Family::Dobbertin,
    ];

    /// Name of the family parameter in tags such as `Gold(i=2)`.
    pub fn param_name(self) -> &'static str {
        match self {
            Family::Gold | Family::Kasami | Family::Dobbertin => "i",
            _ => "t",
        }
    }

    pub fn parse(name: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.to_string().eq_ignore_ascii_case(name))
    }

    /// The exponent as an integer (not reduced).
    pub fn exponent(self, p: u64) -> BigNat {
        let two = |e: u64| BigNat::one() << e;
        match self {
            Family::Gold => two(p) + 1u32,
            Family::Kasami => two(2 * p) - two(p) + 1u32,
            Family::Welch => two(p) + 3u32,
            Family::NihoEven => two(p) + two(p / 2) - 1u32,
            Family::NihoOdd => two(p) + two((3 * p).div_ceil(2)) - 1u32,
            Family::Inverse => two(2 * p) - 1u32,
            Family::Dobbertin => two(4 * p) + two(3 * p) + two(2 * p) + two(p) - 1u32,
        }
    }

    pub fn is_valid(self, p: u64, n: u32) -> bool {
        let n = u64::from(n);
        match self {
            Family::Gold | Family::Kasami => p >= 1 && gcd(p, n) == 1,
            Family::Welch | Family::Inverse => p >= 1 && n == 2 * p + 1,
            Family::NihoEven => p >= 2 && p % 2 == 0 && n == 2 * p + 1,
            Family::NihoOdd => p % 2 == 1 && n == 2 * p + 1,
            Family::Dobbertin => p >= 1 && n == 5 * p,
        }
    }

    /// Algebraic degree of a valid instance.
    pub fn expected_degree(self, p: u64, n: u32) -> u64 {
        let n = u64::from(n);
        match self {
            Family::Gold => 2,
            Family::Kasami => {
                let i = p % n;
                i.min(n - i) + 1
            }
            Family::Welch => {
                if p == 1 {
                    2
                } else {
                    3
                }
            }
            Family::NihoEven => (p + 2) / 2,
            Family::NihoOdd => p + 1,
            Family::Inverse => n - 1,
            Family::Dobbertin => p + 3,
        }
    }

    /// Every valid parameter for dimension `n`.
    pub fn valid_params(self, n: u32) -> Vec<u64> {
        let n64 = u64::from(n);
        match self {
            Family::Gold | Family::Kasami => (1..n64).filter(|&p| self.is_valid(p, n)).collect(),
            Family::Dobbertin => (n64 % 5 == 0).then_some(n64 / 5).into_iter().collect(),
            _ => {
                if n % 2 == 1 && n >= 3 {
                    let t = (n64 - 1) / 2;
                    self.is_valid(t, n).then_some(t).into_iter().collect()
                } else {
                    Vec::new()
                }
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::Gold => "Gold",
            Family::Kasami => "Kasami",
            Family::Welch => "Welch",
            Family::NihoEven => "NihoEven",
            Family::NihoOdd => "NihoOdd",
            Family::Inverse => "Inverse",
            Family::Dobbertin => "Dobbertin",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyInstance {
    pub family: Family,
    pub param: u64,
    pub n: u32,
    #[serde(with = "crate::exponent::decimal")]
    pub exponent: BigNat,
    pub valid: bool,
    pub expected_degree: u64,
}

impl FamilyInstance {
    /// Short tag such as `Gold(i=2)`.
    pub fn tag(&self) -> String {
        format!("{}({}={})", self.family, self.family.param_name(), self.param)
    }

    pub fn residue(&self) -> ReducedExponent {
        reduce_mod_mersenne(&self.exponent, self.n)
    }
}

pub fn family_exponent(family: Family, param: u64, n: u32) -> FamilyInstance {
    FamilyInstance {
        family,
        param,
        n,
        exponent: family.exponent(param),
        valid: family.is_valid(param, n),
        expected_degree: family.expected_degree(param, n),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// `d = 2^a e`.
    Shift,
    /// `d = 2^a e^-1`.
    InverseShift,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceWitness {
    pub kind: WitnessKind,
    pub a: u32,
    pub details: String,
}

impl EquivalenceWitness {
    pub fn is_equivalent(&self) -> bool {
        self.kind != WitnessKind::None
    }
}

fn find_shift(from: &ReducedExponent, to: &ReducedExponent, n: u32) -> Option<u32> {
    (0..n).find(|&a| from.rotate(a) == *to)
}

/// Decides cyclotomic equivalence of `d` and `e` over GF(2^n): first a shift
/// `2^a d = e`, then (for invertible `d`) `2^a d^-1 = e`, smallest `a` first.
pub fn cyclotomic_equivalent(d: &BigUint, e: &BigUint, n: u32) -> EquivalenceWitness {
    let rd = reduce_mod_mersenne(d, n);
    let re = reduce_mod_mersenne(e, n);
    if let Some(a) = find_shift(&rd, &re, n) {
        return EquivalenceWitness { kind: WitnessKind::Shift, a, details: format!("2^{a} * {rd} = {re} (mod 2^{n}-1)") };
    }
    if let Ok(inv) = mod_inverse(rd.value(), n) {
        let inv = reduce_mod_mersenne(&inv, n);
        if let Some(a) = find_shift(&inv, &re, n) {
            return EquivalenceWitness {
                kind: WitnessKind::InverseShift,
                a,
                details: format!("2^{a} * {rd}^-1 = 2^{a} * {inv} = {re} (mod 2^{n}-1)"),
            };
        }
    }
    EquivalenceWitness { kind: WitnessKind::None, a: 0, details: String::new() }
}

/// Smallest member of the cyclotomic coset of `d`.
pub fn coset_min(d: &BigUint, n: u32) -> BigNat {
    let r = reduce_mod_mersenne(d, n);
    (0..n).map(|a| r.rotate(a).into_value()).min().expect("n >= 1")
}

/// All valid family instances for dimension `n`, in family then parameter
/// order.
pub fn valid_instances(n: u32) -> Vec<FamilyInstance> {
    Family::ALL
        .into_iter()
        .flat_map(|f| f.valid_params(n).into_iter().map(move |p| family_exponent(f, p, n)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyMatch {
    pub instance: FamilyInstance,
    pub witness: EquivalenceWitness,
}

/// Every valid family instance cyclotomic equivalent to `d` over GF(2^n).
pub fn classify(d: &BigUint, n: u32) -> Vec<FamilyMatch> {
    valid_instances(n)
        .into_iter()
        .filter_map(|instance| {
            let witness = cyclotomic_equivalent(d, &instance.exponent, n);
            witness.is_equivalent().then_some(FamilyMatch { instance, witness })
        })
        .collect()
}

/// A pair `(l, k)` with `2^a e(l,k) = target` (or `target^-1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElkWitness {
    pub kind: WitnessKind,
    pub l: u64,
    pub k: u64,
    pub a: u32,
}

/// Every `(l, k, a)` with `1 <= l, k < n` and `2^a e(l,k) = t (mod 2^n - 1)`,
/// where `t` is the target or, with `inverse`, its modular inverse.
pub fn elk_equivalence_scan(n: u32, target: &BigUint, inverse: bool) -> Result<Vec<ElkWitness>> {
    let kind = if inverse { WitnessKind::InverseShift } else { WitnessKind::Shift };
    let t = if inverse {
        reduce_mod_mersenne(&mod_inverse(target, n)?, n)
    } else {
        reduce_mod_mersenne(target, n)
    };
    let mut rotations: HashMap<ReducedExponent, Vec<u32>> = HashMap::new();
    for b in 0..n {
        rotations.entry(t.rotate(b)).or_default().push(b);
    }
    let n64 = u64::from(n);
    let mut out: Vec<ElkWitness> = (1..n64)
        .into_par_iter()
        .flat_map_iter(|l| {
            let rotations = &rotations;
            (1..n64).flat_map(move |k| {
                let r = elk_residue(l, k, n);
                rotations
                    .get(&r)
                    .into_iter()
                    .flatten()
                    .map(move |&b| ElkWitness { kind, l, k, a: (n - b) % n })
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Both branches of [`elk_equivalence_scan`]; the inverse branch is empty
/// when the target is not invertible.
pub fn elk_equivalence_both(n: u32, target: &BigUint) -> Vec<ElkWitness> {
    let mut out = elk_equivalence_scan(n, target, false).expect("shift branch cannot fail");
    if let Ok(inv) = elk_equivalence_scan(n, target, true) {
        out.extend(inv);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum InverseScanStatus {
    Witnesses { witnesses: Vec<ElkWitness> },
    NotInvertible { gcd: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DobbertinInverseRow {
    pub n: u32,
    pub t: u64,
    pub status: InverseScanStatus,
}

pub const DOBBERTIN_SCAN_MAX: u32 = 200;

/// For every `n = 5t <= n_max`, all `e(l,k)` in the cyclotomic coset of
/// `D_t^-1`, or the reason the inverse does not exist.
pub fn dobbertin_inverse_scan(n_max: u32) -> Result<Vec<DobbertinInverseRow>> {
    if n_max > DOBBERTIN_SCAN_MAX {
        return Err(Error::Precondition(format!("n_max = {n_max} exceeds {DOBBERTIN_SCAN_MAX}")));
    }
    let rows = (5..=n_max)
        .step_by(5)
        .map(|n| {
            let t = u64::from(n / 5);
            let d = Family::Dobbertin.exponent(t);
            let status = match elk_equivalence_scan(n, &d, true) {
                Ok(witnesses) => InverseScanStatus::Witnesses { witnesses },
                Err(Error::NotInvertible { gcd, .. }) => InverseScanStatus::NotInvertible { gcd },
                Err(e) => return Err(e),
            };
            Ok(DobbertinInverseRow { n, t, status })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows)
}

/// For every `n = 5t <= n_max`, all `e(l,k)` in the cyclotomic coset of `D_t`.
pub fn dobbertin_direct_scan(n_max: u32) -> Result<Vec<(u32, Vec<ElkWitness>)>> {
    if n_max > DOBBERTIN_SCAN_MAX {
        return Err(Error::Precondition(format!("n_max = {n_max} exceeds {DOBBERTIN_SCAN_MAX}")));
    }
    (5..=n_max)
        .step_by(5)
        .map(|n| Ok((n, elk_equivalence_scan(n, &Family::Dobbertin.exponent(u64::from(n / 5)), false)?)))
        .collect()
}
