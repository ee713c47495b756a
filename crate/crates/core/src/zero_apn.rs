//! 0-APN-ness of power maps, with emphasis on `x^e(l,k)`.
//!
//! A monomial `x^d` (`d >= 1`) is 0-APN over GF(2^n) iff
//! `x^d + (x+1)^d + 1 = 0` has no roots outside F_2. The root test used here
//! is the `x0 = 0` specialization `F(0) + F(x) + F(1) + F(x+1) = 0`, which
//! coincides with the usual one for `d >= 1` and stays faithful to the
//! general definition for the constant map `d = 0`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_integer::{gcd, Integer};
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{e_lk, elk_residue, mersenne, reduce_mod_mersenne, BigNat};
use crate::field::{FieldCtx, FieldElement};
use crate::kernel::{par_sum, Evaluator, ScanOptions};

/// Largest degree accepted by the quadratic `x0`-APN brute force.
pub const X0_APN_MAX_DEGREE: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictMethod {
    GcdSufficient,
    CascadeSufficient,
    ExactBruteForce,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroApnVerdict {
    /// Canonical residue of the tested exponent.
    #[serde(with = "crate::exponent::decimal")]
    pub exponent: BigNat,
    pub n: u32,
    pub is_zero_apn: bool,
    pub nontrivial_root_count: u64,
    pub method: VerdictMethod,
}

/// Which sufficient (or exact) condition selects dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimCondition {
    /// `gcd(kl, n) = 1` and `gcd(e(l-1,k), 2^n-1) = 1`.
    Theorem,
    /// `gcd(jk, n) = 1` for every `2 <= j <= l`.
    Cascade,
    /// Exhaustive root count in GF(2^n).
    Exact,
    /// Experimental: like `Theorem` but also admits `gcd(kl, n) = 2` when
    /// `3 | e(l,k)`.
    Relaxed,
}

/// `gcd(kl, n) = 1` and `gcd(e(l-1,k), 2^n-1) = 1`.
///
/// The second gcd is `2^gcd(l-1,n) - 1` whenever `gcd(k, n) = 1`, which the
/// first condition forces, so only machine-word gcds are needed.
pub fn thm_sufficient(l: u64, k: u64, n: u64) -> bool {
    gcd(k * l, n) == 1 && gcd(l - 1, n) == 1
}

/// [`thm_sufficient`] evaluated with a big-integer gcd instead of the closed
/// form.
pub fn thm_sufficient_direct(l: u64, k: u64, n: u32) -> bool {
    gcd(k * l, u64::from(n)) == 1 && second_gcd_direct(l, k, n).is_one()
}

/// `gcd(e(l-1,k), 2^n-1)` computed on big integers.
pub fn second_gcd_direct(l: u64, k: u64, n: u32) -> BigNat {
    let modulus = mersenne(n);
    if l <= 1 {
        return BigNat::one();
    }
    elk_residue(l - 1, k, n).value().gcd(&modulus)
}

pub fn cascade_sufficient(l: u64, k: u64, n: u64) -> bool {
    (2..=l).all(|j| gcd(j * k, n) == 1)
}

/// `e(l,k) mod 3`, from `2^(jk) = (-1)^(jk) (mod 3)`.
fn elk_mod3(l: u64, k: u64) -> u64 {
    if k % 2 == 0 {
        l % 3
    } else {
        (l.div_ceil(2) + 2 * (l / 2)) % 3
    }
}

/// Experimental refinement of [`thm_sufficient`] for `gcd(kl, n) = 2`.
pub fn relaxed_sufficient(l: u64, k: u64, n: u32) -> bool {
    let g = gcd(k * l, u64::from(n));
    let first = g == 1 || (g == 2 && elk_mod3(l, k) == 0);
    first && second_gcd_direct(l, k, n).is_one()
}

/// All `n` in `n_lo..=n_hi` satisfying `condition`, ascending.
pub fn generate_dims(
    l: u64,
    k: u64,
    n_lo: u64,
    n_hi: u64,
    condition: DimCondition,
    opts: &ScanOptions,
) -> Result<Vec<u64>> {
    if l < 2 || k < 1 {
        return Err(Error::Precondition(format!("need l >= 2 and k >= 1, got l = {l}, k = {k}")));
    }
    if n_lo > n_hi {
        return Err(Error::Precondition(format!("empty dimension range {n_lo}..={n_hi}")));
    }
    let lo = n_lo.max(1);
    let dims = match condition {
        DimCondition::Theorem => (lo..=n_hi).filter(|&n| thm_sufficient(l, k, n)).collect(),
        DimCondition::Cascade => (lo..=n_hi).filter(|&n| cascade_sufficient(l, k, n)).collect(),
        DimCondition::Relaxed => (lo..=n_hi)
            .into_par_iter()
            .filter(|&n| relaxed_sufficient(l, k, n as u32))
            .collect(),
        DimCondition::Exact => {
            let d = e_lk(l, k);
            let mut out = Vec::new();
            for n in lo..=n_hi {
                let n32 = u32::try_from(n).map_err(|_| Error::AboveScanCap { degree: u32::MAX, cap: opts.scan_cap })?;
                let ctx = FieldCtx::new(n32)?;
                if is_zero_apn_exact(&d, &ctx, opts)?.is_zero_apn {
                    out.push(n);
                }
            }
            out
        }
    };
    Ok(dims)
}

/// Exhaustive 0-APN test of `x^d` over `ctx`.
pub fn is_zero_apn_exact(d: &BigUint, ctx: &FieldCtx, opts: &ScanOptions) -> Result<ZeroApnVerdict> {
    opts.check_degree(ctx)?;
    let evaluator = Evaluator::new(ctx, opts.strategy);
    let reduced = reduce_mod_mersenne(d, ctx.degree()).to_u64().expect("scan degrees fit a word");
    zero_apn_with(&evaluator, reduced, opts)
}

/// [`is_zero_apn_exact`] with a prepared evaluator and a reduced exponent.
pub fn zero_apn_with(evaluator: &Evaluator, d: u64, opts: &ScanOptions) -> Result<ZeroApnVerdict> {
    let ctx = evaluator.ctx();
    opts.check_degree(ctx)?;
    let deadline = opts.deadline();
    let power = evaluator.power_map(d);
    let f0 = power.eval(0);
    let f1 = power.eval(1);
    let n = ctx.degree();
    let nontrivial = if n == 1 {
        0
    } else {
        // Roots come in pairs {x, x+1}; count even representatives from 2.
        let pairs = par_sum(1, ctx.mask() >> 1, &deadline, |lo, hi| {
            (lo..=hi)
                .filter(|&h| {
                    let x = h << 1;
                    f0 ^ f1 ^ power.eval(x) ^ power.eval(x | 1) == 0
                })
                .count() as u64
        })?;
        2 * pairs
    };
    Ok(ZeroApnVerdict {
        exponent: BigNat::from(d),
        n,
        is_zero_apn: nontrivial == 0,
        nontrivial_root_count: nontrivial,
        method: VerdictMethod::ExactBruteForce,
    })
}

/// Direct test of the `x0`-APN property: every `(y, z)` with
/// `F(x0) + F(y) + F(z) + F(x0+y+z) = 0` has `(x0+y)(x0+z)(y+z) = 0`.
pub fn is_x0_apn_exact(d: &BigUint, x0: FieldElement, ctx: &FieldCtx) -> Result<bool> {
    if ctx.degree() > X0_APN_MAX_DEGREE {
        return Err(Error::AboveScanCap { degree: ctx.degree(), cap: X0_APN_MAX_DEGREE });
    }
    let x0 = ctx.element(x0.bits())?.bits();
    let values: Vec<u64> = ctx.elements().map(|x| ctx.pow(x, d).bits()).collect();
    let fx0 = values[x0 as usize];
    let size = values.len() as u64;
    let violated = (0..size).into_par_iter().any(|y| {
        (0..size).any(|z| {
            let w = x0 ^ y ^ z;
            fx0 ^ values[y as usize] ^ values[z as usize] ^ values[w as usize] == 0
                && x0 != y
                && x0 != z
                && y != z
        })
    });
    Ok(!violated)
}

/// Subfield degrees on which `x^e(l,k) + (x+1)^e(l,k) + 1` first acquires
/// roots outside F_2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationProfile {
    pub l: u64,
    pub k: u64,
    /// Every divisor `> 1` of some `jk`, `2 <= j <= l`.
    pub candidates: BTreeSet<u32>,
    /// Minimal violating degrees: no proper divisor among them violates.
    pub violating_subfield_degrees: BTreeSet<u32>,
}

impl ViolationProfile {
    /// 0-APN over GF(2^n) iff no violating degree divides `n`.
    pub fn predicts_zero_apn(&self, n: u32) -> bool {
        !self.violating_subfield_degrees.iter().any(|&m| n % m == 0)
    }
}

/// Any nontrivial root of the derivative lies in GF(2^gcd(jk,n)) for some
/// `2 <= j <= l`, so testing the finitely many subfields GF(2^m), `m | jk`,
/// settles every dimension at once.
pub fn characterize_violations(l: u64, k: u64, probe_cap: u32) -> Result<ViolationProfile> {
    if l < 2 || k < 1 {
        return Err(Error::Precondition(format!("need l >= 2 and k >= 1, got l = {l}, k = {k}")));
    }
    let mut candidates = BTreeSet::new();
    for j in 2..=l {
        let jk = j * k;
        for m in 2..=jk {
            if jk % m == 0 {
                let m = u32::try_from(m).map_err(|_| Error::ProbeCapExceeded { degree: u32::MAX, cap: probe_cap })?;
                candidates.insert(m);
            }
        }
    }
    if let Some(&too_big) = candidates.iter().find(|&&m| m > probe_cap) {
        return Err(Error::ProbeCapExceeded { degree: too_big, cap: probe_cap });
    }
    let d = e_lk(l, k);
    let opts = ScanOptions { scan_cap: probe_cap, ..ScanOptions::default() };
    let mut violating = BTreeSet::new();
    for &m in &candidates {
        if violating.iter().any(|&v| m % v == 0) {
            continue;
        }
        let ctx = FieldCtx::new(m)?;
        if !is_zero_apn_exact(&d, &ctx, &opts)?.is_zero_apn {
            violating.insert(m);
        }
    }
    Ok(ViolationProfile { l, k, candidates, violating_subfield_degrees: violating })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImageKind {
    Permutation,
    ThreeToOne,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageClass {
    #[serde(with = "crate::exponent::decimal")]
    pub gcd_value: BigNat,
    pub kind: ImageKind,
}

/// `gcd(e(l,k), 2^n-1) = 2^gcd(l,n) - 1` when `gcd(k, n) = 1`.
pub fn image_class(l: u64, k: u64, n: u32) -> Result<ImageClass> {
    if gcd(k, u64::from(n)) != 1 {
        return Err(Error::Precondition(format!("gcd(k, n) = gcd({k}, {n}) must be 1")));
    }
    let g = gcd(l, u64::from(n));
    let kind = match g {
        1 => ImageKind::Permutation,
        2 => ImageKind::ThreeToOne,
        _ => ImageKind::Other,
    };
    Ok(ImageClass { gcd_value: mersenne(g as u32), kind })
}

/// `gcd(e(l,k), 2^n-1)` by big-integer gcd.
pub fn image_gcd_direct(l: u64, k: u64, n: u32) -> BigNat {
    elk_residue(l, k, n).value().gcd(&mersenne(n))
}
