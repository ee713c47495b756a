//! Differential uniformity of power maps.
//!
//! For a power map the derivative in direction `a != 0` is a rescaling of the
//! derivative in direction 1, so the spectrum of `D(x) = x^d + (x+1)^d`
//! determines the uniformity. `D(x) = D(x+1)`, hence only even `x` are
//! evaluated and every value count is doubled.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{reduce_mod_mersenne, BigNat};
use crate::field::FieldCtx;
use crate::kernel::{par_fill, Evaluator, ScanOptions};

/// Largest degree accepted by the all-directions oracle.
pub const FULL_ORACLE_MAX_DEGREE: u32 = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffSpectrum {
    pub n: u32,
    /// Canonical residue of the exponent.
    #[serde(with = "crate::exponent::decimal")]
    pub d: BigNat,
    /// Solution count `s` of `D(x) = b`, mapped to the number of `b` with
    /// exactly `s` solutions.
    pub histogram: BTreeMap<u64, u64>,
    pub uniformity: u64,
}

impl DiffSpectrum {
    pub fn is_apn(&self) -> bool {
        self.uniformity == 2
    }
}

pub fn diff_spectrum_monomial(d: &BigUint, ctx: &FieldCtx, opts: &ScanOptions) -> Result<DiffSpectrum> {
    opts.check_degree(ctx)?;
    let evaluator = Evaluator::new(ctx, opts.strategy);
    let reduced = reduce_mod_mersenne(d, ctx.degree()).to_u64().expect("scan degrees fit a word");
    spectrum_with(&evaluator, reduced, opts)
}

/// [`diff_spectrum_monomial`] with a prepared evaluator and reduced exponent.
pub fn spectrum_with(evaluator: &Evaluator, d: u64, opts: &ScanOptions) -> Result<DiffSpectrum> {
    let ctx = evaluator.ctx();
    opts.check_degree(ctx)?;
    let deadline = opts.deadline();
    let power = evaluator.power_map(d);
    let half = 1usize << (ctx.degree() - 1);
    let mut values = vec![0u32; half];
    par_fill(&mut values, 0, &deadline, |h| {
        let x = h << 1;
        (power.eval(x) ^ power.eval(x | 1)) as u32
    })?;
    deadline.check()?;
    values.par_sort_unstable();
    deadline.check()?;

    let mut histogram = BTreeMap::new();
    let mut distinct = 0u64;
    let mut i = 0;
    while i < values.len() {
        let mut j = i + 1;
        while j < values.len() && values[j] == values[i] {
            j += 1;
        }
        *histogram.entry(2 * (j - i) as u64).or_insert(0) += 1;
        distinct += 1;
        i = j;
    }
    let unreached = ctx.mask() + 1 - distinct;
    if unreached > 0 {
        histogram.insert(0, unreached);
    }
    let uniformity = *histogram.keys().next_back().expect("spectrum is never empty");
    Ok(DiffSpectrum { n: ctx.degree(), d: BigNat::from(d), histogram, uniformity })
}

pub fn is_apn(d: &BigUint, ctx: &FieldCtx, opts: &ScanOptions) -> Result<bool> {
    Ok(diff_spectrum_monomial(d, ctx, opts)?.is_apn())
}

/// Maximum over every direction `a != 0` and target `b` of
/// `#{x : F(x+a) + F(x) = b}`, evaluated with one field power per element.
pub fn full_uniformity_oracle(d: &BigUint, ctx: &FieldCtx) -> Result<u64> {
    let n = ctx.degree();
    if n > FULL_ORACLE_MAX_DEGREE {
        return Err(Error::AboveScanCap { degree: n, cap: FULL_ORACLE_MAX_DEGREE });
    }
    let values: Vec<u64> = ctx.elements().map(|x| ctx.pow(x, d).bits()).collect();
    let size = values.len();
    let best = (1..size)
        .into_par_iter()
        .map(|a| {
            let mut counts = vec![0u32; size];
            for x in 0..size {
                counts[(values[x ^ a] ^ values[x]) as usize] += 1;
            }
            u64::from(counts.into_iter().max().unwrap_or(0))
        })
        .max()
        .unwrap_or(0);
    Ok(best)
}
