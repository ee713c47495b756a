//! Bulk evaluation of power maps over a whole field.
//!
//! Two interchangeable evaluators: plain square-and-multiply per element,
//! and discrete-log tables (`x^d = g^(d log x)`) for fields small enough to
//! tabulate. Both must agree bit for bit.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{split_range, FieldCtx, FieldElement};

/// Largest degree for which log tables are built (two `u32` tables of
/// `2^n` entries).
pub const TABLE_MAX_DEGREE: u32 = 24;

/// Largest degree any exhaustive kernel accepts, regardless of scan caps.
pub const KERNEL_MAX_DEGREE: u32 = 32;

/// Default cap for exhaustive single-pass scans.
pub const DEFAULT_SCAN_CAP: u32 = 28;

const CHUNK: u64 = 1 << 14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PowerStrategy {
    /// Square-and-multiply for every element.
    Direct,
    /// Discrete-log tables; falls back to `Direct` above [`TABLE_MAX_DEGREE`].
    LogTable,
    #[default]
    Auto,
}

/// Knobs shared by every exhaustive kernel.
#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub scan_cap: u32,
    pub strategy: PowerStrategy,
    pub budget: Option<Duration>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { scan_cap: DEFAULT_SCAN_CAP, strategy: PowerStrategy::Auto, budget: None }
    }
}

impl ScanOptions {
    pub fn check_degree(&self, ctx: &FieldCtx) -> Result<()> {
        let cap = self.scan_cap.min(KERNEL_MAX_DEGREE);
        if ctx.degree() > cap {
            return Err(Error::AboveScanCap { degree: ctx.degree(), cap });
        }
        Ok(())
    }

    pub(crate) fn deadline(&self) -> Deadline {
        Deadline::new(self.budget)
    }
}

/// Cooperative wall-clock limit, polled between chunks.
#[derive(Debug)]
pub(crate) struct Deadline {
    at: Option<Instant>,
    expired: AtomicBool,
}

impl Deadline {
    pub(crate) fn new(budget: Option<Duration>) -> Deadline {
        Deadline { at: budget.map(|b| Instant::now() + b), expired: AtomicBool::new(false) }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.expired.load(Ordering::Relaxed) {
            return Err(Error::Timeout);
        }
        if let Some(at) = self.at {
            if Instant::now() >= at {
                self.expired.store(true, Ordering::Relaxed);
                return Err(Error::Timeout);
            }
        }
        Ok(())
    }
}

/// Discrete exponential and logarithm tables for a primitive element.
#[derive(Debug)]
pub struct LogTables {
    order: u64,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl LogTables {
    pub fn build(ctx: &FieldCtx) -> LogTables {
        assert!(ctx.degree() <= TABLE_MAX_DEGREE, "log tables are limited to small fields");
        let order = ctx.mask();
        let g = primitive_element(ctx);
        let mut exp = vec![0u32; order as usize];
        let mut log = vec![0u32; order as usize + 1];
        let mut x = FieldElement::ONE;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x.bits() as u32;
            log[x.bits() as usize] = i as u32;
            x = ctx.mul(x, g);
        }
        debug_assert_eq!(x, FieldElement::ONE);
        LogTables { order, exp, log }
    }

    #[inline]
    pub fn pow(&self, x: u64, d: u64) -> u64 {
        if x == 0 {
            return u64::from(d == 0);
        }
        let e = (u128::from(self.log[x as usize]) * u128::from(d) % u128::from(self.order)) as usize;
        u64::from(self.exp[e])
    }
}

/// Evaluates `x -> x^d` for a fixed reduced exponent.
pub enum PowerMap<'a> {
    Direct { ctx: &'a FieldCtx, d: u64 },
    Table { tables: &'a LogTables, d: u64 },
}

impl PowerMap<'_> {
    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        match self {
            PowerMap::Direct { ctx, d } => ctx.pow_u64(FieldElement::from_bits_unchecked(x), *d).bits(),
            PowerMap::Table { tables, d } => tables.pow(x, *d),
        }
    }

    pub fn method(&self) -> &'static str {
        match self {
            PowerMap::Direct { .. } => "exact-direct",
            PowerMap::Table { .. } => "exact-log-table",
        }
    }
}

/// A field plus whatever acceleration structures the chosen strategy needs.
pub struct Evaluator {
    ctx: FieldCtx,
    tables: Option<LogTables>,
}

impl Evaluator {
    pub fn new(ctx: &FieldCtx, strategy: PowerStrategy) -> Evaluator {
        let use_tables = match strategy {
            PowerStrategy::Direct => false,
            PowerStrategy::LogTable | PowerStrategy::Auto => ctx.degree() <= TABLE_MAX_DEGREE,
        };
        Evaluator { ctx: ctx.clone(), tables: use_tables.then(|| LogTables::build(ctx)) }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    /// `d` must already be a canonical residue.
    pub fn power_map(&self, d: u64) -> PowerMap<'_> {
        match &self.tables {
            Some(tables) => PowerMap::Table { tables, d },
            None => PowerMap::Direct { ctx: &self.ctx, d },
        }
    }
}

/// Runs `f` over contiguous chunks of `lo..=hi` in parallel and sums the
/// results. Chunk boundaries do not depend on the thread count.
pub(crate) fn par_sum<F>(lo: u64, hi: u64, deadline: &Deadline, f: F) -> Result<u64>
where
    F: Fn(u64, u64) -> u64 + Sync,
{
    let parts = ((hi - lo) / CHUNK + 1) as usize;
    split_range(lo, hi, parts)
        .into_par_iter()
        .map(|r| {
            deadline.check()?;
            Ok(f(*r.start(), *r.end()))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Fills `out[i] = f(lo + i)` in parallel.
pub(crate) fn par_fill<F>(out: &mut [u32], lo: u64, deadline: &Deadline, f: F) -> Result<()>
where
    F: Fn(u64) -> u32 + Sync,
{
    out.par_chunks_mut(CHUNK as usize).enumerate().try_for_each(|(c, slice)| {
        deadline.check()?;
        let base = lo + c as u64 * CHUNK;
        for (i, slot) in slice.iter_mut().enumerate() {
            *slot = f(base + i as u64);
        }
        Ok(())
    })
}

/// Prime factors of `2^n - 1` by trial division (`n <= 32`).
fn factor_order(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Smallest element (by bit pattern) generating the multiplicative group.
pub fn primitive_element(ctx: &FieldCtx) -> FieldElement {
    assert!(ctx.degree() <= KERNEL_MAX_DEGREE);
    let order = ctx.mask();
    if order == 1 {
        return FieldElement::ONE;
    }
    let primes = factor_order(order);
    (2..=order)
        .map(FieldElement::from_bits_unchecked)
        .find(|&g| primes.iter().all(|&q| ctx.pow_u64(g, order / q) != FieldElement::ONE))
        .expect("every finite field has a primitive element")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_agree_with_direct_powers() {
        for n in 1..=12 {
            let ctx = FieldCtx::new(n).unwrap();
            let tables = LogTables::build(&ctx);
            let order = ctx.mask();
            for d in (0..=order).step_by(((order / 64) as usize).max(1)).chain([order, 0, 1]) {
                for x in 0..=order {
                    let want = ctx.pow_u64(FieldElement::from_bits_unchecked(x), d).bits();
                    assert_eq!(tables.pow(x, d), want, "n={n} d={d} x={x}");
                }
            }
        }
    }

    #[test]
    fn primitive_elements_generate() {
        for n in 2..=16 {
            let ctx = FieldCtx::new(n).unwrap();
            let g = primitive_element(&ctx);
            let mut seen = std::collections::HashSet::new();
            let mut x = FieldElement::ONE;
            for _ in 0..ctx.mask() {
                assert!(seen.insert(x));
                x = ctx.mul(x, g);
            }
            assert_eq!(x, FieldElement::ONE);
        }
    }

    #[test]
    fn deadline_expires() {
        let deadline = Deadline::new(Some(Duration::ZERO));
        assert_eq!(deadline.check(), Err(Error::Timeout));
        let unlimited = Deadline::new(None);
        assert!(unlimited.check().is_ok());
    }

    #[test]
    fn par_sum_is_chunking_independent() {
        let deadline = Deadline::new(None);
        let total = par_sum(0, 1_000_000, &deadline, |a, b| (a..=b).filter(|x| x % 7 == 3).count() as u64).unwrap();
        assert_eq!(total, (0..=1_000_000u64).filter(|x| x % 7 == 3).count() as u64);
    }
}
