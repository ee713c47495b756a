//! Grid scans over `(l, i, n)` producing one record per cell.

use std::ops::RangeInclusive;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::apn::spectrum_with;
use crate::error::{Error, Result};
use crate::exponent::{elk_residue, weight};
use crate::family::classify;
use crate::field::FieldCtx;
use crate::kernel::{Evaluator, ScanOptions};
use crate::zero_apn::zero_apn_with;

/// Identifies a cell; the derived order is the canonical output order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellKey {
    pub l: u64,
    pub k: u64,
    pub n: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub l: u64,
    pub k: u64,
    pub n: u32,
    /// Canonical residue of `e(l,k)` in decimal.
    pub exponent: String,
    pub weight: u64,
    pub zero_apn: Option<bool>,
    pub apn: Option<bool>,
    pub uniformity: Option<u64>,
    pub families: Vec<String>,
    pub method: String,
    pub elapsed_ms: u64,
}

impl ScanRecord {
    pub fn key(&self) -> CellKey {
        CellKey { l: self.l, k: self.k, n: self.n }
    }
}

pub const METHOD_SKIPPED_CAP: &str = "skipped-above-cap";
pub const METHOD_TIMEOUT: &str = "timeout";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanGrid {
    pub l: RangeInclusive<u64>,
    pub k: RangeInclusive<u64>,
    pub n: RangeInclusive<u32>,
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        for (name, lo, hi) in [
            ("l", *self.l.start(), *self.l.end()),
            ("i", *self.k.start(), *self.k.end()),
            ("n", u64::from(*self.n.start()), u64::from(*self.n.end())),
        ] {
            if lo == 0 || lo > hi {
                return Err(Error::Precondition(format!("range for {name} must be nonempty and start at 1 or more")));
            }
        }
        if *self.n.end() > crate::field::MAX_DEGREE {
            return Err(Error::DegreeOutOfRange(*self.n.end()));
        }
        Ok(())
    }

    /// Cells in canonical order.
    pub fn cells(&self) -> impl Iterator<Item = CellKey> + '_ {
        self.l.clone().flat_map(move |l| {
            self.k.clone().flat_map(move |k| self.n.clone().map(move |n| CellKey { l, k, n }))
        })
    }

    pub fn len(&self) -> u64 {
        let span = |a: u64, b: u64| if b < a { 0 } else { b - a + 1 };
        span(*self.l.start(), *self.l.end())
            * span(*self.k.start(), *self.k.end())
            * span(u64::from(*self.n.start()), u64::from(*self.n.end()))
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Evaluates a single cell with a prepared evaluator (or `None` above the
/// scan cap).
pub fn scan_cell(key: CellKey, evaluator: Option<&Evaluator>, opts: &ScanOptions, record_timing: bool) -> ScanRecord {
    let start = Instant::now();
    let residue = elk_residue(key.l, key.k, key.n);
    let mut record = ScanRecord {
        l: key.l,
        k: key.k,
        n: key.n,
        exponent: residue.to_string(),
        weight: weight(&residue),
        zero_apn: None,
        apn: None,
        uniformity: None,
        families: Vec::new(),
        method: METHOD_SKIPPED_CAP.to_string(),
        elapsed_ms: 0,
    };
    if let Some(evaluator) = evaluator {
        let d = residue.to_u64().expect("scan degrees fit a word");
        let verdicts = zero_apn_with(evaluator, d, opts).and_then(|z| Ok((z, spectrum_with(evaluator, d, opts)?)));
        match verdicts {
            Ok((zero, spectrum)) => {
                record.zero_apn = Some(zero.is_zero_apn);
                record.apn = Some(spectrum.is_apn());
                record.uniformity = Some(spectrum.uniformity);
                record.method = evaluator.power_map(d).method().to_string();
                if spectrum.is_apn() {
                    record.families = classify(residue.value(), key.n).iter().map(|m| m.instance.tag()).collect();
                }
            }
            Err(Error::Timeout) => record.method = METHOD_TIMEOUT.to_string(),
            Err(e) => record.method = format!("error: {e}"),
        }
    }
    if record_timing {
        record.elapsed_ms = start.elapsed().as_millis() as u64;
    }
    record
}

/// Scans every cell of `grid` not rejected by `skip`, handing each record to
/// `sink` as soon as it is computed.
///
/// Cells are visited dimension by dimension so each field's tables are built
/// once; callers that need canonical order sort by [`ScanRecord::key`].
pub fn scan_table<E, S, F>(grid: &ScanGrid, opts: &ScanOptions, record_timing: bool, skip: S, mut sink: F) -> Result<(), E>
where
    E: From<Error>,
    S: Fn(&CellKey) -> bool,
    F: FnMut(ScanRecord) -> Result<(), E>,
{
    grid.validate()?;
    for n in grid.n.clone() {
        let pending: Vec<CellKey> = grid
            .l
            .clone()
            .flat_map(|l| grid.k.clone().map(move |k| CellKey { l, k, n }))
            .filter(|key| !skip(key))
            .collect();
        if pending.is_empty() {
            continue;
        }
        let evaluator = match opts.check_degree(&FieldCtx::new(n)?) {
            Ok(()) => Some(Evaluator::new(&FieldCtx::new(n)?, opts.strategy)),
            Err(_) => None,
        };
        for key in pending {
            sink(scan_cell(key, evaluator.as_ref(), opts, record_timing))?;
        }
    }
    Ok(())
}

/// Runs a whole scan in memory and returns records in canonical order.
pub fn scan_collect(grid: &ScanGrid, opts: &ScanOptions) -> Result<Vec<ScanRecord>> {
    let mut out = Vec::new();
    scan_table::<Error, _, _>(grid, opts, false, |_| false, |r| {
        out.push(r);
        Ok(())
    })?;
    out.sort_by_key(ScanRecord::key);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(l: u64, k: u64, n: u32) -> ScanGrid {
        ScanGrid { l: 1..=l, k: 1..=k, n: 1..=n }
    }

    #[test]
    fn canonical_order_and_coverage() {
        let g = grid(3, 2, 4);
        let recs = scan_collect(&g, &ScanOptions::default()).unwrap();
        assert_eq!(recs.len() as u64, g.len());
        let keys: Vec<CellKey> = recs.iter().map(ScanRecord::key).collect();
        assert_eq!(keys, g.cells().collect::<Vec<_>>());
    }

    #[test]
    fn apn_implies_zero_apn_and_tags() {
        let recs = scan_collect(&grid(6, 6, 9), &ScanOptions::default()).unwrap();
        for r in &recs {
            if r.apn == Some(true) {
                assert_eq!(r.zero_apn, Some(true));
                assert_eq!(r.uniformity, Some(2));
            }
        }
        let r = recs.iter().find(|r| (r.l, r.k, r.n) == (3, 2, 5)).unwrap();
        assert_eq!(r.exponent, "21");
        assert!(r.families.contains(&"Kasami(i=2)".to_string()));
    }

    #[test]
    fn cells_above_cap_are_skipped() {
        let g = ScanGrid { l: 2..=2, k: 1..=1, n: 5..=6 };
        let opts = ScanOptions { scan_cap: 5, ..ScanOptions::default() };
        let recs = scan_collect(&g, &opts).unwrap();
        assert_eq!(recs[0].apn, Some(true));
        assert_eq!(recs[1].apn, None);
        assert_eq!(recs[1].method, METHOD_SKIPPED_CAP);
    }

    #[test]
    fn skip_predicate_is_honoured() {
        let g = grid(2, 2, 3);
        let mut seen = Vec::new();
        scan_table::<Error, _, _>(&g, &ScanOptions::default(), false, |k| k.n == 2, |r| {
            seen.push(r.key());
            Ok(())
        })
        .unwrap();
        assert_eq!(seen.len(), 8);
        assert!(seen.iter().all(|k| k.n != 2));
    }

    #[test]
    fn invalid_grid_rejected() {
        let g = ScanGrid { l: 0..=2, k: 1..=1, n: 1..=2 };
        assert!(scan_collect(&g, &ScanOptions::default()).is_err());
    }
}
