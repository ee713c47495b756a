//! Argument definitions and subcommand drivers.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use apnforge::apn::diff_spectrum_monomial;
use apnforge::exponent::{e_lk, parse_decimal, reduce_mod_mersenne, weight, BigNat};
use apnforge::family::{classify, coset_min, dobbertin_inverse_scan, InverseScanStatus};
use apnforge::kernel::{ScanOptions, DEFAULT_SCAN_CAP};
use apnforge::scan::{scan_table, ScanGrid, ScanRecord};
use apnforge::theorems::{parse_suites, run_suite, Suite, SuiteReport};
use apnforge::zero_apn::{generate_dims, is_zero_apn_exact, DimCondition};
use apnforge::{Error as CoreError, FieldCtx};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::checkpoint::Journal;
use crate::codec::{self, Format};
use crate::range::parse_range;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "apnforge", version, about = "Exact 0-APN / APN analysis of power maps x^e(l,k) over GF(2^n)")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "APNFORGE_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List dimensions n in which x^e(l,k) is 0-APN by the chosen condition.
    GenDims(GenDimsArgs),
    /// Exhaustive 0-APN test of one exponent over a range of dimensions.
    #[command(name = "check-0apn")]
    CheckZeroApn(CheckArgs),
    /// Exhaustive APN test (differential spectrum) of one exponent.
    CheckApn(CheckArgs),
    /// Coset representative, degree and family matches of an exponent.
    Classify(ClassifyArgs),
    /// Scan a box of (l, i, n) cells, with checkpointing.
    Scan(ScanArgs),
    /// Run theorem and lemma verification suites.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConditionArg {
    Theorem,
    Cascade,
    Exact,
    Relaxed,
}

impl From<ConditionArg> for DimCondition {
    fn from(c: ConditionArg) -> Self {
        match c {
            ConditionArg::Theorem => DimCondition::Theorem,
            ConditionArg::Cascade => DimCondition::Cascade,
            ConditionArg::Exact => DimCondition::Exact,
            ConditionArg::Relaxed => DimCondition::Relaxed,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenDimsArgs {
    #[arg(long)]
    pub l: u64,
    #[arg(long, visible_alias = "i")]
    pub k: u64,
    /// Dimension range `a:b`; overrides `--n-max`.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long, value_enum, default_value = "theorem")]
    pub condition: ConditionArg,
    #[arg(long, default_value_t = DEFAULT_SCAN_CAP)]
    pub scan_cap: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Exponent in decimal; alternatively give `--l` and `--k`.
    #[arg(long, conflicts_with_all = ["l", "k"])]
    pub d: Option<String>,
    #[arg(long, requires = "k")]
    pub l: Option<u64>,
    #[arg(long, visible_alias = "i", requires = "l")]
    pub k: Option<u64>,
    /// Dimension range `a:b`.
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = DEFAULT_SCAN_CAP)]
    pub scan_cap: u32,
    /// Wall-clock budget per dimension, in seconds.
    #[arg(long)]
    pub cell_budget: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Exponent in decimal.
    pub d: String,
    pub n: u32,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub l: String,
    #[arg(long, visible_alias = "i")]
    pub k: String,
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = DEFAULT_SCAN_CAP)]
    pub scan_cap: u32,
    /// Wall-clock budget per cell, in seconds; exhausted cells are recorded
    /// with method `timeout`.
    #[arg(long)]
    pub cell_budget: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Record per-cell wall time in `elapsed_ms` (otherwise 0, keeping output
    /// reproducible byte for byte).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// One of lemmas, welch, kasami, kasami-inverse, niho, dobbertin,
    /// dobbertin-inverse, a comma-separated list, or all.
    pub suite: String,
    #[arg(long)]
    pub n_max: Option<u32>,
    /// For welch and niho: largest t (sets n_max = 2t + 1).
    #[arg(long, conflicts_with = "n_max")]
    pub t_max: Option<u32>,
    /// Machine-readable JSON report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command, mapped to its exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Io(_) => EXIT_IO,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Io(m) => m,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn config<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

fn io_at(path: &std::path::Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn budget(seconds: Option<f64>) -> Result<Option<Duration>, Failure> {
    match seconds {
        None => Ok(None),
        Some(s) if s.is_finite() && s > 0.0 => Ok(Some(Duration::from_secs_f64(s))),
        Some(s) => Err(Failure::Config(format!("--cell-budget must be a positive number of seconds, got {s}"))),
    }
}

/// Runs a parsed command, writing results to `out`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::GenDims(a) => gen_dims(a, out),
        Command::CheckZeroApn(a) => check(a, false, out),
        Command::CheckApn(a) => check(a, true, out),
        Command::Classify(a) => classify_cmd(a, out),
        Command::Scan(a) => scan(a, out, err),
        Command::Verify(a) => verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.exit_code()
        }
    }
}

fn gen_dims(a: GenDimsArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let range = match (&a.n, a.n_max) {
        (Some(r), _) => parse_range::<u64>(r).map_err(config)?,
        (None, Some(max)) => 1..=max,
        (None, None) => return Err(Failure::Config("give --n a:b or --n-max".into())),
    };
    let opts = ScanOptions { scan_cap: a.scan_cap, ..ScanOptions::default() };
    let (lo, hi) = (*range.start(), *range.end());
    let dims = if hi == 0 { Vec::new() } else { generate_dims(a.l, a.k, lo.max(1), hi, a.condition.into(), &opts)? };
    if let Some(path) = &a.out {
        let bytes = match a.format {
            Format::Csv => {
                let mut s = String::from("n\n");
                for n in &dims {
                    s.push_str(&format!("{n}\n"));
                }
                s.into_bytes()
            }
            Format::Json => codec::to_json(&json!({
                "l": a.l,
                "k": a.k,
                "condition": format!("{:?}", a.condition).to_lowercase(),
                "n_min": lo,
                "n_max": hi,
                "count": dims.len(),
                "dims": dims,
            }))
            .map_err(config)?
            .into_bytes(),
        };
        codec::write_atomic(path, &bytes).map_err(io_at(path))?;
    }
    writeln!(out, "{}", dims.len())?;
    Ok(EXIT_OK)
}

fn exponent_of(d: &Option<String>, l: Option<u64>, k: Option<u64>) -> Result<BigNat, Failure> {
    match (d, l, k) {
        (Some(d), _, _) => parse_decimal(d).map_err(config),
        (None, Some(l), Some(k)) => Ok(e_lk(l, k)),
        _ => Err(Failure::Config("give --d or both --l and --k".into())),
    }
}

fn check(a: CheckArgs, apn: bool, out: &mut dyn Write) -> Result<i32, Failure> {
    let d = exponent_of(&a.d, a.l, a.k)?;
    let range = parse_range::<u32>(&a.n).map_err(config)?;
    if *range.start() == 0 {
        return Err(Failure::Config("dimensions start at 1".into()));
    }
    let opts = ScanOptions { scan_cap: a.scan_cap, budget: budget(a.cell_budget)?, ..ScanOptions::default() };
    for n in range {
        let ctx = FieldCtx::new(n)?;
        let line = if apn {
            match diff_spectrum_monomial(&d, &ctx, &opts) {
                Ok(s) => json!({
                    "n": n,
                    "exponent": s.d.to_string(),
                    "apn": s.is_apn(),
                    "uniformity": s.uniformity,
                    "histogram": s.histogram,
                }),
                Err(CoreError::Timeout) => json!({ "n": n, "apn": null, "method": "timeout" }),
                Err(e) => return Err(e.into()),
            }
        } else {
            match is_zero_apn_exact(&d, &ctx, &opts) {
                Ok(v) => serde_json::to_value(&v).map_err(config)?,
                Err(CoreError::Timeout) => json!({ "n": n, "is_zero_apn": null, "method": "timeout" }),
                Err(e) => return Err(e.into()),
            }
        };
        writeln!(out, "{line}")?;
    }
    Ok(EXIT_OK)
}

fn classify_cmd(a: ClassifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let d = parse_decimal(&a.d).map_err(config)?;
    if d == BigNat::from(0u32) {
        return Err(Failure::Config("exponent must be at least 1".into()));
    }
    if a.n == 0 || a.n > 4096 {
        return Err(Failure::Config(format!("n = {} outside 1..=4096", a.n)));
    }
    let r = reduce_mod_mersenne(&d, a.n);
    let matches: Vec<_> = classify(&d, a.n)
        .into_iter()
        .map(|m| {
            json!({
                "family": m.instance.tag(),
                "exponent": m.instance.exponent.to_string(),
                "expected_degree": m.instance.expected_degree,
                "witness": m.witness,
            })
        })
        .collect();
    let report = json!({
        "d": d.to_string(),
        "n": a.n,
        "residue": r.to_string(),
        "coset_min": coset_min(&d, a.n).to_string(),
        "weight": weight(&r),
        "families": matches,
    });
    out.write_all(codec::to_json(&report).map_err(config)?.as_bytes())?;
    Ok(EXIT_OK)
}

fn scan(a: ScanArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let grid = ScanGrid {
        l: parse_range::<u64>(&a.l).map_err(config)?,
        k: parse_range::<u64>(&a.k).map_err(config)?,
        n: parse_range::<u32>(&a.n).map_err(config)?,
    };
    grid.validate()?;
    let opts = ScanOptions { scan_cap: a.scan_cap, budget: budget(a.cell_budget)?, ..ScanOptions::default() };

    let mut journal = match &a.checkpoint {
        Some(path) => Some(Journal::open(path).map_err(io_at(path))?),
        None => None,
    };
    let mut fresh: Vec<ScanRecord> = Vec::new();
    {
        let done = |key: &apnforge::scan::CellKey| journal.as_ref().is_some_and(|j| j.contains(key));
        let done_keys: std::collections::HashSet<_> = grid.cells().filter(|k| done(k)).collect();
        scan_table::<Failure, _, _>(&grid, &opts, a.timing, |k| done_keys.contains(k), |record| {
            if let Some(j) = journal.as_mut() {
                let path = a.checkpoint.as_deref().expect("journal implies path");
                j.append(record.clone()).map_err(io_at(path))?;
            }
            fresh.push(record);
            Ok(())
        })?;
    }

    let mut all: BTreeMap<_, ScanRecord> = BTreeMap::new();
    if let Some(j) = &journal {
        for r in j.records() {
            all.insert(r.key(), r.clone());
        }
    }
    for r in fresh {
        all.insert(r.key(), r);
    }
    let records: Vec<ScanRecord> = grid.cells().filter_map(|k| all.remove(&k)).collect();

    for r in &records {
        if r.apn == Some(true) && r.families.is_empty() {
            writeln!(err, "warning: APN exponent outside the known families: l={} i={} n={} d={}", r.l, r.k, r.n, r.exponent)?;
        }
    }
    let bytes = codec::encode(&records, a.format).map_err(config)?;
    let summary_sink: &mut dyn Write = match &a.out {
        Some(path) => {
            codec::write_atomic(path, &bytes).map_err(io_at(path))?;
            out
        }
        None => {
            out.write_all(&bytes)?;
            err
        }
    };
    write_summary(&records, summary_sink)?;
    Ok(EXIT_OK)
}

/// One line per `(l, i)`: the dimensions found APN, as in a table row.
fn write_summary(records: &[ScanRecord], w: &mut dyn Write) -> std::io::Result<()> {
    let mut rows: BTreeMap<(u64, u64), (Vec<u32>, Vec<u32>)> = BTreeMap::new();
    for r in records {
        let row = rows.entry((r.l, r.k)).or_default();
        match r.apn {
            Some(true) => row.0.push(r.n),
            None => row.1.push(r.n),
            Some(false) => {}
        }
    }
    for ((l, k), (apn, open)) in rows {
        let list = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        write!(w, "e({l},{k}): APN n = {{{}}}", list(&apn))?;
        if !open.is_empty() {
            write!(w, "  undecided n = {{{}}}", list(&open))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let suites = parse_suites(&a.suite)?;
    let mut reports: Vec<SuiteReport> = Vec::new();
    for suite in suites {
        let n_max = match (a.n_max, a.t_max) {
            (Some(n), _) => Some(n),
            (None, Some(t)) if matches!(suite, Suite::Welch | Suite::Niho) => Some(2 * t + 1),
            _ => None,
        };
        let report = run_suite(suite, n_max)?;
        for c in &report.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            writeln!(out, "{tag} [{}] {}: {}", report.suite, c.name, c.detail)?;
        }
        if suite == Suite::DobbertinInverse {
            write_dobbertin_note(report.n_max, out)?;
        }
        reports.push(report);
    }
    let ok = reports.iter().all(SuiteReport::passed);
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    let failed: usize = reports.iter().map(|r| r.failures().count()).sum();
    writeln!(out, "{} checks, {} failed", total, failed)?;
    if let Some(path) = &a.out {
        let text = codec::to_json(&json!({ "passed": ok, "suites": reports })).map_err(config)?;
        codec::write_atomic(path, text.as_bytes()).map_err(io_at(path))?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
}

/// Summarizes which dimensions admit a witness and what happened at n = 10,
/// where two readings of the exception set disagree.
fn write_dobbertin_note(n_max: u32, out: &mut dyn Write) -> Result<(), Failure> {
    let rows = dobbertin_inverse_scan(n_max)?;
    let exceptions: Vec<String> = rows
        .iter()
        .filter(|r| matches!(&r.status, InverseScanStatus::Witnesses { witnesses } if !witnesses.is_empty()))
        .map(|r| r.n.to_string())
        .collect();
    writeln!(out, "dobbertin-inverse exceptions: n in {{{}}}", exceptions.join(","))?;
    if let Some(row) = rows.iter().find(|r| r.n == 10) {
        let outcome = match &row.status {
            InverseScanStatus::NotInvertible { gcd } => format!("D_2 is not invertible (gcd = {gcd}), so no inverse witness exists"),
            InverseScanStatus::Witnesses { witnesses } if witnesses.is_empty() => "no witness".to_string(),
            InverseScanStatus::Witnesses { witnesses } => format!("{} witnesses", witnesses.len()),
        };
        writeln!(
            out,
            "dobbertin-inverse n=10: {outcome}; this supports the exception set {{5}} over {{5, 10}}"
        )?;
    }
    Ok(())
}
