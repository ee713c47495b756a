//! Computational checks of the structural results about `e(l,k)`: which
//! family exponents can be cyclotomic equivalent to some `e(l,k)`, plus the
//! exponent-arithmetic lemmas those results rest on.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::gcd;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{e_lk, elk_residue, reduce_mod_mersenne, reflect_k, weight, BigNat};
use crate::family::{
    dobbertin_direct_scan, dobbertin_inverse_scan, elk_equivalence_both, elk_equivalence_scan, ElkWitness, Family,
    InverseScanStatus, WitnessKind,
};
use crate::zero_apn::{thm_sufficient, thm_sufficient_direct};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Welch,
    Kasami,
    KasamiInverse,
    Niho,
    Dobbertin,
    DobbertinInverse,
    Lemmas,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Welch,
        Suite::Kasami,
        Suite::KasamiInverse,
        Suite::Niho,
        Suite::Dobbertin,
        Suite::DobbertinInverse,
        Suite::Lemmas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Welch => "welch",
            Suite::Kasami => "kasami",
            Suite::KasamiInverse => "kasami-inverse",
            Suite::Niho => "niho",
            Suite::Dobbertin => "dobbertin",
            Suite::DobbertinInverse => "dobbertin-inverse",
            Suite::Lemmas => "lemmas",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Largest dimension examined when the caller does not choose one.
    pub fn default_n_max(self) -> u32 {
        match self {
            Suite::Welch | Suite::Niho => 41,
            Suite::Kasami => 19,
            Suite::KasamiInverse => 31,
            Suite::Dobbertin | Suite::DobbertinInverse => 100,
            Suite::Lemmas => 30,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub n_max: u32,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub fn format_witness(w: &ElkWitness) -> String {
    let branch = match w.kind {
        WitnessKind::Shift => "shift",
        WitnessKind::InverseShift => "inverse",
        WitnessKind::None => "none",
    };
    format!("{branch}(l={},k={},a={})", w.l, w.k, w.a)
}

fn format_witnesses(ws: &[ElkWitness]) -> String {
    if ws.is_empty() {
        return "none".to_string();
    }
    ws.iter().map(format_witness).collect::<Vec<_>>().join(" ")
}

fn has(ws: &[ElkWitness], kind: WitnessKind, l: u64, k: u64) -> bool {
    ws.iter().any(|w| w.kind == kind && w.l == l && w.k == k)
}

pub fn run_suite(suite: Suite, n_max: Option<u32>) -> Result<SuiteReport> {
    let n_max = n_max.unwrap_or_else(|| suite.default_n_max());
    let checks = match suite {
        Suite::Welch => welch(n_max),
        Suite::Kasami => kasami(n_max),
        Suite::KasamiInverse => kasami_inverse(n_max),
        Suite::Niho => niho(n_max),
        Suite::Dobbertin => dobbertin(n_max)?,
        Suite::DobbertinInverse => dobbertin_inverse(n_max)?,
        Suite::Lemmas => lemmas(n_max),
    };
    Ok(SuiteReport { suite, n_max, checks })
}

/// Welch `W_t = 2^t + 3` at `n = 2t + 1`: only `t <= 2` meets `e(l,k)`.
fn welch(n_max: u32) -> Vec<Check> {
    (1..=(n_max.saturating_sub(1) / 2))
        .map(|t| {
            let n = 2 * t + 1;
            let ws = elk_equivalence_both(n, &Family::Welch.exponent(u64::from(t)));
            let pass = match t {
                1 => has(&ws, WitnessKind::Shift, 2, 2),
                2 => has(&ws, WitnessKind::Shift, 3, 1) && has(&ws, WitnessKind::InverseShift, 2, 3),
                _ => ws.is_empty(),
            };
            Check { name: format!("welch t={t} n={n}"), pass, detail: format_witnesses(&ws) }
        })
        .collect()
}

/// Name of the check comparing the `e(l,k)` residues equivalent to a Kasami
/// exponent at `n = 5` with the expected set `{5, 7, 9, 25}`.
pub const KASAMI_N5_CHECK: &str = "kasami n=5 coincidence set";

/// Kasami `K_t = 2^2t - 2^t + 1` for `2 < t < n/2`, `gcd(t,n) = 1`: no
/// `e(t+1, i)` with `gcd(i,n) = 1` lies in its coset.
fn kasami(n_max: u32) -> Vec<Check> {
    let mut checks = Vec::new();
    if n_max >= 5 {
        let got = kasami_elk_residues(5);
        let expected: BTreeSet<BigNat> = [5u32, 7, 9, 25].into_iter().map(BigNat::from).collect();
        let list = |s: &BTreeSet<BigNat>| s.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",");
        checks.push(Check {
            name: KASAMI_N5_CHECK.to_string(),
            pass: got == expected,
            detail: format!("expected {{{}}}, observed {{{}}}", list(&expected), list(&got)),
        });
    }
    for n in 3..=n_max {
        let n64 = u64::from(n);
        for t in 3..n64 {
            if 2 * t >= n64 || gcd(t, n64) != 1 {
                continue;
            }
            let ws: Vec<ElkWitness> = elk_equivalence_scan(n, &Family::Kasami.exponent(t), false)
                .expect("shift branch cannot fail")
                .into_iter()
                .filter(|w| w.l == t + 1 && gcd(w.k, n64) == 1)
                .collect();
            checks.push(Check { name: format!("kasami t={t} n={n}"), pass: ws.is_empty(), detail: format_witnesses(&ws) });
        }
    }
    checks
}

/// `K_t^-1` meets some `e(l,k)` only for `t in {1, n-1}` (where `K_t` is the
/// Gold exponent 3, up to shift), with `n = 3, 5` as small exceptions.
fn kasami_inverse(n_max: u32) -> Vec<Check> {
    (3..=n_max)
        .map(|n| {
            let n64 = u64::from(n);
            let mut hits = BTreeSet::new();
            let mut detail = Vec::new();
            let mut gold_witness = false;
            for t in (1..n64).filter(|&t| gcd(t, n64) == 1) {
                match elk_equivalence_scan(n, &Family::Kasami.exponent(t), true) {
                    Ok(ws) if !ws.is_empty() => {
                        if t == 1 && has(&ws, WitnessKind::InverseShift, n64.div_ceil(2), 2) {
                            gold_witness = true;
                        }
                        hits.insert(t);
                        detail.push(format!("t={t}: {}", format_witnesses(&ws)));
                    }
                    Ok(_) => {}
                    Err(_) => detail.push(format!("t={t}: not invertible")),
                }
            }
            let pass = if n == 3 || n == 5 {
                true
            } else if n % 2 == 1 {
                hits.iter().all(|&t| t == 1 || t == n64 - 1) && gold_witness
            } else {
                hits.iter().all(|&t| t == 1 || t == n64 - 1)
            };
            let detail = if detail.is_empty() { "none".to_string() } else { detail.join("; ") };
            Check { name: format!("kasami-inverse n={n}"), pass, detail }
        })
        .collect()
}

/// Niho exponents at `n = 2t + 1`: only `t <= 2` meets `e(l,k)`.
fn niho(n_max: u32) -> Vec<Check> {
    (1..=(n_max.saturating_sub(1) / 2))
        .map(|t| {
            let n = 2 * t + 1;
            let family = if t % 2 == 0 { Family::NihoEven } else { Family::NihoOdd };
            let ws = elk_equivalence_both(n, &family.exponent(u64::from(t)));
            let pass = match t {
                1 => !ws.is_empty(),
                2 => has(&ws, WitnessKind::Shift, 2, 2) && has(&ws, WitnessKind::InverseShift, 3, 1),
                _ => ws.is_empty(),
            };
            Check { name: format!("{family} t={t} n={n}"), pass, detail: format_witnesses(&ws) }
        })
        .collect()
}

/// Dobbertin `D_t` at `n = 5t` (shift branch): coincidences only for
/// `t <= 2`.
fn dobbertin(n_max: u32) -> Result<Vec<Check>> {
    Ok(dobbertin_direct_scan(n_max)?
        .into_iter()
        .map(|(n, ws)| {
            let t = n / 5;
            let pass = match t {
                1 => has(&ws, WitnessKind::Shift, 4, 4),
                2 => has(&ws, WitnessKind::Shift, 9, 2),
                _ => ws.is_empty(),
            };
            Check { name: format!("dobbertin t={t} n={n}"), pass, detail: format_witnesses(&ws) }
        })
        .collect())
}

/// `D_t^-1`: witnesses only at `n = 5`; for even `t`, `3` divides both `D_t`
/// and `2^n - 1`, so there is no inverse.
fn dobbertin_inverse(n_max: u32) -> Result<Vec<Check>> {
    Ok(dobbertin_inverse_scan(n_max)?
        .into_iter()
        .map(|row| {
            let (pass, detail) = match &row.status {
                InverseScanStatus::Witnesses { witnesses } => {
                    let pass = if row.t == 1 { has(witnesses, WitnessKind::InverseShift, 4, 1) } else { row.t % 2 == 1 && witnesses.is_empty() };
                    (pass, format_witnesses(witnesses))
                }
                InverseScanStatus::NotInvertible { gcd } => {
                    (row.t % 2 == 0 && gcd == "3", format!("skipped: not invertible, gcd = {gcd}"))
                }
            };
            Check { name: format!("dobbertin-inverse t={} n={}", row.t, row.n), pass, detail }
        })
        .collect())
}

fn summarize(name: &str, total: u64, bad: Vec<String>) -> Check {
    let detail = if bad.is_empty() {
        format!("{total} cases")
    } else {
        format!("{} of {total} cases failed, first: {}", bad.len(), bad[0])
    };
    Check { name: name.to_string(), pass: bad.is_empty(), detail }
}

fn lemmas(n_max: u32) -> Vec<Check> {
    let mut checks = Vec::new();

    // Reflection of the stride around n/2.
    let (mut total, mut bad) = (0, Vec::new());
    for n in 4..=n_max {
        let m = u64::from(n / 2);
        for k in 1..m {
            for l in 1..=u64::from(n) {
                total += 1;
                if !reflect_k(l, k, n).map(|r| r.holds()).unwrap_or(false) {
                    bad.push(format!("l={l} k={k} n={n}"));
                }
            }
        }
    }
    checks.push(summarize("reflection", total, bad));

    // Weight of e(l,k) is l when gcd(k,n) = 1 and l <= n.
    let (mut total, mut bad) = (0, Vec::new());
    for n in 1..=n_max {
        let n64 = u64::from(n);
        for k in (1..=n64).filter(|&k| gcd(k, n64) == 1) {
            for l in 1..=n64 {
                total += 1;
                if weight(&elk_residue(l, k, n)) != l {
                    bad.push(format!("l={l} k={k} n={n}"));
                }
            }
        }
    }
    checks.push(summarize("weight-coprime-stride", total, bad));

    // Even n, gcd(n, 2t) = 2, 0 < m < n/2.
    let (mut total, mut bad) = (0, Vec::new());
    for n in (4..=n_max).step_by(2) {
        let n64 = u64::from(n);
        let h = n64 / 2;
        for t in (1..n64).filter(|&t| gcd(n64, 2 * t) == 2) {
            for m in 1..h {
                total += 1;
                let w = |l: u64| weight(&elk_residue(l, 2 * t, n));
                let ok = w(m) == m
                    && w(h + m) == h
                    && w(n64 + m) == h + m
                    && elk_residue(3 * h + m, 2 * t, n) == elk_residue(m, 2 * t, n);
                if !ok {
                    bad.push(format!("m={m} t={t} n={n}"));
                }
            }
        }
    }
    checks.push(summarize("weight-even-stride", total, bad));

    // (2^r + 1) e((n+1)/2, 2r) is a power of two for odd n, gcd(r,n) = 1.
    let (mut total, mut bad) = (0, Vec::new());
    for n in (3..=n_max).step_by(2) {
        let n64 = u64::from(n);
        for r in (1..n64).filter(|&r| gcd(r, n64) == 1) {
            total += 1;
            let product = (Family::Gold.exponent(r)) * e_lk(n64.div_ceil(2), 2 * r);
            if weight(&reduce_mod_mersenne(&product, n)) != 1 {
                bad.push(format!("r={r} n={n}"));
            }
        }
    }
    checks.push(summarize("gold-inverse", total, bad));

    // Fast gcd identity against big-integer gcds.
    let (mut total, mut bad) = (0, Vec::new());
    for n in 1..=n_max.max(2) * 2 {
        for l in 2..=12 {
            for k in 1..=12 {
                total += 1;
                if thm_sufficient(l, k, u64::from(n)) != thm_sufficient_direct(l, k, n) {
                    bad.push(format!("l={l} k={k} n={n}"));
                }
            }
        }
    }
    checks.push(summarize("fast-gcd-identity", total, bad));
    checks
}

/// Residues `e(l,k) mod 2^n - 1` (`1 <= l, k < n`) cyclotomic equivalent,
/// in either branch, to some valid Kasami exponent.
pub fn kasami_elk_residues(n: u32) -> BTreeSet<BigNat> {
    let mut out = BTreeSet::new();
    for t in Family::Kasami.valid_params(n) {
        for w in elk_equivalence_both(n, &Family::Kasami.exponent(t)) {
            out.insert(elk_residue(w.l, w.k, n).into_value());
        }
    }
    out
}

pub fn parse_suites(list: &str) -> Result<Vec<Suite>> {
    if list == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    list.split(',')
        .map(|s| Suite::parse(s.trim()).ok_or_else(|| Error::Precondition(format!("unknown suite {s:?}"))))
        .collect()
}
