//! Acceptance criteria, one PASS/FAIL line each. Every criterion runs even
//! when an earlier one fails; the process exits nonzero if any failed.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use apnforge::apn::{diff_spectrum_monomial, full_uniformity_oracle};
use apnforge::exponent::{e_lk, elk_residue, mod_inverse, reduce_mod_mersenne, BigNat};
use apnforge::family::{
    dobbertin_direct_scan, dobbertin_inverse_scan, family_exponent, Family, InverseScanStatus, WitnessKind,
};
use apnforge::field::{is_irreducible, FieldCtx};
use apnforge::kernel::ScanOptions;
use apnforge::scan::ScanRecord;
use apnforge::theorems::{kasami_elk_residues, run_suite, Suite, KASAMI_N5_CHECK};
use apnforge::zero_apn::{cascade_sufficient, image_class, image_gcd_direct, is_zero_apn_exact, thm_sufficient};
use apnforge_cli::codec::decode_csv;
use num_integer::gcd;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_apnforge");

/// Reference cells with known APN dimensions: `(l, i, dimensions)`.
const REFERENCE_CELLS: &[(u64, u64, &[u32])] = &[
    (3, 1, &[5]),
    (3, 2, &[2, 4, 5]),
    (3, 3, &[3, 5]),
    (3, 4, &[2, 4, 5, 8]),
    (3, 5, &[5]),
    (3, 6, &[2, 3, 4, 5, 6, 12]),
    (3, 7, &[5, 7]),
    (3, 8, &[2, 4, 5, 8, 16]),
    (4, 1, &[2, 5, 7]),
    (4, 2, &[5, 7]),
    (4, 3, &[2, 5, 7]),
    (4, 4, &[5, 7]),
    (4, 5, &[2, 7]),
    (4, 6, &[5, 7]),
    (4, 7, &[2, 5]),
    (5, 1, &[3, 9]),
    (5, 2, &[3, 9]),
    (5, 3, &[3]),
    (5, 4, &[3, 9]),
    (5, 5, &[3, 5, 9]),
    (6, 1, &[2, 4, 7, 11]),
    (6, 2, &[2, 7, 11]),
    (6, 3, &[2, 3, 4, 7, 11]),
    (6, 4, &[2, 4, 7, 11]),
    (7, 1, &[5, 13]),
    (7, 2, &[5, 13]),
    (7, 3, &[5, 13]),
    (8, 1, &[2, 3, 5, 6, 9, 15]),
    (8, 2, &[3, 5, 9, 15]),
    (8, 3, &[2, 5]),
    (9, 1, &[5, 7, 17]),
    (9, 2, &[2, 4, 5, 7, 10, 17]),
];

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn reference_scan() -> &'static Result<Vec<ScanRecord>, String> {
    static SCAN: OnceLock<Result<Vec<ScanRecord>, String>> = OnceLock::new();
    SCAN.get_or_init(|| {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let out = dir.path().join("reference.csv");
        let status = Command::new(BIN)
            .args(["scan", "--l", "3:9", "--i", "1:8", "--n", "2:18", "--out"])
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("scan exited with {}", status.status));
        }
        decode_csv(&std::fs::read(&out).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
    })
}

fn c1_gen_dims() -> Outcome {
    let start = Instant::now();
    let out = Command::new(BIN)
        .args(["gen-dims", "--l", "100", "--k", "100", "--n-max", "100000"])
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let count = String::from_utf8_lossy(&out.stdout).trim().to_string();
    ensure(out.status.success(), format!("exit status {}", out.status))?;
    ensure(count == "24242", format!("count {count}, expected 24242"))?;
    ensure(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!("24242 dimensions in {:.2} s", elapsed.as_secs_f64()))
}

fn c2_x21() -> Outcome {
    let start = Instant::now();
    let d = BigNat::from(21u32);
    for n in 2..=20u32 {
        let got = is_zero_apn_exact(&d, &FieldCtx::new(n).unwrap(), &ScanOptions::default()).unwrap().is_zero_apn;
        ensure(got == (n % 6 != 0), format!("n = {n}: 0-APN = {got}"))?;
    }
    ensure(start.elapsed() < Duration::from_secs(60), "took over a minute")?;
    Ok("0-APN exactly for 6 not dividing n, 2 <= n <= 20".into())
}

fn c3_reference_cells() -> Outcome {
    let records = reference_scan().as_ref().map_err(Clone::clone)?;
    let mut apn: BTreeMap<(u64, u64), BTreeSet<u32>> = BTreeMap::new();
    for r in records {
        ensure(r.apn.is_some(), format!("cell l={} i={} n={} undecided ({})", r.l, r.k, r.n, r.method))?;
        if r.apn == Some(true) {
            apn.entry((r.l, r.k)).or_default().insert(r.n);
        }
    }
    for &(l, i, dims) in REFERENCE_CELLS {
        let want: BTreeSet<u32> = dims.iter().copied().filter(|n| (2..=18).contains(n)).collect();
        let got = apn.get(&(l, i)).cloned().unwrap_or_default();
        ensure(got == want, format!("e({l},{i}): computed {got:?}, expected {want:?}"))?;
    }
    Ok(format!("{} filled cells match over n in [2,18] ({} records)", REFERENCE_CELLS.len(), records.len()))
}

fn c4_closure() -> Outcome {
    let records = reference_scan().as_ref().map_err(Clone::clone)?;
    let hits: Vec<&ScanRecord> = records.iter().filter(|r| r.apn == Some(true)).collect();
    for r in &hits {
        ensure(!r.families.is_empty(), format!("APN hit l={} i={} n={} d={} unclassified", r.l, r.k, r.n, r.exponent))?;
    }
    Ok(format!("all {} APN hits belong to a known family", hits.len()))
}

fn c5_dobbertin_inverse() -> Outcome {
    let start = Instant::now();
    let rows = dobbertin_inverse_scan(100).map_err(|e| e.to_string())?;
    let mut exceptions = Vec::new();
    let mut n10 = String::new();
    for row in &rows {
        match &row.status {
            InverseScanStatus::Witnesses { witnesses } if !witnesses.is_empty() => exceptions.push(row.n),
            InverseScanStatus::NotInvertible { gcd } if row.n == 10 => n10 = format!("not invertible, gcd = {gcd}"),
            InverseScanStatus::Witnesses { .. } if row.n == 10 => n10 = "no witness".into(),
            _ => {}
        }
    }
    ensure(rows.len() == 20, "expected n = 5, 10, ..., 100")?;
    ensure(exceptions == vec![5], format!("witnesses at n in {exceptions:?}"))?;
    ensure(start.elapsed() < Duration::from_secs(1800), "took over 30 minutes")?;
    Ok(format!("witnesses only at n = 5; n = 10: {n10} (consistent with the t = 1 statement, not with n in {{5, 10}})"))
}

fn c6_dobbertin_direct() -> Outcome {
    let rows = dobbertin_direct_scan(100).map_err(|e| e.to_string())?;
    let with: Vec<u32> = rows.iter().filter(|(_, ws)| !ws.is_empty()).map(|(n, _)| *n).collect();
    ensure(with == vec![5, 10], format!("witnesses at n in {with:?}"))?;
    let has = |n: u32, l: u64, k: u64| {
        rows.iter().any(|(m, ws)| *m == n && ws.iter().any(|w| w.kind == WitnessKind::Shift && w.l == l && w.k == k))
    };
    ensure(has(5, 4, 4) && elk_residue(4, 4, 5).to_u64() == Some(29), "e(4,4) = 29 at n = 5 missing")?;
    ensure(has(10, 9, 2) && elk_residue(9, 2, 10).to_u64() == Some(426), "e(9,2) = 426 at n = 10 missing")?;
    Ok("witnesses exactly at n = 5 (e(4,4) = 29) and n = 10 (e(9,2) = 426)".into())
}

fn suite_outcome(suite: Suite, n_max: u32, skip: &[&str]) -> Outcome {
    let report = run_suite(suite, Some(n_max)).map_err(|e| e.to_string())?;
    let failures: Vec<String> =
        report.failures().filter(|c| !skip.contains(&c.name.as_str())).map(|c| format!("{}: {}", c.name, c.detail)).collect();
    let counted = report.checks.iter().filter(|c| !skip.contains(&c.name.as_str())).count();
    ensure(failures.is_empty(), failures.join("; "))?;
    Ok(format!("{counted} checks up to n = {n_max}"))
}

fn c7_welch() -> Outcome {
    suite_outcome(Suite::Welch, 41, &[])
}

fn c7_kasami() -> Outcome {
    suite_outcome(Suite::Kasami, 19, &[KASAMI_N5_CHECK])
}

fn c7_kasami_n5() -> Outcome {
    let got: Vec<String> = kasami_elk_residues(5).iter().map(|b| b.to_string()).collect();
    ensure(got == ["5", "7", "9", "25"], format!("expected {{5,7,9,25}}, observed {{{}}}", got.join(",")))?;
    Ok("{5,7,9,25}".into())
}

fn c7_kasami_inverse() -> Outcome {
    suite_outcome(Suite::KasamiInverse, 31, &[])
}

fn c7_niho() -> Outcome {
    suite_outcome(Suite::Niho, 41, &[])
}

fn c8a_uniformity_oracle() -> Outcome {
    let opts = ScanOptions::default();
    let mut count = 0;
    for n in 1..=10u32 {
        let ctx = FieldCtx::new(n).unwrap();
        for d in 0..=ctx.mask() {
            let d = BigNat::from(d);
            let fast = diff_spectrum_monomial(&d, &ctx, &opts).unwrap().uniformity;
            let slow = full_uniformity_oracle(&d, &ctx).unwrap();
            ensure(fast == slow, format!("n = {n}, d = {d}: {fast} vs {slow}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} exponents, 1 <= n <= 10"))
}

fn c8b_gcd_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0008);
    let mut tested = 0;
    while tested < 500 {
        let n: u32 = rng.gen_range(1..=64);
        let (l, k): (u64, u64) = (rng.gen_range(1..=500), rng.gen_range(1..=500));
        if gcd(k, u64::from(n)) != 1 {
            continue;
        }
        let formula = image_class(l, k, n).unwrap().gcd_value;
        let direct = image_gcd_direct(l, k, n);
        ensure(formula == direct, format!("l={l} k={k} n={n}: {formula} vs {direct}"))?;
        tested += 1;
    }
    Ok("500 random triples".into())
}

fn c8c_soundness() -> Outcome {
    let (mut sound, mut subsumed) = (0, 0);
    for l in 2..=6u64 {
        for k in 1..=6u64 {
            let d = e_lk(l, k);
            for n in 2..=18u32 {
                let n64 = u64::from(n);
                if thm_sufficient(l, k, n64) {
                    let exact = is_zero_apn_exact(&d, &FieldCtx::new(n).unwrap(), &ScanOptions::default()).unwrap();
                    ensure(exact.is_zero_apn, format!("l={l} k={k} n={n}: condition holds but not 0-APN"))?;
                    sound += 1;
                }
                if cascade_sufficient(l, k, n64) {
                    ensure(thm_sufficient(l, k, n64), format!("l={l} k={k} n={n}: cascade not subsumed"))?;
                    subsumed += 1;
                }
            }
        }
    }
    Ok(format!("{sound} sufficient cells 0-APN, {subsumed} cascade cells subsumed"))
}

fn c8d_lemmas() -> Outcome {
    let report = run_suite(Suite::Lemmas, Some(40)).map_err(|e| e.to_string())?;
    let failures: Vec<String> = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
    ensure(failures.is_empty(), failures.join("; "))?;
    Ok(report.checks.iter().map(|c| format!("{} ({})", c.name, c.detail)).collect::<Vec<_>>().join(", "))
}

fn c8e_representation() -> Outcome {
    let opts = ScanOptions::default();
    for n in [8u32, 9, 10] {
        let mut moduli = ((1u128 << n) | 1..1u128 << (n + 1)).step_by(2).filter(|&f| is_irreducible(f));
        let (a, b) = (moduli.next().unwrap(), moduli.last().unwrap());
        let f = FieldCtx::with_modulus(n, a).unwrap();
        let g = FieldCtx::with_modulus(n, b).unwrap();
        for d in 0..=f.mask() {
            let d = BigNat::from(d);
            let z = |c: &FieldCtx| is_zero_apn_exact(&d, c, &opts).unwrap().is_zero_apn;
            let u = |c: &FieldCtx| diff_spectrum_monomial(&d, c, &opts).unwrap().is_apn();
            ensure(z(&f) == z(&g) && u(&f) == u(&g), format!("n={n} d={d} differs between {a:#x} and {b:#x}"))?;
        }
    }
    Ok("all exponents, n in {8,9,10}, smallest vs largest irreducible modulus".into())
}

fn c8f_gold_inverse() -> Outcome {
    let mut count = 0;
    for n in (3..=31u32).step_by(2) {
        for r in (1..u64::from(n)).filter(|&r| gcd(r, u64::from(n)) == 1) {
            let gold = family_exponent(Family::Gold, r, n).exponent;
            let product = reduce_mod_mersenne(&(gold.clone() * e_lk(u64::from(n).div_ceil(2), 2 * r)), n);
            ensure(product.value().count_ones() == 1, format!("r={r} n={n}: product {product}"))?;
            let inv = reduce_mod_mersenne(&mod_inverse(&gold, n).unwrap(), n);
            let elk = elk_residue(u64::from(n).div_ceil(2), 2 * r, n);
            ensure((0..n).any(|a| elk.rotate(a) == inv), format!("r={r} n={n}: inverse not in coset"))?;
            count += 1;
        }
    }
    Ok(format!("{count} (r, n) pairs"))
}

fn main() {
    let criteria: &[Criterion] = &[
        ("1", "gen-dims e(100,100) up to 100000", c1_gen_dims),
        ("2", "x^21 0-APN iff 6 does not divide n", c2_x21),
        ("3", "reference APN cells, n <= 18", c3_reference_cells),
        ("4", "APN hits lie in known families", c4_closure),
        ("5", "Dobbertin inverse scan n <= 100", c5_dobbertin_inverse),
        ("6", "Dobbertin direct exceptions", c6_dobbertin_direct),
        ("7-welch", "Welch coincidences", c7_welch),
        ("7-kasami", "Kasami t > 2 never equals e(t+1,i)", c7_kasami),
        ("7-kasami-n5", "Kasami coincidence set at n = 5", c7_kasami_n5),
        ("7-kasami-inverse", "Kasami inverse only for t in {1, n-1}", c7_kasami_inverse),
        ("7-niho", "Niho coincidences", c7_niho),
        ("8a", "single-derivative uniformity = full oracle", c8a_uniformity_oracle),
        ("8b", "image gcd formula = BigNat gcd", c8b_gcd_formula),
        ("8c", "sufficient condition sound, cascade subsumed", c8c_soundness),
        ("8d", "weight and reflection lemmas", c8d_lemmas),
        ("8e", "verdicts independent of modulus", c8e_representation),
        ("8f", "Gold inverse coset identity", c8f_gold_inverse),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for (id, title, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("acceptance {id:<17} PASS  {title}: {detail} [{secs:.1} s]"),
            Err(detail) => {
                println!("acceptance {id:<17} FAIL  {title}: {detail} [{secs:.1} s]");
                failed.push(*id);
            }
        }
    }
    println!("acceptance summary: {} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("acceptance failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
