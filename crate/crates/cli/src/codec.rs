//! CSV and JSON encodings of scan records.
//!
//! CSV columns: `l,k,n,exponent,weight,zero_apn,apn,uniformity,families,method,elapsed_ms`.
//! Unknown verdicts are empty fields and family tags are joined with `;`.

use std::io::Write;

use anyhow::{anyhow, bail, Context, Result};
use apnforge::exponent::parse_decimal;
use apnforge::scan::ScanRecord;
use serde::Serialize;

pub const CSV_HEADER: [&str; 11] =
    ["l", "k", "n", "exponent", "weight", "zero_apn", "apn", "uniformity", "families", "method", "elapsed_ms"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn csv_row(r: &ScanRecord) -> [String; 11] {
    [
        r.l.to_string(),
        r.k.to_string(),
        r.n.to_string(),
        r.exponent.clone(),
        r.weight.to_string(),
        opt(&r.zero_apn),
        opt(&r.apn),
        opt(&r.uniformity),
        r.families.join(";"),
        r.method.clone(),
        r.elapsed_ms.to_string(),
    ]
}

pub fn encode_csv(records: &[ScanRecord]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(csv_row(r))?;
    }
    w.into_inner().map_err(|e| anyhow!("csv buffer: {e}"))
}

fn parse_num<T: std::str::FromStr>(field: &str, name: &str) -> Result<T> {
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        bail!("field {name}: expected an unsigned integer, got {field:?}");
    }
    field.parse().map_err(|_| anyhow!("field {name}: {field:?} out of range"))
}

fn parse_opt_num(field: &str, name: &str) -> Result<Option<u64>> {
    if field.is_empty() {
        Ok(None)
    } else {
        parse_num(field, name).map(Some)
    }
}

fn parse_opt_bool(field: &str, name: &str) -> Result<Option<bool>> {
    match field {
        "" => Ok(None),
        "true" => Ok(Some(true)),
        "false" => Ok(Some(false)),
        _ => bail!("field {name}: expected true, false or empty, got {field:?}"),
    }
}

/// Checks the field-level constraints shared by both decoders.
fn validate(r: &ScanRecord) -> Result<()> {
    parse_decimal(&r.exponent).map_err(|e| anyhow!("field exponent: {e}"))?;
    if r.families.iter().any(|f| f.is_empty() || f.contains(';')) {
        bail!("field families: empty or malformed tag");
    }
    Ok(())
}

pub fn decode_csv(bytes: &[u8]) -> Result<Vec<ScanRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header = reader.headers().context("reading CSV header")?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        bail!("unexpected CSV header");
    }
    let mut out = Vec::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.with_context(|| format!("CSV row {}", line + 1))?;
        if row.len() != CSV_HEADER.len() {
            bail!("CSV row {}: expected {} fields, got {}", line + 1, CSV_HEADER.len(), row.len());
        }
        let f = |i: usize| &row[i];
        let families = if f(8).is_empty() { Vec::new() } else { f(8).split(';').map(str::to_string).collect() };
        let record = ScanRecord {
            l: parse_num(f(0), "l")?,
            k: parse_num(f(1), "k")?,
            n: parse_num(f(2), "n")?,
            exponent: f(3).to_string(),
            weight: parse_num(f(4), "weight")?,
            zero_apn: parse_opt_bool(f(5), "zero_apn")?,
            apn: parse_opt_bool(f(6), "apn")?,
            uniformity: parse_opt_num(f(7), "uniformity")?,
            families,
            method: f(9).to_string(),
            elapsed_ms: parse_num(f(10), "elapsed_ms")?,
        };
        validate(&record).with_context(|| format!("CSV row {}", line + 1))?;
        out.push(record);
    }
    Ok(out)
}

pub fn encode_json(records: &[ScanRecord]) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(records)?;
    out.push(b'\n');
    Ok(out)
}

pub fn decode_json(bytes: &[u8]) -> Result<Vec<ScanRecord>> {
    let records: Vec<ScanRecord> = serde_json::from_slice(bytes)?;
    for r in &records {
        validate(r)?;
    }
    Ok(records)
}

pub fn encode(records: &[ScanRecord], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => encode_csv(records),
        Format::Json => encode_json(records),
    }
}

pub fn decode(bytes: &[u8], format: Format) -> Result<Vec<ScanRecord>> {
    match format {
        Format::Csv => decode_csv(bytes),
        Format::Json => decode_json(bytes),
    }
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename,
/// so readers never observe a partial file.
pub fn write_atomic(path: &std::path::Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

/// Serializes any report as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<ScanRecord> {
        vec![
            ScanRecord {
                l: 3,
                k: 2,
                n: 5,
                exponent: "21".into(),
                weight: 3,
                zero_apn: Some(true),
                apn: Some(true),
                uniformity: Some(2),
                families: vec!["Kasami(i=2)".into(), "Kasami(i=3)".into()],
                method: "exact-log-table".into(),
                elapsed_ms: 0,
            },
            ScanRecord {
                l: 3,
                k: 2,
                n: 40,
                exponent: "21".into(),
                weight: 3,
                zero_apn: None,
                apn: None,
                uniformity: None,
                families: vec![],
                method: "skipped-above-cap".into(),
                elapsed_ms: 7,
            },
        ]
    }

    #[test]
    fn csv_layout() {
        let text = String::from_utf8(encode_csv(&sample()).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "l,k,n,exponent,weight,zero_apn,apn,uniformity,families,method,elapsed_ms");
        assert_eq!(lines[1], "3,2,5,21,3,true,true,2,Kasami(i=2);Kasami(i=3),exact-log-table,0");
        assert_eq!(lines[2], "3,2,40,21,3,,,,,skipped-above-cap,7");
    }

    #[test]
    fn round_trips_through_both_encodings() {
        let recs = sample();
        assert_eq!(decode_csv(&encode_csv(&recs).unwrap()).unwrap(), recs);
        assert_eq!(decode_json(&encode_json(&recs).unwrap()).unwrap(), recs);
        let via_json = decode_json(&encode_json(&decode_csv(&encode_csv(&recs).unwrap()).unwrap()).unwrap()).unwrap();
        assert_eq!(via_json, recs);
    }

    #[test]
    fn rejects_bad_rows() {
        let header = CSV_HEADER.join(",");
        for row in [
            "x,2,5,21,3,true,true,2,,m,0",
            "3,2,5,2a,3,true,true,2,,m,0",
            "3,2,5,21,3,yes,true,2,,m,0",
            "3,2,5,21,3,true,true,2,,m",
            "3,2,5,21,3,true,true,2,a;;b,m,0",
        ] {
            let text = format!("{header}\n{row}\n");
            assert!(decode_csv(text.as_bytes()).is_err(), "{row}");
        }
        assert!(decode_csv(b"a,b\n").is_err());
        assert!(decode_json(b"[{\"l\":1}]").is_err());
    }
}
