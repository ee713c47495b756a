//! Append-only journal of finished scan cells.
//!
//! Each line is `l,k,n<TAB><record as JSON>`. Lines are appended and synced
//! one at a time, so after a crash at most the final line is torn; it is
//! dropped and truncated away on reopen.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::Path;

use apnforge::scan::{CellKey, ScanRecord};

/// Decodes one journal line (without its newline). The key prefix must
/// agree with the record.
pub fn decode_line(line: &str) -> Option<ScanRecord> {
    let (key, json) = line.split_once('\t')?;
    let mut parts = key.split(',');
    let l = parts.next()?.parse().ok()?;
    let k = parts.next()?.parse().ok()?;
    let n = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    let record: ScanRecord = serde_json::from_str(json).ok()?;
    apnforge::exponent::parse_decimal(&record.exponent).ok()?;
    (record.key() == CellKey { l, k, n }).then_some(record)
}

pub fn encode_line(record: &ScanRecord) -> String {
    let json = serde_json::to_string(record).expect("records always serialize");
    format!("{},{},{}\t{json}\n", record.l, record.k, record.n)
}

pub struct Journal {
    file: File,
    done: BTreeMap<CellKey, ScanRecord>,
}

impl Journal {
    /// Opens (or creates) the journal at `path`, loading every intact line.
    pub fn open(path: &Path) -> std::io::Result<Journal> {
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(path)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let mut done = BTreeMap::new();
        let mut valid = 0usize;
        for chunk in bytes.split_inclusive(|&b| b == b'\n') {
            let Some(body) = chunk.strip_suffix(b"\n") else { break };
            let Some(record) = std::str::from_utf8(body).ok().and_then(decode_line) else { break };
            done.insert(record.key(), record);
            valid += chunk.len();
        }
        if valid < bytes.len() {
            file.set_len(valid as u64)?;
            file.sync_all()?;
        }
        Ok(Journal { file, done })
    }

    pub fn contains(&self, key: &CellKey) -> bool {
        self.done.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.done.len()
    }

    pub fn is_empty(&self) -> bool {
        self.done.is_empty()
    }

    pub fn append(&mut self, record: ScanRecord) -> std::io::Result<()> {
        self.file.write_all(encode_line(&record).as_bytes())?;
        self.file.sync_data()?;
        self.done.insert(record.key(), record);
        Ok(())
    }

    /// Every journaled record, in canonical order.
    pub fn records(&self) -> impl Iterator<Item = &ScanRecord> {
        self.done.values()
    }
}
