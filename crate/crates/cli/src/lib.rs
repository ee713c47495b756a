//! Library side of the `apnforge` command: argument handling, record
//! encodings and the scan checkpoint journal.

pub mod checkpoint;
pub mod cli;
pub mod codec;
pub mod range;
