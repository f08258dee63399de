use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use emi_core::corpus::{Chunk, SpeechRecord};
use emi_core::scoring::{ScoredChunk, SessionAggregate};
use emi_core::stats::TimeSeriesTable;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{data, Result};

pub const CHUNKS: &str = "chunks.jsonl";
pub const REJECTIONS: &str = "rejections.csv";
pub const MALFORMED: &str = "malformed.csv";
pub const MODEL: &str = "model.vec";
pub const SCORES: &str = "scores.csv";
pub const AGGREGATES: &str = "aggregates.csv";
pub const TREND: &str = "trend.csv";
pub const VALIDATION: &str = "validation.csv";
pub const COEFFICIENTS: &str = "coefficients.csv";
pub const MODELS: &str = "models.csv";
pub const CROSSCORR: &str = "crosscorr.csv";

/// Path of an artifact produced by an earlier stage, or an error naming
/// the command that produces it.
pub fn upstream(workdir: &Path, name: &str, producer: &str) -> Result<PathBuf> {
    let p = workdir.join(name);
    if p.is_file() {
        Ok(p)
    } else {
        Err(data(format!(
            "missing {}; run `emi {producer}` with the same --workdir first",
            p.display()
        )))
    }
}

pub fn input_file(p: &Path, what: &str) -> Result<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(data(format!("{what} {} does not exist", p.display())))
    }
}

#[derive(Debug, Serialize)]
pub struct Malformed {
    pub line: usize,
    pub error: String,
}

pub struct SpeechInput {
    pub records: Vec<SpeechRecord>,
    pub malformed: Vec<Malformed>,
    pub lines: usize,
}

/// Largest tolerated number of malformed lines: 1% of the input, and at
/// least one.
pub fn malformed_limit(lines: usize) -> usize {
    (lines / 100).max(1)
}

/// Reads speech records from JSONL. Lines that fail to parse or validate
/// are collected with their 1-based line numbers.
pub fn read_speeches(path: &Path) -> Result<SpeechInput> {
    let f = File::open(path).map_err(|e| data(format!("cannot open {}: {e}", path.display())))?;
    let mut out = SpeechInput {
        records: Vec::new(),
        malformed: Vec::new(),
        lines: 0,
    };
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.lines += 1;
        let parsed = serde_json::from_str::<SpeechRecord>(&line)
            .map_err(|e| e.to_string())
            .and_then(|r| r.validate().map(|_| r).map_err(|e| e.to_string()));
        match parsed {
            Ok(r) => out.records.push(r),
            Err(error) => out.malformed.push(Malformed { line: i + 1, error }),
        }
    }
    Ok(out)
}

/// Strict JSONL reader for files written by this tool.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).map_err(|e| data(format!("cannot open {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| data(format!("{}:{}: {e}", path.display(), i + 1)))?,
        );
    }
    Ok(out)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| data(format!("cannot open {}: {e}", path.display())))?;
    rdr.deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| data(format!("{}: row {}: {e}", path.display(), i + 2))))
        .collect()
}

pub fn read_chunks(path: &Path) -> Result<Vec<Chunk>> {
    read_jsonl(path)
}

pub fn read_scores(path: &Path) -> Result<Vec<ScoredChunk>> {
    read_csv(path)
}

pub fn read_aggregates(path: &Path) -> Result<Vec<SessionAggregate>> {
    read_csv(path)
}

/// Reads a session series and log-transforms the listed columns that it
/// contains.
pub fn read_series<'a>(path: &Path, log_columns: impl IntoIterator<Item = &'a str>) -> Result<TimeSeriesTable> {
    let f = File::open(path).map_err(|e| data(format!("cannot open {}: {e}", path.display())))?;
    let mut t = TimeSeriesTable::from_csv(f).map_err(|e| data(format!("{}: {e}", path.display())))?;
    for c in log_columns {
        if t.has(c) {
            t.log_transform(c).map_err(|e| data(format!("{}: log of {c}: {e}", path.display())))?;
        }
    }
    Ok(t)
}
