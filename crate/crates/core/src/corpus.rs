//! Speech ingestion: tokenisation, mechanical quality filters and chunking.

use std::collections::HashSet;
use std::fmt;
use std::ops::Range;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::{self, Execution};

#[derive(Debug, Error, PartialEq)]
pub enum CorpusError {
    #[error("common-word ratio is undefined for a speech with no tokens")]
    EmptySpeech,
    #[error("speech {0} has empty text")]
    EmptyText(String),
    #[error("speech {id}: session {given} does not match date {date} (expected {expected})")]
    SessionMismatch {
        id: String,
        given: u32,
        expected: u32,
        date: NaiveDate,
    },
    #[error("date {0} precedes the first congressional session")]
    DateTooEarly(NaiveDate),
    #[error("invalid chunk parameters: target {target}, min_size {min_size}")]
    InvalidChunkParams { target: usize, min_size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Chamber {
    #[serde(alias = "H", alias = "house")]
    House,
    #[serde(alias = "S", alias = "senate")]
    Senate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Party {
    D,
    R,
    #[serde(other)]
    Other,
}

impl Party {
    pub fn is_major(self) -> bool {
        matches!(self, Party::D | Party::R)
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::D => "D",
            Party::R => "R",
            Party::Other => "Other",
        })
    }
}

impl fmt::Display for Chamber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chamber::House => "House",
            Chamber::Senate => "Senate",
        })
    }
}

/// Year in which the first congressional session opened.
pub const FIRST_SESSION_YEAR: i32 = 1789;

/// Congressional session (two-year period opening in odd years) of a date.
pub fn session_for_date(date: NaiveDate) -> Result<u32, CorpusError> {
    let year = date.year();
    if year < FIRST_SESSION_YEAR {
        return Err(CorpusError::DateTooEarly(date));
    }
    Ok(((year - FIRST_SESSION_YEAR) / 2 + 1) as u32)
}

/// First calendar year of a session.
pub fn session_start_year(session: u32) -> i32 {
    FIRST_SESSION_YEAR + 2 * (session as i32 - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeechRecord {
    pub speech_id: String,
    pub date: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session: Option<u32>,
    pub chamber: Chamber,
    pub party: Party,
    pub speaker: String,
    pub text: String,
    /// Set by an upstream procedural-speech classifier, when one was run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub is_procedural: Option<bool>,
}

impl SpeechRecord {
    /// Checks the record invariants and returns its session.
    pub fn validate(&self) -> Result<u32, CorpusError> {
        if self.text.is_empty() {
            return Err(CorpusError::EmptyText(self.speech_id.clone()));
        }
        let expected = session_for_date(self.date)?;
        match self.session {
            Some(given) if given != expected => Err(CorpusError::SessionMismatch {
                id: self.speech_id.clone(),
                given,
                expected,
                date: self.date,
            }),
            _ => Ok(expected),
        }
    }

    /// Session number, derived from the date when not given explicitly.
    pub fn session(&self) -> u32 {
        self.session
            .or_else(|| session_for_date(self.date).ok())
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedSpeech {
    pub speech_id: String,
    pub tokens: Vec<String>,
    pub token_count: usize,
}

impl TokenizedSpeech {
    pub fn new(speech_id: impl Into<String>, tokens: Vec<String>) -> Self {
        let token_count = tokens.len();
        TokenizedSpeech {
            speech_id: speech_id.into(),
            tokens,
            token_count,
        }
    }

    /// Tokens re-joined with single spaces; the key used for deduplication.
    pub fn normalized_text(&self) -> String {
        self.tokens.join(" ")
    }
}

/// Canonical tokenizer: casefold, split on Unicode whitespace, strip leading
/// and trailing non-alphanumeric characters, drop tokens left empty.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let t = raw.trim_matches(|c: char| !c.is_alphanumeric());
            if t.is_empty() {
                None
            } else {
                Some(t.to_lowercase())
            }
        })
        .collect()
}

pub fn tokenize_speech(record: &SpeechRecord) -> TokenizedSpeech {
    TokenizedSpeech::new(record.speech_id.clone(), tokenize(&record.text))
}

pub fn common_word_ratio(
    speech: &TokenizedSpeech,
    common_words: &HashSet<String>,
) -> Result<f64, CorpusError> {
    if speech.token_count == 0 {
        return Err(CorpusError::EmptySpeech);
    }
    let hits = speech
        .tokens
        .iter()
        .filter(|t| common_words.contains(t.as_str()))
        .count();
    Ok(hits as f64 / speech.token_count as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    /// Flagged by an upstream procedural-speech classifier.
    Procedural,
    NonMajorParty,
    TooShort,
    LowRatio,
    Duplicate,
}

impl RejectReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::Procedural => "procedural",
            RejectReason::NonMajorParty => "non_major_party",
            RejectReason::TooShort => "too_short",
            RejectReason::LowRatio => "low_ratio",
            RejectReason::Duplicate => "duplicate",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub speech_id: String,
    pub reason: RejectReason,
}

#[derive(Debug, Clone)]
pub struct FilterParams {
    pub threshold: f64,
    pub min_tokens: usize,
    pub common_words: HashSet<String>,
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams {
            threshold: 0.05,
            min_tokens: 11,
            common_words: crate::data::common_words(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSpeech {
    pub record: SpeechRecord,
    pub tokens: TokenizedSpeech,
}

#[derive(Debug, Clone, Default)]
pub struct FilterOutcome {
    /// Surviving records, in input order.
    pub kept: Vec<FilteredSpeech>,
    /// Rejected records, in input order.
    pub rejected: Vec<Rejection>,
}

impl FilterOutcome {
    pub fn kept_records(&self) -> Vec<SpeechRecord> {
        self.kept.iter().map(|k| k.record.clone()).collect()
    }
}

fn first_failure(
    record: &SpeechRecord,
    speech: &TokenizedSpeech,
    params: &FilterParams,
) -> Option<RejectReason> {
    if record.is_procedural == Some(true) {
        return Some(RejectReason::Procedural);
    }
    if !record.party.is_major() {
        return Some(RejectReason::NonMajorParty);
    }
    if speech.token_count == 0 || speech.token_count < params.min_tokens {
        return Some(RejectReason::TooShort);
    }
    match common_word_ratio(speech, &params.common_words) {
        Ok(r) if r >= params.threshold => None,
        _ => Some(RejectReason::LowRatio),
    }
}

/// Applies the mechanical filters. Duplicate detection runs over records
/// that passed every other filter; of a set of duplicates the earliest by
/// date (then input position) is kept.
pub fn filter_speeches(
    records: &[SpeechRecord],
    params: &FilterParams,
    exec: Execution,
) -> FilterOutcome {
    let checked: Vec<(TokenizedSpeech, Option<RejectReason>)> =
        par::map_slice(exec, records, |r| {
            let speech = tokenize_speech(r);
            let failure = first_failure(r, &speech, params);
            (speech, failure)
        });

    let mut reasons: Vec<Option<RejectReason>> = checked.iter().map(|(_, f)| *f).collect();
    let mut order: Vec<usize> = (0..records.len()).filter(|&i| reasons[i].is_none()).collect();
    order.sort_by_key(|&i| (records[i].date, i));
    let mut seen = HashSet::new();
    for i in order {
        if !seen.insert(checked[i].0.normalized_text()) {
            reasons[i] = Some(RejectReason::Duplicate);
        }
    }

    let mut out = FilterOutcome::default();
    for ((record, (tokens, _)), reason) in records.iter().zip(checked).zip(reasons) {
        match reason {
            None => out.kept.push(FilteredSpeech {
                record: record.clone(),
                tokens,
            }),
            Some(reason) => out.rejected.push(Rejection {
                speech_id: record.speech_id.clone(),
                reason,
            }),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkParams {
    target: usize,
    min_size: usize,
}

impl ChunkParams {
    pub fn new(target: usize, min_size: usize) -> Result<Self, CorpusError> {
        if target == 0 || min_size == 0 || min_size > target {
            return Err(CorpusError::InvalidChunkParams { target, min_size });
        }
        Ok(ChunkParams { target, min_size })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn min_size(&self) -> usize {
        self.min_size
    }
}

impl Default for ChunkParams {
    fn default() -> Self {
        ChunkParams {
            target: 150,
            min_size: 50,
        }
    }
}

/// Token ranges of the chunks of an `n`-token speech.
///
/// Cuts every `target` tokens; a trailing remainder shorter than `min_size`
/// is merged into the chunk before it.
pub fn chunk_bounds(n: usize, params: &ChunkParams) -> Vec<Range<usize>> {
    if n == 0 {
        return Vec::new();
    }
    if n <= params.target {
        return vec![0..n];
    }
    let mut bounds: Vec<Range<usize>> = (0..n / params.target)
        .map(|k| k * params.target..(k + 1) * params.target)
        .collect();
    let covered = bounds.last().map_or(0, |r| r.end);
    let remainder = n - covered;
    if remainder >= params.min_size {
        bounds.push(covered..n);
    } else if remainder > 0 {
        bounds.last_mut().expect("at least one full chunk").end = n;
    }
    bounds
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk {
    pub chunk_id: String,
    pub speech_id: String,
    pub ordinal: usize,
    pub session: u32,
    pub party: Party,
    pub chamber: Chamber,
    pub date: NaiveDate,
    pub length: usize,
    pub tokens: Vec<String>,
}

pub fn chunk_id(speech_id: &str, ordinal: usize) -> String {
    format!("{speech_id}#{ordinal}")
}

pub fn chunk_speech(speech: &FilteredSpeech, params: &ChunkParams) -> Vec<Chunk> {
    let record = &speech.record;
    chunk_bounds(speech.tokens.token_count, params)
        .into_iter()
        .enumerate()
        .map(|(ordinal, range)| Chunk {
            chunk_id: chunk_id(&record.speech_id, ordinal),
            speech_id: record.speech_id.clone(),
            ordinal,
            session: record.session(),
            party: record.party,
            chamber: record.chamber,
            date: record.date,
            length: range.len(),
            tokens: speech.tokens.tokens[range].to_vec(),
        })
        .collect()
}

/// Chunks every kept speech, preserving speech order.
pub fn chunk_corpus(speeches: &[FilteredSpeech], params: &ChunkParams, exec: Execution) -> Vec<Chunk> {
    par::map_slice(exec, speeches, |s| chunk_speech(s, params))
        .into_iter()
        .flatten()
        .collect()
}
