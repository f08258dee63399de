//! Dictionary construct vectors, chunk scoring, length adjustment,
//! z-scoring, EMI and session aggregates.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{tokenize, Chamber, Chunk, Party};
use crate::data::{self, DataDir};
use crate::embeddings::{cosine, doc_vector, EmbeddingError, EmbeddingModel};
use crate::par::{self, Execution};
use crate::stats::{self, StatsError};
pub use crate::stats::percentile_sorted;

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("dictionary {0}: duplicate entry {1:?}")]
    DuplicateEntry(Construct, String),
    #[error("dictionary {0}: entry {1:?} is not lowercase")]
    NotLowercase(Construct, String),
    #[error("dictionary {0} is empty")]
    EmptyDictionary(Construct),
    #[error("dictionary {0}: no entry resolves to an in-vocabulary word")]
    NothingResolved(Construct),
    #[error("construct vector has dimension {found}, model has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least 2 scored chunks, have {0}")]
    TooFewChunks(usize),
    #[error("{0} adjusted similarities have zero variance")]
    ZeroVariance(Construct),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construct {
    Evidence,
    Intuition,
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construct::Evidence => "evidence",
            Construct::Intuition => "intuition",
        })
    }
}

/// Keyword list for one conception of truth. Entries may be phrases.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructDictionary {
    pub name: Construct,
    pub entries: Vec<String>,
}

impl ConstructDictionary {
    /// Parses one entry per line; blank lines and `#` comments are skipped.
    pub fn from_text(name: Construct, text: &str) -> Result<Self, ScoringError> {
        let mut seen = HashSet::new();
        let mut entries = Vec::new();
        for e in data::list_entries(text) {
            if e.to_lowercase() != e {
                return Err(ScoringError::NotLowercase(name, e.to_string()));
            }
            if !seen.insert(e) {
                return Err(ScoringError::DuplicateEntry(name, e.to_string()));
            }
            entries.push(e.to_string());
        }
        if entries.is_empty() {
            return Err(ScoringError::EmptyDictionary(name));
        }
        Ok(ConstructDictionary { name, entries })
    }

    pub fn load(name: Construct, dir: &DataDir) -> Result<Self, ScoringError> {
        let file = match name {
            Construct::Evidence => data::EVIDENCE_FILE,
            Construct::Intuition => data::INTUITION_FILE,
        };
        Self::from_text(name, &dir.read(file)?)
    }

    pub fn shipped(name: Construct) -> Self {
        Self::load(name, &DataDir::embedded()).expect("shipped dictionaries are valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructVector {
    pub name: Construct,
    pub vector: Vec<f64>,
    pub n_resolved: usize,
    pub unresolved: Vec<String>,
}

/// Mean over resolved entries of each entry's vector. A phrase contributes
/// the mean of its in-vocabulary words; an entry with none is unresolved.
pub fn construct_vector(
    dict: &ConstructDictionary,
    model: &EmbeddingModel,
) -> Result<ConstructVector, ScoringError> {
    let d = model.dim();
    let mut sum = vec![0.0; d];
    let mut n_resolved = 0;
    let mut unresolved = Vec::new();
    for entry in &dict.entries {
        let vecs: Vec<&[f64]> = tokenize(entry).iter().filter_map(|w| model.vector(w)).collect();
        if vecs.is_empty() {
            unresolved.push(entry.clone());
            continue;
        }
        let k = vecs.len() as f64;
        for v in &vecs {
            for (s, x) in sum.iter_mut().zip(*v) {
                *s += x / k;
            }
        }
        n_resolved += 1;
    }
    if n_resolved == 0 {
        return Err(ScoringError::NothingResolved(dict.name));
    }
    let n = n_resolved as f64;
    sum.iter_mut().for_each(|s| *s /= n);
    Ok(ConstructVector {
        name: dict.name,
        vector: sum,
        n_resolved,
        unresolved,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredChunk {
    pub chunk_id: String,
    pub session: u32,
    pub party: Party,
    pub chamber: Chamber,
    pub length: usize,
    pub sim_e: f64,
    pub sim_i: f64,
    pub adj_e: f64,
    pub adj_i: f64,
    pub z_e: f64,
    pub z_i: f64,
    pub emi: f64,
}

#[derive(Debug, Clone)]
pub struct ScoreOutput {
    pub scored: Vec<ScoredChunk>,
    /// Chunks without content words.
    pub dropped: usize,
}

/// Raw cosine similarity of each chunk's document vector to both
/// construct vectors. Chunks without content words are dropped.
pub fn score_chunks(
    chunks: &[Chunk],
    model: &EmbeddingModel,
    cv_e: &ConstructVector,
    cv_i: &ConstructVector,
    stopwords: &HashSet<String>,
    exec: Execution,
) -> Result<ScoreOutput, ScoringError> {
    for cv in [cv_e, cv_i] {
        if cv.vector.len() != model.dim() {
            return Err(ScoringError::DimensionMismatch {
                expected: model.dim(),
                found: cv.vector.len(),
            });
        }
    }
    let results = par::map_slice(exec, chunks, |c| -> Result<Option<ScoredChunk>, EmbeddingError> {
        let Some(v) = doc_vector(model, &c.tokens, stopwords).vector else {
            return Ok(None);
        };
        Ok(Some(ScoredChunk {
            chunk_id: c.chunk_id.clone(),
            session: c.session,
            party: c.party,
            chamber: c.chamber,
            length: c.length,
            sim_e: cosine(&v, &cv_e.vector)?,
            sim_i: cosine(&v, &cv_i.vector)?,
            adj_e: f64::NAN,
            adj_i: f64::NAN,
            z_e: f64::NAN,
            z_i: f64::NAN,
            emi: f64::NAN,
        }))
    });
    let mut scored = Vec::with_capacity(results.len());
    let mut dropped = 0;
    for r in results {
        match r? {
            Some(s) => scored.push(s),
            None => dropped += 1,
        }
    }
    Ok(ScoreOutput { scored, dropped })
}

/// Equal-width length bins `[0, w), [w, 2w), …` with one open bin from
/// `open_from` upward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthBins {
    pub width: usize,
    pub open_from: usize,
}

impl Default for LengthBins {
    fn default() -> Self {
        LengthBins {
            width: 25,
            open_from: 200,
        }
    }
}

impl LengthBins {
    pub fn new(width: usize) -> Result<Self, ScoringError> {
        if width == 0 {
            return Err(ScoringError::InvalidParam("bin width must be positive".into()));
        }
        Ok(LengthBins {
            width,
            ..Self::default()
        })
    }

    pub fn bin_of(&self, length: usize) -> usize {
        length.min(self.open_from) / self.width
    }
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    s / n as f64
}

/// Subtracts the per-length-bin mean similarity, separately per construct.
pub fn length_adjust(scored: &mut [ScoredChunk], bins: &LengthBins) {
    let mut sums: BTreeMap<usize, (f64, f64, usize)> = BTreeMap::new();
    for s in scored.iter() {
        let e = sums.entry(bins.bin_of(s.length)).or_default();
        e.0 += s.sim_e;
        e.1 += s.sim_i;
        e.2 += 1;
    }
    for s in scored.iter_mut() {
        let (se, si, n) = sums[&bins.bin_of(s.length)];
        s.adj_e = s.sim_e - se / n as f64;
        s.adj_i = s.sim_i - si / n as f64;
    }
}

/// Pooled z-scores (population standard deviation) of the adjusted
/// similarities, and `emi = z_e − z_i`.
pub fn z_transform(scored: &mut [ScoredChunk]) -> Result<(), ScoringError> {
    if scored.len() < 2 {
        return Err(ScoringError::TooFewChunks(scored.len()));
    }
    let stats = |f: fn(&ScoredChunk) -> f64, c: Construct| -> Result<(f64, f64), ScoringError> {
        let m = mean(scored.iter().map(f));
        let var = mean(scored.iter().map(|s| (f(s) - m).powi(2)));
        if !(var > 0.0) {
            return Err(ScoringError::ZeroVariance(c));
        }
        Ok((m, var.sqrt()))
    };
    let (me, sde) = stats(|s| s.adj_e, Construct::Evidence)?;
    let (mi, sdi) = stats(|s| s.adj_i, Construct::Intuition)?;
    for s in scored.iter_mut() {
        s.z_e = (s.adj_e - me) / sde;
        s.z_i = (s.adj_i - mi) / sdi;
        s.emi = s.z_e - s.z_i;
    }
    Ok(())
}

/// `score_chunks`, `length_adjust` and `z_transform` in sequence.
#[allow(clippy::too_many_arguments)]
pub fn score_corpus(
    chunks: &[Chunk],
    model: &EmbeddingModel,
    evidence: &ConstructDictionary,
    intuition: &ConstructDictionary,
    stopwords: &HashSet<String>,
    bins: &LengthBins,
    exec: Execution,
) -> Result<ScoreOutput, ScoringError> {
    let cv_e = construct_vector(evidence, model)?;
    let cv_i = construct_vector(intuition, model)?;
    let mut out = score_chunks(chunks, model, &cv_e, &cv_i, stopwords, exec)?;
    length_adjust(&mut out.scored, bins);
    z_transform(&mut out.scored)?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupBy {
    pub session: bool,
    pub party: bool,
    pub chamber: bool,
}

impl GroupBy {
    pub const SESSION: GroupBy = GroupBy {
        session: true,
        party: false,
        chamber: false,
    };

    /// Parses a comma-separated subset of `session,party,chamber`.
    pub fn parse(s: &str) -> Result<Self, ScoringError> {
        let mut g = GroupBy::default();
        for key in s.split(',').map(str::trim).filter(|k| !k.is_empty()) {
            match key {
                "session" => g.session = true,
                "party" => g.party = true,
                "chamber" => g.chamber = true,
                other => return Err(ScoringError::InvalidParam(format!("unknown group key {other:?}"))),
            }
        }
        Ok(g)
    }
}

type GroupKey = (Option<u32>, Option<Party>, Option<Chamber>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionAggregate {
    pub session: Option<u32>,
    pub party: Option<Party>,
    pub chamber: Option<Chamber>,
    pub mean_emi: f64,
    pub n_chunks: usize,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Percentile bootstrap 95% interval of the mean. Each replicate draws from
/// its own seeded stream, so the result does not depend on `exec`.
pub fn bootstrap_mean_ci(values: &[f64], n_boot: usize, seed: u64, exec: Execution) -> (f64, f64) {
    let n = values.len();
    let mut means = par::map_range(exec, n_boot, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(par::mix_seed(seed, r as u64));
        let s: f64 = (0..n).map(|_| values[rng.random_range(0..n)]).sum();
        s / n as f64
    });
    means.sort_by(f64::total_cmp);
    (percentile_sorted(&means, 0.025), percentile_sorted(&means, 0.975))
}

/// Group means of EMI with bootstrap intervals, ordered by group key.
pub fn aggregate(
    scored: &[ScoredChunk],
    by: GroupBy,
    n_boot: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<SessionAggregate>, ScoringError> {
    if n_boot == 0 {
        return Err(ScoringError::InvalidParam("n_boot must be positive".into()));
    }
    let mut groups: BTreeMap<GroupKey, Vec<f64>> = BTreeMap::new();
    for s in scored {
        let key = (
            by.session.then_some(s.session),
            by.party.then_some(s.party),
            by.chamber.then_some(s.chamber),
        );
        groups.entry(key).or_default().push(s.emi);
    }
    let mut out = Vec::with_capacity(groups.len());
    for (g, ((session, party, chamber), values)) in groups.into_iter().enumerate() {
        if values.is_empty() {
            log::warn!("skipping empty group {session:?}/{party:?}/{chamber:?}");
            continue;
        }
        let mean_emi = mean(values.iter().copied());
        let (ci_low, ci_high) = bootstrap_mean_ci(&values, n_boot, par::mix_seed(seed, g as u64), exec);
        out.push(SessionAggregate {
            session,
            party,
            chamber,
            mean_emi,
            n_chunks: values.len(),
            ci_low,
            ci_high,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendFit {
    pub first_session: u32,
    pub n: usize,
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
    pub p_intercept: f64,
    pub p_slope: f64,
}

/// OLS of the session means on `t = session − first_session`.
pub fn trend_fit(points: &[(u32, f64)]) -> Result<TrendFit, ScoringError> {
    if points.len() < 3 {
        return Err(StatsError::InsufficientData {
            needed: 3,
            got: points.len(),
        }
        .into());
    }
    let first = points.iter().map(|p| p.0).min().expect("non-empty");
    let t: Vec<f64> = points.iter().map(|p| (p.0 - first) as f64).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let fit = stats::ols_xy(&y, &[("t", &t)], true)?;
    Ok(TrendFit {
        first_session: first,
        n: points.len(),
        intercept: fit.coefficients[0],
        slope: fit.coefficients[1],
        r2: fit.r2,
        p_intercept: fit.p_ols[0],
        p_slope: fit.p_ols[1],
    })
}

/// Session means from the highest-EMI session onward.
pub fn post_peak(aggregates: &[SessionAggregate]) -> Vec<(u32, f64)> {
    let mut series: Vec<(u32, f64)> = aggregates
        .iter()
        .filter_map(|a| a.session.map(|s| (s, a.mean_emi)))
        .collect();
    series.sort_by_key(|p| p.0);
    let Some(peak) = series.iter().max_by(|a, b| a.1.total_cmp(&b.1)).map(|p| p.0) else {
        return series;
    };
    series.retain(|p| p.0 >= peak);
    series
}
