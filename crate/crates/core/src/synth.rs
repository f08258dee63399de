//! Seeded synthetic inputs: dictionary-driven chunk corpora, raw speech
//! records, and session-level series.

use chrono::NaiveDate;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::corpus::{chunk_id, session_start_year, Chamber, Chunk, Party, SpeechRecord};
use crate::data::{self, list_entries};
use crate::stats::{StatsError, TimeSeriesTable};

/// Words of a dictionary file, with phrases split into their words.
pub fn dictionary_words(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for entry in list_entries(text) {
        for w in entry.split_whitespace() {
            let w = w.to_lowercase();
            if !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

pub fn filler_words(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("filler{i:03}")).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DictionaryCorpusParams {
    pub n_chunks: usize,
    pub chunk_len: usize,
    /// Probability that a token is drawn from the shared filler vocabulary.
    pub filler_share: f64,
    pub filler_vocab: usize,
    pub seed: u64,
}

impl Default for DictionaryCorpusParams {
    fn default() -> Self {
        DictionaryCorpusParams {
            n_chunks: 2000,
            chunk_len: 150,
            filler_share: 0.5,
            filler_vocab: 300,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledChunk {
    pub tokens: Vec<String>,
    pub evidence: bool,
}

/// Alternating evidence / intuition chunks. Non-filler tokens are drawn
/// uniformly from the words of the matching shipped dictionary.
pub fn dictionary_corpus(p: &DictionaryCorpusParams) -> Vec<LabeledChunk> {
    let evidence = dictionary_words(data::EVIDENCE_TXT);
    let intuition = dictionary_words(data::INTUITION_TXT);
    let filler = filler_words(p.filler_vocab);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    (0..p.n_chunks)
        .map(|i| {
            let is_ev = i % 2 == 0;
            let own = if is_ev { &evidence } else { &intuition };
            let tokens = (0..p.chunk_len)
                .map(|_| {
                    let pool = if rng.random::<f64>() < p.filler_share {
                        &filler
                    } else {
                        own
                    };
                    pool.choose(&mut rng).expect("nonempty pool").clone()
                })
                .collect();
            LabeledChunk { tokens, evidence: is_ev }
        })
        .collect()
}

/// Wraps labeled token lists as chunks: one per pseudo-speech, sessions
/// cycling from 46, parties alternating in pairs.
pub fn as_chunks(labeled: &[LabeledChunk]) -> Vec<Chunk> {
    labeled
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let session = FIRST_SYNTH_SESSION + (i as u32 / 2) % 72;
            let speech_id = format!("dict{i:05}");
            Chunk {
                chunk_id: chunk_id(&speech_id, 0),
                speech_id,
                ordinal: 0,
                session,
                party: if (i / 2) % 2 == 0 { Party::D } else { Party::R },
                chamber: Chamber::House,
                date: NaiveDate::from_ymd_opt(session_start_year(session), 3, 1).expect("valid date"),
                length: c.tokens.len(),
                tokens: c.tokens.clone(),
            }
        })
        .collect()
}

const FIRST_SYNTH_SESSION: u32 = 46;
const LAST_SYNTH_SESSION: u32 = 117;
const PEAK_SESSION: u32 = 94;

/// Share of construct words that come from the evidence dictionary. Rises
/// to a peak and declines afterwards.
fn evidence_share(session: u32) -> f64 {
    let s = session as f64;
    let peak = PEAK_SESSION as f64;
    if s <= peak {
        0.35 + 0.35 * (s - FIRST_SYNTH_SESSION as f64) / (peak - FIRST_SYNTH_SESSION as f64)
    } else {
        0.7 - 0.4 * (s - peak) / (LAST_SYNTH_SESSION as f64 - peak)
    }
}

fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Raw speech records covering sessions 46 through 117. Includes short
/// speeches, a third-party speaker, procedural flags and exact duplicates
/// so every filter has something to do.
pub fn speech_corpus(n: usize, seed: u64) -> Vec<SpeechRecord> {
    let common: Vec<String> = list_entries(data::TOP100_TXT).map(str::to_string).collect();
    let evidence = dictionary_words(data::EVIDENCE_TXT);
    let intuition = dictionary_words(data::INTUITION_TXT);
    let filler = filler_words(120);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = LAST_SYNTH_SESSION - FIRST_SYNTH_SESSION + 1;
    let mut out: Vec<SpeechRecord> = Vec::with_capacity(n);
    for i in 0..n {
        let session = FIRST_SYNTH_SESSION + (i as u32 * span) / n as u32;
        let year = session_start_year(session) + rng.random_range(0..2);
        let date = NaiveDate::from_ymd_opt(year, rng.random_range(1..=12), rng.random_range(1..=28))
            .expect("valid synthetic date");
        let party = match rng.random_range(0..40) {
            0 => Party::Other,
            k if k % 2 == 0 => Party::D,
            _ => Party::R,
        };
        let chamber = if rng.random::<bool>() {
            Chamber::House
        } else {
            Chamber::Senate
        };
        let speech_id = format!("syn{i:05}");
        if i % 41 == 40 {
            // verbatim repeat of an earlier speech, later date
            let src = out[rng.random_range(0..out.len())].clone();
            out.push(SpeechRecord {
                speech_id,
                date: date.max(src.date),
                session: None,
                ..src
            });
            continue;
        }
        let len = match i % 23 {
            0 => rng.random_range(3..11),
            _ => rng.random_range(40..420),
        };
        let share = evidence_share(session) + if party == Party::D { 0.08 } else { -0.08 };
        let mut words = Vec::with_capacity(len);
        for k in 0..len {
            let u: f64 = rng.random();
            let w = if u < 0.45 {
                common.choose(&mut rng).unwrap().clone()
            } else if u < 0.75 {
                filler.choose(&mut rng).unwrap().clone()
            } else if rng.random::<f64>() < share {
                evidence.choose(&mut rng).unwrap().clone()
            } else {
                intuition.choose(&mut rng).unwrap().clone()
            };
            let w = if k == 0 { capitalize(&w) } else { w };
            words.push(w);
            if k % 17 == 16 {
                let last = words.pop().unwrap();
                words.push(format!("{last}."));
            }
        }
        out.push(SpeechRecord {
            speech_id,
            date,
            session: Some(session),
            chamber,
            party,
            speaker: format!("Member {}", rng.random_range(1..=60)),
            text: words.join(" "),
            is_procedural: (i % 29 == 5).then_some(true),
        });
    }
    out
}

/// Session-indexed series shaped like the published inputs (sessions 46 to
/// 117), with each column missing outside its coverage period.
pub fn session_table(seed: u64) -> Result<TimeSeriesTable, StatsError> {
    let sessions: Vec<i64> = (FIRST_SYNTH_SESSION as i64..=LAST_SYNTH_SESSION as i64).collect();
    let n = sessions.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = Normal::new(0.0, 1.0).expect("unit normal");
    let draw = |rng: &mut ChaCha8Rng, sd: f64| -> f64 { sd * e.sample(rng) };
    let mut emi = vec![0.0; n];
    let mut pol = vec![0.0; n];
    let mut ineq = vec![0.0; n];
    let mut gini = vec![0.0; n];
    for t in 0..n {
        let s = sessions[t] as u32;
        emi[t] = (evidence_share(s) - 0.5) * 2.0 + draw(&mut rng, 0.05);
        let prev_pol = if t > 0 { pol[t - 1] } else { 0.6 };
        pol[t] = 0.9 * prev_pol + 0.06 - 0.05 * emi[t] + draw(&mut rng, 0.02);
        let prev_emi = if t > 0 { emi[t - 1] } else { 0.0 };
        let prev_ineq = if t > 0 { ineq[t - 1] } else { 0.15 };
        ineq[t] = 0.6 * prev_ineq + 0.06 - 0.02 * prev_emi + draw(&mut rng, 0.005);
        let prev_gini = if t > 0 { gini[t - 1] } else { 0.4 };
        gini[t] = 0.5 * prev_gini + 0.2 - 0.02 * prev_emi + draw(&mut rng, 0.004);
    }
    let mut mli = vec![0.0; n];
    let mut lpi = vec![0.0; n];
    let mut nlaw = vec![0.0; n];
    let mut mood = vec![0.0; n];
    let mut patents = vec![0.0; n];
    let mut control = vec![0.0; n];
    let mut control_dif = vec![0.0; n];
    for t in 0..n {
        mood[t] = 60.0 + draw(&mut rng, 5.0);
        patents[t] = (10.0 + 0.03 * t as f64 + draw(&mut rng, 0.1)).exp();
        control[t] = if rng.random::<f64>() < 0.5 { 1.0 } else { 0.0 };
        control_dif[t] = if t > 0 && control[t] != control[t - 1] { 1.0 } else { 0.0 };
        let prev = |v: &[f64]| if t > 0 { v[t - 1] } else { 0.0 };
        mli[t] = 0.4 * prev(&mli) + 0.3 * emi[t] - 0.5 * pol[t] + 0.01 * mood[t] + draw(&mut rng, 0.2);
        lpi[t] = 0.5 * prev(&lpi) + 0.4 * emi[t] - 0.4 * pol[t] + 0.01 * mood[t] + draw(&mut rng, 0.2);
        nlaw[t] = (600.0 + 150.0 * emi[t] - 100.0 * pol[t] + draw(&mut rng, 30.0)).max(50.0);
    }
    let mask = |v: &[f64], from: i64, to: i64| -> Vec<Option<f64>> {
        sessions
            .iter()
            .zip(v)
            .map(|(&s, &x)| (s >= from && s <= to).then_some(x))
            .collect()
    };
    let last = *sessions.last().unwrap();
    let mut table = TimeSeriesTable::new(sessions.clone())?;
    table.insert("EMI", mask(&emi, 46, last))?;
    table.insert("Pol", mask(&pol, 46, last))?;
    table.insert("Ineq", mask(&ineq, 62, last))?;
    table.insert("Gini", mask(&gini, 78, last))?;
    table.insert("MLI", mask(&mli, 46, 108))?;
    table.insert("LPI", mask(&lpi, 46, 108))?;
    table.insert("nlaw", mask(&nlaw, 46, last))?;
    table.insert("Mood", mask(&mood, 82, last))?;
    table.insert("npatents", mask(&patents, 46, last))?;
    table.insert("PartyControl", mask(&control, 46, last))?;
    table.insert("PartyControlDif", mask(&control_dif, 46, last))?;
    Ok(table)
}
