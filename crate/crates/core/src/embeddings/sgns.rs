//! Skip-gram with negative sampling.
//!
//! For every (center, context) pair inside a window shrunk uniformly to
//! `1..=window`, the center's input vector `v` and the output vectors `u`
//! of the context word and `k` sampled negatives ascend
//!
//! ```text
//! log σ(u_ctx · v) + Σ_k log σ(−u_neg · v)
//! ```
//!
//! Negatives come from the unigram distribution raised to 0.75. Frequent
//! words are discarded with probability `1 − sqrt(t / f)`. The learning
//! rate decays linearly from `alpha0` to `alpha0 · 1e-4`.
//!
//! In parallel mode the corpus is split across workers that update the
//! shared matrices without locks; concurrent writes to the same row may
//! interleave and lose updates, so runs are not reproducible. Sequential
//! mode runs one worker and is bitwise reproducible for a given seed.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EmbeddingError, EmbeddingModel, Matrix, Vocabulary};
use crate::par::{self, Execution};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgnsParams {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub alpha0: f64,
    pub subsample: f64,
    pub seed: u64,
    /// Worker count; 1 means the deterministic sequential trainer.
    pub threads: usize,
    /// Print per-epoch progress lines to stderr.
    #[serde(skip)]
    pub progress: bool,
}

impl Default for SgnsParams {
    fn default() -> Self {
        SgnsParams {
            dim: 300,
            window: 5,
            negatives: 5,
            epochs: 5,
            alpha0: 0.025,
            subsample: 1e-5,
            seed: 1,
            threads: 1,
            progress: false,
        }
    }
}

impl SgnsParams {
    pub fn is_deterministic(&self) -> bool {
        self.threads <= 1
    }

    fn validate(&self) -> Result<(), EmbeddingError> {
        if self.dim == 0 {
            return Err(EmbeddingError::InvalidDimension(self.dim));
        }
        if self.window == 0 {
            return Err(EmbeddingError::InvalidParam("window must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(EmbeddingError::InvalidParam("epochs must be at least 1".into()));
        }
        if !(self.alpha0 > 0.0 && self.alpha0.is_finite()) {
            return Err(EmbeddingError::InvalidParam("alpha0 must be positive".into()));
        }
        if !(self.subsample >= 0.0) {
            return Err(EmbeddingError::InvalidParam("subsample must be non-negative".into()));
        }
        Ok(())
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `log σ(u_pos · v) + Σ log σ(−u_neg · v)` for one training tuple.
pub fn sgns_objective(v: &[f64], pos: &[f64], negs: &[&[f64]]) -> f64 {
    let log_sigmoid = |x: f64| -> f64 {
        // log σ(x) = −log(1 + e^{−x}), evaluated without overflow
        if x >= 0.0 {
            -(-x).exp().ln_1p()
        } else {
            x - x.exp().ln_1p()
        }
    };
    log_sigmoid(dot(pos, v)) + negs.iter().map(|u| log_sigmoid(-dot(u, v))).sum::<f64>()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsGradient {
    pub center: Vec<f64>,
    pub positive: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

/// Analytic gradient of [`sgns_objective`].
pub fn sgns_gradient(v: &[f64], pos: &[f64], negs: &[&[f64]]) -> SgnsGradient {
    let mut center = vec![0.0; v.len()];
    let mut coeff = |u: &[f64], label: f64| -> f64 {
        let g = label - sigmoid(dot(u, v));
        for (c, x) in center.iter_mut().zip(u) {
            *c += g * x;
        }
        g
    };
    let gp = coeff(pos, 1.0);
    let gn: Vec<f64> = negs.iter().map(|u| coeff(u, 0.0)).collect();
    SgnsGradient {
        positive: v.iter().map(|x| gp * x).collect(),
        negatives: gn.iter().map(|g| v.iter().map(|x| g * x).collect()).collect(),
        center,
    }
}

/// One ascent step against a single output row. Accumulates the center
/// update into `center_acc` and applies the output update in place.
#[inline]
pub fn sgns_step(v: &[f64], center_acc: &mut [f64], u: &mut [f64], label: f64, alpha: f64) {
    let g = (label - sigmoid(dot(u, v))) * alpha;
    for ((acc, ui), vi) in center_acc.iter_mut().zip(u.iter_mut()).zip(v) {
        *acc += g * *ui;
        *ui += g * vi;
    }
}

/// Sampler over the unigram^0.75 distribution.
#[derive(Debug, Clone)]
pub struct NegativeSampler {
    cdf: Vec<f64>,
}

impl NegativeSampler {
    pub fn new(counts: &[u64]) -> Result<Self, EmbeddingError> {
        if counts.is_empty() {
            return Err(EmbeddingError::EmptyVocabulary);
        }
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        if acc <= 0.0 {
            return Err(EmbeddingError::InvalidParam("all vocabulary counts are zero".into()));
        }
        for c in cdf.iter_mut() {
            *c /= acc;
        }
        *cdf.last_mut().unwrap() = 1.0;
        Ok(NegativeSampler { cdf })
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cdf
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1)
    }
}

/// Probability of keeping one occurrence of a word with the given count.
pub fn keep_probability(count: u64, total: u64, t: f64) -> f64 {
    if t <= 0.0 || count == 0 {
        return 1.0;
    }
    let f = count as f64 / total as f64;
    (t / f).sqrt().min(1.0)
}

/// Matrix shared between training workers. Elements are f64 bit patterns
/// in relaxed atomics, so unsynchronised updates are well defined.
struct SharedMatrix {
    cols: usize,
    data: Vec<AtomicU64>,
}

impl SharedMatrix {
    fn from_matrix(m: &Matrix) -> Self {
        SharedMatrix {
            cols: m.cols(),
            data: m.as_slice().iter().map(|x| AtomicU64::new(x.to_bits())).collect(),
        }
    }

    fn load(&self, row: usize, buf: &mut [f64]) {
        let base = row * self.cols;
        for (b, a) in buf.iter_mut().zip(&self.data[base..base + self.cols]) {
            *b = f64::from_bits(a.load(Ordering::Relaxed));
        }
    }

    fn store(&self, row: usize, buf: &[f64]) {
        let base = row * self.cols;
        for (b, a) in buf.iter().zip(&self.data[base..base + self.cols]) {
            a.store(b.to_bits(), Ordering::Relaxed);
        }
    }

    fn into_matrix(self, rows: usize) -> Matrix {
        let data = self
            .data
            .into_iter()
            .map(|a| f64::from_bits(a.into_inner()))
            .collect();
        Matrix::from_vec(rows, self.cols, data)
    }
}

struct Trainer<'a> {
    params: &'a SgnsParams,
    counts: &'a [u64],
    total: u64,
    sentences: &'a [Vec<usize>],
    sampler: NegativeSampler,
    input: SharedMatrix,
    output: SharedMatrix,
    processed: AtomicU64,
    schedule_total: f64,
    started: Instant,
}

impl Trainer<'_> {
    fn alpha(&self) -> f64 {
        let done = self.processed.load(Ordering::Relaxed) as f64;
        self.params.alpha0 * (1.0 - done / (self.schedule_total + 1.0)).max(1e-4)
    }

    fn run_worker(&self, worker: usize, workers: usize) {
        let p = self.params;
        let d = p.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(par::mix_seed(p.seed, worker as u64 + 1));
        let n = self.sentences.len();
        let lo = n * worker / workers;
        let hi = n * (worker + 1) / workers;
        let mut v = vec![0.0; d];
        let mut u = vec![0.0; d];
        let mut acc = vec![0.0; d];
        let mut kept: Vec<usize> = Vec::new();

        for epoch in 0..p.epochs {
            for sent in &self.sentences[lo..hi] {
                kept.clear();
                kept.extend(sent.iter().copied().filter(|&w| {
                    let keep = keep_probability(self.counts[w], self.total, p.subsample);
                    keep >= 1.0 || rng.random::<f64>() < keep
                }));
                let alpha = self.alpha();
                for i in 0..kept.len() {
                    let reduced = p.window - rng.random_range(0..p.window);
                    let from = i.saturating_sub(reduced);
                    let to = (i + reduced).min(kept.len() - 1);
                    let center = kept[i];
                    for (j, &context) in kept.iter().enumerate().take(to + 1).skip(from) {
                        if j == i {
                            continue;
                        }
                        self.input.load(center, &mut v);
                        acc.iter_mut().for_each(|a| *a = 0.0);
                        self.output.load(context, &mut u);
                        sgns_step(&v, &mut acc, &mut u, 1.0, alpha);
                        self.output.store(context, &u);
                        for _ in 0..p.negatives {
                            let neg = self.sampler.sample(&mut rng);
                            if neg == context {
                                continue;
                            }
                            self.output.load(neg, &mut u);
                            sgns_step(&v, &mut acc, &mut u, 0.0, alpha);
                            self.output.store(neg, &u);
                        }
                        for (vi, a) in v.iter_mut().zip(&acc) {
                            *vi += a;
                        }
                        self.input.store(center, &v);
                    }
                }
                self.processed.fetch_add(sent.len() as u64, Ordering::Relaxed);
            }
            if p.progress && worker == 0 {
                let secs = self.started.elapsed().as_secs_f64().max(1e-9);
                eprintln!(
                    "train,epoch={},tokens_per_sec={:.0},alpha={:.6}",
                    epoch + 1,
                    self.processed.load(Ordering::Relaxed) as f64 / secs,
                    self.alpha()
                );
            }
        }
    }
}

/// Trains input and output vectors for `vocab` on token sequences.
pub fn train_sgns<S: AsRef<str>>(
    chunks: &[Vec<S>],
    vocab: &Vocabulary,
    params: &SgnsParams,
) -> Result<EmbeddingModel, EmbeddingError> {
    params.validate()?;
    if vocab.is_empty() {
        return Err(EmbeddingError::EmptyVocabulary);
    }
    let d = params.dim;
    let v = vocab.len();
    let sentences: Vec<Vec<usize>> = chunks
        .iter()
        .map(|c| vocab.encode(c))
        .filter(|s| s.len() > 1)
        .collect();
    let corpus_words: u64 = sentences.iter().map(|s| s.len() as u64).sum();

    let mut init_rng = ChaCha8Rng::seed_from_u64(params.seed);
    let input: Vec<f64> = (0..v * d)
        .map(|_| (init_rng.random::<f64>() - 0.5) / d as f64)
        .collect();
    let input = Matrix::from_vec(v, d, input);
    let output = Matrix::zeros(v, d);

    let workers = if params.is_deterministic() {
        1
    } else {
        params.threads.max(1)
    };
    let exec = if workers > 1 {
        Execution::Parallel
    } else {
        Execution::Sequential
    };
    let trainer = Trainer {
        params,
        counts: vocab.counts(),
        total: vocab.total_tokens().max(1),
        sentences: &sentences,
        sampler: NegativeSampler::new(vocab.counts())?,
        input: SharedMatrix::from_matrix(&input),
        output: SharedMatrix::from_matrix(&output),
        processed: AtomicU64::new(0),
        schedule_total: (params.epochs as u64 * corpus_words) as f64,
        started: Instant::now(),
    };
    if params.progress {
        eprintln!("train,vocab={v},dim={d},words={corpus_words},workers={workers}");
    }
    par::for_each_worker(exec, workers, |w| trainer.run_worker(w, workers));

    let Trainer { input, output, .. } = trainer;
    let model = EmbeddingModel {
        vocab: vocab.clone(),
        input: input.into_matrix(v),
        output: Some(output.into_matrix(v)),
        params: Some(params.clone()),
    };
    if !model.is_finite() {
        return Err(EmbeddingError::NonFinite);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::{build_vocab, cosine};

    fn alternating(n: usize) -> Vec<Vec<String>> {
        let toks: Vec<String> = (0..n).map(|i| if i % 2 == 0 { "x" } else { "y" }.to_string()).collect();
        toks.chunks(100).map(|c| c.to_vec()).collect()
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(800.0) <= 1.0 && sigmoid(-800.0) >= 0.0);
        assert!((sigmoid(2.0) + sigmoid(-2.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn step_matches_scaled_gradient() {
        let v = [0.3, -0.2, 0.5];
        let pos = [0.1, 0.4, -0.3];
        let n1 = [-0.2, 0.2, 0.6];
        let n2 = [0.5, -0.1, 0.05];
        let alpha = 0.01;
        let grad = sgns_gradient(&v, &pos, &[&n1, &n2]);
        let mut acc = [0.0; 3];
        let (mut up, mut u1, mut u2) = (pos, n1, n2);
        sgns_step(&v, &mut acc, &mut up, 1.0, alpha);
        sgns_step(&v, &mut acc, &mut u1, 0.0, alpha);
        sgns_step(&v, &mut acc, &mut u2, 0.0, alpha);
        for k in 0..3 {
            assert!((acc[k] - alpha * grad.center[k]).abs() < 1e-15);
            assert!((up[k] - pos[k] - alpha * grad.positive[k]).abs() < 1e-15);
            assert!((u1[k] - n1[k] - alpha * grad.negatives[0][k]).abs() < 1e-15);
            assert!((u2[k] - n2[k] - alpha * grad.negatives[1][k]).abs() < 1e-15);
        }
    }

    #[test]
    fn subsampling_keeps_rare_words() {
        assert_eq!(keep_probability(1, 1_000_000, 1e-5), 1.0);
        let p = keep_probability(1000, 10_000, 1e-5);
        assert!((p - 0.01).abs() < 1e-12);
        assert_eq!(keep_probability(1000, 10_000, 0.0), 1.0);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let chunks = alternating(200);
        let vocab = build_vocab(chunks.iter().map(|c| c.as_slice()), 1).unwrap();
        let p = SgnsParams { dim: 0, ..SgnsParams::default() };
        assert!(matches!(train_sgns(&chunks, &vocab, &p), Err(EmbeddingError::InvalidDimension(0))));
        let empty = Vocabulary::from_counts(Vec::new(), 1).unwrap();
        assert!(matches!(
            train_sgns(&chunks, &empty, &SgnsParams::default()),
            Err(EmbeddingError::EmptyVocabulary)
        ));
    }

    #[test]
    fn alternating_corpus_pairs_x_with_y() {
        let mut chunks = alternating(10_000);
        // distractors that never neighbour x
        let filler: Vec<String> = (0..10_000).map(|i| format!("w{}", i % 20)).collect();
        chunks.extend(filler.chunks(100).map(|c| c.to_vec()));
        let vocab = build_vocab(chunks.iter().map(|c| c.as_slice()), 1).unwrap();
        let p = SgnsParams { dim: 8, subsample: 0.0, epochs: 3, ..SgnsParams::default() };
        let m = train_sgns(&chunks, &vocab, &p).unwrap();
        // x predicts y as context: the output vector of y scores highest against x
        let x = m.vector("x").unwrap();
        let out = m.output.as_ref().unwrap();
        let best = (0..vocab.len())
            .filter(|&i| vocab.word(i) != "x")
            .max_by(|&a, &b| {
                cosine(x, out.row(a)).unwrap().total_cmp(&cosine(x, out.row(b)).unwrap())
            })
            .unwrap();
        assert_eq!(vocab.word(best), "y");
        assert_eq!(m.nearest(x, 1, Some("x"))[0].0, "y");
    }

    #[test]
    fn sequential_training_is_reproducible() {
        let chunks = alternating(2000);
        let vocab = build_vocab(chunks.iter().map(|c| c.as_slice()), 1).unwrap();
        let p = SgnsParams { dim: 16, subsample: 1e-3, seed: 9, ..SgnsParams::default() };
        let a = train_sgns(&chunks, &vocab, &p).unwrap();
        let b = train_sgns(&chunks, &vocab, &p).unwrap();
        assert_eq!(a.input.as_slice(), b.input.as_slice());
        assert_eq!(a.output, b.output);
    }

    #[test]
    fn parallel_training_stays_finite() {
        let chunks = alternating(4000);
        let vocab = build_vocab(chunks.iter().map(|c| c.as_slice()), 1).unwrap();
        let p = SgnsParams { dim: 16, threads: 4, ..SgnsParams::default() };
        let m = train_sgns(&chunks, &vocab, &p).unwrap();
        assert!(m.is_finite());
        assert_eq!(m.params.as_ref().unwrap().threads, 4);
    }
}
