//! Word embeddings: vocabulary, SGNS training, lookup and document vectors.

mod io;
mod sgns;
mod vocab;

use std::collections::HashSet;

use thiserror::Error;

pub use io::{load_model, read_vectors, save_model, write_vectors, ModelFormatError};
pub use sgns::{
    keep_probability, sgns_gradient, sgns_objective, sgns_step, sigmoid, train_sgns, NegativeSampler,
    SgnsGradient, SgnsParams,
};
pub use vocab::{build_vocab, Vocabulary};

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("corpus contains no tokens")]
    EmptyCorpus,
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("embedding dimension must be positive, got {0}")]
    InvalidDimension(usize),
    #[error("invalid training parameter: {0}")]
    InvalidParam(String),
    #[error("cosine similarity is undefined for a zero-norm vector")]
    ZeroNorm,
    #[error("vector dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training produced non-finite weights")]
    NonFinite,
    #[error(transparent)]
    Format(#[from] ModelFormatError),
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Matrix::from_vec(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub vocab: Vocabulary,
    /// Center-word vectors; the ones used for scoring.
    pub input: Matrix,
    /// Context vectors. Absent when loaded from a vectors-only file.
    pub output: Option<Matrix>,
    /// Hyperparameters of the training run, when known.
    pub params: Option<SgnsParams>,
}

impl EmbeddingModel {
    pub fn new(vocab: Vocabulary, input: Matrix) -> Result<Self, EmbeddingError> {
        if input.rows() != vocab.len() {
            return Err(EmbeddingError::DimensionMismatch {
                expected: vocab.len(),
                found: input.rows(),
            });
        }
        if input.cols() == 0 {
            return Err(EmbeddingError::InvalidDimension(0));
        }
        Ok(EmbeddingModel {
            vocab,
            input,
            output: None,
            params: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.input.cols()
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.vocab.index_of(word).map(|i| self.input.row(i))
    }

    pub fn is_finite(&self) -> bool {
        self.input.is_finite() && self.output.as_ref().is_none_or(Matrix::is_finite)
    }

    /// The `k` words whose input vectors are most cosine-similar to `query`.
    pub fn nearest(&self, query: &[f64], k: usize, exclude: Option<&str>) -> Vec<(String, f64)> {
        let mut scored: Vec<(String, f64)> = (0..self.vocab.len())
            .filter(|&i| Some(self.vocab.word(i)) != exclude)
            .filter_map(|i| {
                cosine(query, self.input.row(i))
                    .ok()
                    .map(|c| (self.vocab.word(i).to_string(), c))
            })
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        scored
    }
}

/// Mean input vector of the content words of a text.
#[derive(Debug, Clone, PartialEq)]
pub struct DocVector {
    /// `None` when the text has no content words.
    pub vector: Option<Vec<f64>>,
    pub n_content_words: usize,
}

impl DocVector {
    pub fn is_empty(&self) -> bool {
        self.vector.is_none()
    }
}

pub fn doc_vector<S: AsRef<str>>(
    model: &EmbeddingModel,
    tokens: &[S],
    stopwords: &HashSet<String>,
) -> DocVector {
    let mut sum = vec![0.0; model.dim()];
    let mut n = 0usize;
    for t in tokens {
        let t = t.as_ref();
        if stopwords.contains(t) {
            continue;
        }
        if let Some(v) = model.vector(t) {
            for (s, x) in sum.iter_mut().zip(v) {
                *s += x;
            }
            n += 1;
        }
    }
    if n == 0 {
        return DocVector {
            vector: None,
            n_content_words: 0,
        };
    }
    let inv = n as f64;
    sum.iter_mut().for_each(|s| *s /= inv);
    DocVector {
        vector: Some(sum),
        n_content_words: n,
    }
}

/// Cosine similarity, clamped to [-1, 1].
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, EmbeddingError> {
    if a.len() != b.len() {
        return Err(EmbeddingError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    if aa == 0.0 || bb == 0.0 {
        return Err(EmbeddingError::ZeroNorm);
    }
    Ok((ab / (aa.sqrt() * bb.sqrt())).clamp(-1.0, 1.0))
}
