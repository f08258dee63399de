//! Plain-text vector files.
//!
//! ```text
//! V d
//! word x_1 x_2 ... x_d
//! ```
//!
//! Floats are written in shortest round-trip form, so save/load is
//! bit-exact. `save_model` also writes two optional sidecars next to the
//! main file: `<path>.ctx` (context vectors, same format) and
//! `<path>.meta.json` (word counts and training parameters).

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EmbeddingModel, Matrix, SgnsParams, Vocabulary};

#[derive(Debug, Error)]
pub enum ModelFormatError {
    #[error("malformed header {0:?}: expected \"<vocab size> <dimension>\"")]
    MalformedHeader(String),
    #[error("truncated file: header declares {expected} rows, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("line {line}: expected {expected} components, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: duplicate word {word:?}")]
    DuplicateWord { line: usize, word: String },
    #[error("line {line}: cannot parse {token:?} as a number")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: data after the declared {expected} rows")]
    TrailingData { line: usize, expected: usize },
    #[error("sidecar {path}: {reason}")]
    Sidecar { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn write_vectors<W: Write>(words: &[String], m: &Matrix, mut w: W) -> io::Result<()> {
    writeln!(w, "{} {}", m.rows(), m.cols())?;
    for (i, word) in words.iter().enumerate() {
        w.write_all(word.as_bytes())?;
        for x in m.row(i) {
            write!(w, " {x}")?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn read_vectors<R: BufRead>(r: R) -> Result<(Vec<String>, Matrix), ModelFormatError> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| ModelFormatError::MalformedHeader(header.clone()))?;
    let [rows, cols] = dims[..] else {
        return Err(ModelFormatError::MalformedHeader(header));
    };
    if cols == 0 {
        return Err(ModelFormatError::MalformedHeader(header));
    }

    let mut words = Vec::with_capacity(rows);
    let mut seen = HashSet::with_capacity(rows);
    let mut data = Vec::with_capacity(rows * cols);
    for (k, line) in lines.enumerate() {
        let line_no = k + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if words.len() == rows {
            return Err(ModelFormatError::TrailingData {
                line: line_no,
                expected: rows,
            });
        }
        let mut parts = line.split_whitespace();
        let word = parts.next().expect("non-blank line").to_string();
        let before = data.len();
        for tok in parts {
            let x: f64 = tok.parse().map_err(|_| ModelFormatError::BadNumber {
                line: line_no,
                token: tok.to_string(),
            })?;
            data.push(x);
        }
        let found = data.len() - before;
        if found != cols {
            return Err(ModelFormatError::DimensionMismatch {
                line: line_no,
                expected: cols,
                found,
            });
        }
        if !seen.insert(word.clone()) {
            return Err(ModelFormatError::DuplicateWord { line: line_no, word });
        }
        words.push(word);
    }
    if words.len() != rows {
        return Err(ModelFormatError::Truncated {
            expected: rows,
            found: words.len(),
        });
    }
    Ok((words, Matrix::from_vec(rows, cols, data)))
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelMeta {
    min_count: u64,
    counts: Vec<u64>,
    params: Option<SgnsParams>,
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn context_path(path: &Path) -> PathBuf {
    sidecar(path, ".ctx")
}

pub fn meta_path(path: &Path) -> PathBuf {
    sidecar(path, ".meta.json")
}

pub fn save_model(model: &EmbeddingModel, path: &Path) -> Result<Vec<PathBuf>, ModelFormatError> {
    let words = model.vocab.words();
    write_vectors(words, &model.input, BufWriter::new(File::create(path)?))?;
    let mut written = vec![path.to_path_buf()];
    if let Some(out) = &model.output {
        let p = context_path(path);
        write_vectors(words, out, BufWriter::new(File::create(&p)?))?;
        written.push(p);
    }
    let meta = ModelMeta {
        min_count: model.vocab.min_count(),
        counts: model.vocab.counts().to_vec(),
        params: model.params.clone(),
    };
    let p = meta_path(path);
    let mut f = BufWriter::new(File::create(&p)?);
    serde_json::to_writer_pretty(&mut f, &meta).map_err(io::Error::from)?;
    f.write_all(b"\n")?;
    f.flush()?;
    written.push(p);
    Ok(written)
}

/// Loads a vectors file and whichever sidecars exist next to it.
pub fn load_model(path: &Path) -> Result<EmbeddingModel, ModelFormatError> {
    let (words, input) = read_vectors(BufReader::new(File::open(path)?))?;

    let mp = meta_path(path);
    let (counts, min_count, params) = if mp.exists() {
        let meta: ModelMeta = serde_json::from_reader(BufReader::new(File::open(&mp)?))
            .map_err(|e| ModelFormatError::Sidecar {
                path: mp.clone(),
                reason: e.to_string(),
            })?;
        if meta.counts.len() != words.len() {
            return Err(ModelFormatError::Sidecar {
                path: mp,
                reason: format!("{} counts for {} words", meta.counts.len(), words.len()),
            });
        }
        (meta.counts, meta.min_count, meta.params)
    } else {
        (vec![0; words.len()], 0, None)
    };
    let vocab = Vocabulary::from_ordered(words.iter().cloned().zip(counts).collect(), min_count);

    let cp = context_path(path);
    let output = if cp.exists() {
        let (cw, out) = read_vectors(BufReader::new(File::open(&cp)?))?;
        if cw != words || out.cols() != input.cols() {
            return Err(ModelFormatError::Sidecar {
                path: cp,
                reason: "context vectors do not match the main vocabulary".into(),
            });
        }
        Some(out)
    } else {
        None
    };

    Ok(EmbeddingModel {
        vocab,
        input,
        output,
        params,
    })
}
