//! Static data files shipped with the crate.
//!
//! Every file can be replaced at runtime by pointing [`DataDir`] at a
//! directory holding files with the same names.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

pub const EVIDENCE_FILE: &str = "evidence.txt";
pub const INTUITION_FILE: &str = "intuition.txt";
pub const TOP100_FILE: &str = "top100.txt";
pub const STOPWORDS_FILE: &str = "stopwords.txt";
pub const UNIT_ROOT_FILE: &str = "unit_root_tables.txt";

pub const EVIDENCE_TXT: &str = include_str!("../data/evidence.txt");
pub const INTUITION_TXT: &str = include_str!("../data/intuition.txt");
pub const TOP100_TXT: &str = include_str!("../data/top100.txt");
pub const STOPWORDS_TXT: &str = include_str!("../data/stopwords.txt");
pub const UNIT_ROOT_TXT: &str = include_str!("../data/unit_root_tables.txt");

/// Lines of a word-list file, skipping blanks and `#` comments.
pub fn list_entries(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

pub fn word_set(text: &str) -> HashSet<String> {
    list_entries(text).map(str::to_lowercase).collect()
}

pub fn common_words() -> HashSet<String> {
    word_set(TOP100_TXT)
}

pub fn stopwords() -> HashSet<String> {
    word_set(STOPWORDS_TXT)
}

/// Source of the data files: the embedded copies, or a directory override.
#[derive(Debug, Clone, Default)]
pub struct DataDir {
    root: Option<PathBuf>,
}

impl DataDir {
    pub fn embedded() -> Self {
        DataDir { root: None }
    }

    pub fn at(root: impl Into<PathBuf>) -> Self {
        DataDir {
            root: Some(root.into()),
        }
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    /// Reads `name` from the override directory when it exists there,
    /// otherwise returns the embedded copy.
    pub fn read(&self, name: &str) -> io::Result<String> {
        if let Some(root) = &self.root {
            let p = root.join(name);
            if p.exists() {
                return fs::read_to_string(p);
            }
        }
        match name {
            EVIDENCE_FILE => Ok(EVIDENCE_TXT.to_string()),
            INTUITION_FILE => Ok(INTUITION_TXT.to_string()),
            TOP100_FILE => Ok(TOP100_TXT.to_string()),
            STOPWORDS_FILE => Ok(STOPWORDS_TXT.to_string()),
            UNIT_ROOT_FILE => Ok(UNIT_ROOT_TXT.to_string()),
            other => Err(io::Error::new(
                io::ErrorKind::NotFound,
                format!("no shipped data file named {other}"),
            )),
        }
    }
}
