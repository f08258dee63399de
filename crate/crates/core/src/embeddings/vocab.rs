use std::collections::HashMap;

use super::EmbeddingError;

/// Word inventory with dense indices in descending-frequency order
/// (ties broken lexicographically).
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
    total_tokens: u64,
    min_count: u64,
}

impl Vocabulary {
    /// Builds a vocabulary from explicit `(word, count)` pairs. Pairs are
    /// re-sorted into canonical order; words below `min_count` are dropped.
    pub fn from_counts<I>(counts: I, min_count: u64) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (String, u64)>,
    {
        let mut pairs: Vec<(String, u64)> = Vec::new();
        let mut seen = HashMap::new();
        for (w, c) in counts {
            if seen.insert(w.clone(), ()).is_some() {
                return Err(EmbeddingError::InvalidParam(format!("duplicate vocabulary word {w}")));
            }
            if c >= min_count {
                pairs.push((w, c));
            }
        }
        pairs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Ok(Self::from_ordered(pairs, min_count))
    }

    /// Keeps the given order as the index order.
    pub(crate) fn from_ordered(pairs: Vec<(String, u64)>, min_count: u64) -> Self {
        let total_tokens = pairs.iter().map(|p| p.1).sum();
        let index = pairs
            .iter()
            .enumerate()
            .map(|(i, (w, _))| (w.clone(), i))
            .collect();
        let (words, counts) = pairs.into_iter().unzip();
        Vocabulary {
            words,
            counts,
            index,
            total_tokens,
            min_count,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn word(&self, i: usize) -> &str {
        &self.words[i]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Sum of the counts of retained words.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Indices of the in-vocabulary tokens of a sequence.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<usize> {
        tokens.iter().filter_map(|t| self.index_of(t.as_ref())).collect()
    }
}

/// Counts every token of every chunk and keeps words seen at least
/// `min_count` times.
pub fn build_vocab<'a, I, S>(chunks: I, min_count: u64) -> Result<Vocabulary, EmbeddingError>
where
    I: IntoIterator<Item = &'a [S]>,
    S: AsRef<str> + 'a,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut any = false;
    for chunk in chunks {
        for tok in chunk {
            any = true;
            let tok = tok.as_ref();
            if let Some(c) = counts.get_mut(tok) {
                *c += 1;
            } else {
                counts.insert(tok.to_string(), 1);
            }
        }
    }
    if !any {
        return Err(EmbeddingError::EmptyCorpus);
    }
    Vocabulary::from_counts(counts, min_count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split(' ').map(String::from).collect()
    }

    #[test]
    fn threshold_drops_rare_words() {
        let c = [toks("a a a b")];
        let v = build_vocab(c.iter().map(|x| x.as_slice()), 2).unwrap();
        assert_eq!(v.words(), ["a"]);
        assert_eq!(v.count(0), 3);
        let v = build_vocab(c.iter().map(|x| x.as_slice()), 1).unwrap();
        assert_eq!(v.words(), ["a", "b"]);
        assert_eq!(v.counts(), [3, 1]);
        assert_eq!(v.total_tokens(), 4);
    }

    #[test]
    fn ties_are_lexicographic() {
        let c = [toks("z y x y z x w")];
        let v = build_vocab(c.iter().map(|x| x.as_slice()), 1).unwrap();
        assert_eq!(v.words(), ["x", "y", "z", "w"]);
    }

    #[test]
    fn empty_stream_is_an_error() {
        let c: Vec<Vec<String>> = vec![vec![]];
        assert!(matches!(
            build_vocab(c.iter().map(|x| x.as_slice()), 1),
            Err(EmbeddingError::EmptyCorpus)
        ));
    }
}
