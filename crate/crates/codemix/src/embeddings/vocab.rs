use std::collections::HashMap;

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// Dense word-to-index map with frequency counts.
///
/// Indices run 0..V-1 in descending frequency order (ties broken
/// lexicographically) when built from a corpus, or in file order when
/// loaded from pre-trained vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
    counts: Vec<u64>,
    min_count: u64,
}

impl Vocabulary {
    /// Count tokens and keep the words occurring at least `min_count`
    /// times, ordered by descending frequency.
    pub fn build(corpus: &Corpus, min_count: u64) -> Result<Vocabulary> {
        let mut counts: HashMap<&str, u64> = HashMap::new();
        for sentence in corpus.sentences() {
            for token in sentence {
                *counts.entry(token.as_str()).or_insert(0) += 1;
            }
        }
        let mut entries: Vec<(&str, u64)> = counts
            .into_iter()
            .filter(|&(_, c)| c >= min_count.max(1))
            .collect();
        if entries.is_empty() {
            return Err(Error::EmptyVocabulary { min_count });
        }
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

        let mut vocab = Vocabulary {
            words: Vec::with_capacity(entries.len()),
            index: HashMap::with_capacity(entries.len()),
            counts: Vec::with_capacity(entries.len()),
            min_count,
        };
        for (word, count) in entries {
            vocab.push(word.to_string(), count);
        }
        Ok(vocab)
    }

    /// Build from an explicit word order (e.g. the row order of a `.vec`
    /// file, which stands in for frequency rank). Duplicates are the
    /// caller's responsibility.
    pub fn from_ordered_words(words: Vec<String>) -> Vocabulary {
        let mut vocab = Vocabulary {
            words: Vec::with_capacity(words.len()),
            index: HashMap::with_capacity(words.len()),
            counts: Vec::with_capacity(words.len()),
            min_count: 0,
        };
        for word in words {
            vocab.push(word, 0);
        }
        vocab
    }

    fn push(&mut self, word: String, count: u64) {
        let id = self.words.len();
        self.index.insert(word.clone(), id);
        self.words.push(word);
        self.counts.push(count);
    }

    /// Append a word that is not yet present. Returns its new index.
    pub(crate) fn append(&mut self, word: String, count: u64) -> usize {
        debug_assert!(!self.index.contains_key(&word));
        let id = self.words.len();
        self.push(word, count);
        id
    }

    pub(crate) fn set_count(&mut self, id: usize, count: u64) {
        self.counts[id] = count;
    }

    pub(crate) fn set_min_count(&mut self, min_count: u64) {
        self.min_count = min_count;
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn count(&self, id: usize) -> u64 {
        self.counts[id]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn total_tokens(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{LabeledTweet, Split};

    fn corpus_of(text: &str) -> Corpus {
        let tweets = vec![LabeledTweet::new(
            "0",
            text.split_whitespace().map(str::to_owned).collect(),
        )];
        Corpus::new(tweets, Split::Unlabeled).unwrap()
    }

    #[test]
    fn build_orders_by_frequency() {
        let vocab = Vocabulary::build(&corpus_of("a a b"), 1).unwrap();
        assert_eq!(vocab.id("a"), Some(0));
        assert_eq!(vocab.id("b"), Some(1));
        assert_eq!(vocab.count(0), 2);
        assert_eq!(vocab.count(1), 1);
    }

    #[test]
    fn build_applies_min_count() {
        let vocab = Vocabulary::build(&corpus_of("a a b"), 2).unwrap();
        assert_eq!(vocab.len(), 1);
        assert_eq!(vocab.id("a"), Some(0));
        assert_eq!(vocab.id("b"), None);
    }

    #[test]
    fn build_fails_when_everything_is_rare() {
        let err = Vocabulary::build(&corpus_of("x"), 5).unwrap_err();
        assert!(matches!(err, Error::EmptyVocabulary { min_count: 5 }));
    }

    #[test]
    fn frequency_ties_break_lexicographically() {
        let vocab = Vocabulary::build(&corpus_of("pear apple pear apple mango"), 1).unwrap();
        assert_eq!(vocab.word(0), "apple");
        assert_eq!(vocab.word(1), "pear");
        assert_eq!(vocab.word(2), "mango");
    }

    #[test]
    fn lookup_round_trips() {
        let vocab = Vocabulary::build(&corpus_of("one two two three three three"), 1).unwrap();
        for id in 0..vocab.len() {
            assert_eq!(vocab.id(vocab.word(id)), Some(id));
        }
    }
}
