//! Character n-gram extraction and hashing into a fixed bucket space.

/// 32-bit FNV-1a over UTF-8 bytes.
pub fn fnv1a32(bytes: &[u8]) -> u32 {
    let mut hash: u32 = 0x811c9dc5;
    for &b in bytes {
        hash ^= b as u32;
        hash = hash.wrapping_mul(0x0100_0193);
    }
    hash
}

/// Hash an n-gram into `[0, bucket_count)`. Deterministic across runs
/// and platforms.
pub fn hash_ngram(ngram: &str, bucket_count: usize) -> usize {
    debug_assert!(bucket_count > 0);
    (fnv1a32(ngram.as_bytes()) as usize) % bucket_count
}

/// Parameters of the character n-gram space.
///
/// `bucket_count == 0` disables subwords entirely, which is the state of
/// models loaded from plain `.vec` files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubwordIndex {
    pub n_min: usize,
    pub n_max: usize,
    pub bucket_count: usize,
}

impl Default for SubwordIndex {
    fn default() -> Self {
        SubwordIndex {
            n_min: 3,
            n_max: 6,
            bucket_count: 2_000_000,
        }
    }
}

impl SubwordIndex {
    pub fn disabled() -> SubwordIndex {
        SubwordIndex {
            n_min: 3,
            n_max: 6,
            bucket_count: 0,
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.bucket_count > 0
    }

    /// Character n-grams of the boundary-wrapped word, excluding the
    /// wrapped whole word itself (which owns a dedicated vector).
    pub fn extract_ngrams(&self, word: &str) -> Vec<String> {
        extract_ngrams(word, self.n_min, self.n_max)
    }

    /// Bucket ids for a word's n-grams. Empty when subwords are
    /// disabled or the word produces no n-grams.
    pub fn bucket_ids(&self, word: &str) -> Vec<usize> {
        if !self.is_enabled() {
            return Vec::new();
        }
        self.extract_ngrams(word)
            .iter()
            .map(|ng| hash_ngram(ng, self.bucket_count))
            .collect()
    }
}

/// All contiguous character substrings of `<word>` with length in
/// `n_min..=n_max`, excluding the full wrapped form.
pub fn extract_ngrams(word: &str, n_min: usize, n_max: usize) -> Vec<String> {
    debug_assert!(n_min >= 1 && n_min <= n_max);
    let wrapped: Vec<char> = std::iter::once('<')
        .chain(word.chars())
        .chain(std::iter::once('>'))
        .collect();
    let len = wrapped.len();
    let mut ngrams = Vec::new();
    for n in n_min..=n_max.min(len) {
        for start in 0..=(len - n) {
            if n == len {
                // the wrapped whole word
                continue;
            }
            ngrams.push(wrapped[start..start + n].iter().collect());
        }
    }
    ngrams
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ngrams_of_go() {
        assert_eq!(extract_ngrams("go", 3, 6), vec!["<go", "go>"]);
    }

    #[test]
    fn single_char_word_has_no_ngrams() {
        assert_eq!(extract_ngrams("a", 3, 6), Vec::<String>::new());
    }

    #[test]
    fn bigram_window() {
        assert_eq!(extract_ngrams("ab", 2, 2), vec!["<a", "ab", "b>"]);
    }

    #[test]
    fn multibyte_chars_count_as_one() {
        // 😊 wraps to <😊> which is 3 chars; the whole word is excluded.
        assert_eq!(extract_ngrams("😊", 3, 6), Vec::<String>::new());
        assert_eq!(extract_ngrams("😊x", 3, 6), vec!["<😊x", "😊x>"]);
    }

    #[test]
    fn hashing_is_deterministic_and_in_range() {
        let a = hash_ngram("<go", 2_000_000);
        let b = hash_ngram("<go", 2_000_000);
        assert_eq!(a, b);
        assert!(a < 2_000_000);
    }

    /// Independent FNV-1a reference, written directly from the
    /// published constants rather than via the production helper.
    fn fnv1a32_reference(bytes: &[u8]) -> u32 {
        let mut h: u64 = 2_166_136_261;
        for &b in bytes {
            h ^= b as u64;
            h = (h * 16_777_619) % (1 << 32);
        }
        h as u32
    }

    #[test]
    fn fnv_matches_independent_reference() {
        for s in ["<go", "go>", "a", "", "zûrich", "भारत"] {
            assert_eq!(fnv1a32(s.as_bytes()), fnv1a32_reference(s.as_bytes()), "{s:?}");
        }
        // Frozen expectation for the worked example: "<go" hashes FNV-1a
        // over bytes 0x3C 0x67 0x6F.
        let expected = fnv1a32_reference("<go".as_bytes()) as usize % 2_000_000;
        assert_eq!(hash_ngram("<go", 2_000_000), expected);
    }

    proptest! {
        #[test]
        fn ngram_count_formula(word in "[a-z\u{0900}-\u{097F}]{1,10}", n_min in 1usize..4, span in 0usize..4) {
            let n_max = n_min + span;
            let l = word.chars().count() + 2;
            let mut expected: usize = 0;
            for n in n_min..=n_max.min(l) {
                expected += l - n + 1;
                if n == l {
                    expected -= 1;
                }
            }
            let ngrams = extract_ngrams(&word, n_min, n_max);
            prop_assert_eq!(ngrams.len(), expected);
            for ng in &ngrams {
                let n = ng.chars().count();
                prop_assert!(n >= n_min && n <= n_max);
            }
        }

        #[test]
        fn buckets_in_range(word in "[a-z]{1,8}", buckets in 1usize..5000) {
            let index = SubwordIndex { n_min: 2, n_max: 4, bucket_count: buckets };
            for id in index.bucket_ids(&word) {
                prop_assert!(id < buckets);
            }
        }
    }
}
