use crate::rng::Rng;

use super::subword::SubwordIndex;
use super::vocab::Vocabulary;

/// Dense embedding storage.
///
/// Input rows cover the vocabulary followed by the subword buckets
/// (`vocab_rows + bucket_rows` rows); output (context) rows cover the
/// vocabulary only. The freeze mask marks input rows that training must
/// never modify.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    dim: usize,
    vocab_rows: usize,
    bucket_rows: usize,
    pub(crate) input: Vec<f32>,
    pub(crate) output: Vec<f32>,
    pub(crate) freeze_mask: Vec<bool>,
}

impl EmbeddingMatrix {
    /// Allocate with the standard initialization: input rows uniform in
    /// [-1/(2d), 1/(2d)), output rows zero.
    pub fn init(vocab_rows: usize, bucket_rows: usize, dim: usize, rng: &mut Rng) -> Self {
        let mut matrix = EmbeddingMatrix::zeroed(vocab_rows, bucket_rows, dim);
        let half = 0.5 / dim as f32;
        for v in matrix.input.iter_mut() {
            *v = (rng.next_f32() - 0.5) / dim as f32;
            debug_assert!(*v >= -half && *v < half);
        }
        matrix
    }

    pub fn zeroed(vocab_rows: usize, bucket_rows: usize, dim: usize) -> Self {
        EmbeddingMatrix {
            dim,
            vocab_rows,
            bucket_rows,
            input: vec![0.0; (vocab_rows + bucket_rows) * dim],
            output: vec![0.0; vocab_rows * dim],
            freeze_mask: vec![false; vocab_rows + bucket_rows],
        }
    }

    /// Build from word rows loaded elsewhere (e.g. a `.vec` file).
    /// No bucket rows, no frozen rows, zero output rows.
    pub fn from_word_rows(rows: Vec<f32>, dim: usize) -> Self {
        assert_eq!(rows.len() % dim.max(1), 0);
        let vocab_rows = rows.len() / dim;
        EmbeddingMatrix {
            dim,
            vocab_rows,
            bucket_rows: 0,
            output: vec![0.0; rows.len()],
            freeze_mask: vec![false; vocab_rows],
            input: rows,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab_rows(&self) -> usize {
        self.vocab_rows
    }

    pub fn bucket_rows(&self) -> usize {
        self.bucket_rows
    }

    pub fn input_rows(&self) -> usize {
        self.vocab_rows + self.bucket_rows
    }

    pub fn input_row(&self, row: usize) -> &[f32] {
        &self.input[row * self.dim..(row + 1) * self.dim]
    }

    pub fn input_row_mut(&mut self, row: usize) -> &mut [f32] {
        &mut self.input[row * self.dim..(row + 1) * self.dim]
    }

    /// Row index of a subword bucket in the input table.
    pub fn bucket_row(&self, bucket: usize) -> usize {
        debug_assert!(bucket < self.bucket_rows);
        self.vocab_rows + bucket
    }

    pub fn output_row(&self, row: usize) -> &[f32] {
        &self.output[row * self.dim..(row + 1) * self.dim]
    }

    pub fn is_frozen(&self, row: usize) -> bool {
        self.freeze_mask[row]
    }

    pub fn freeze_rows(&mut self, rows: std::ops::Range<usize>) {
        for r in rows {
            self.freeze_mask[r] = true;
        }
    }

    pub fn frozen_count(&self) -> usize {
        self.freeze_mask.iter().filter(|&&f| f).count()
    }
}

/// Vocabulary, subword parameters and vectors bundled as one unit —
/// what training produces and what files store.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub vocab: Vocabulary,
    pub subwords: SubwordIndex,
    pub matrix: EmbeddingMatrix,
}

impl EmbeddingModel {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Compose the vector for a word: mean of its dedicated row (when in
    /// vocabulary) and all of its n-gram bucket rows. Out-of-vocabulary
    /// words fall back to bucket rows alone; with nothing to compose the
    /// result is the zero vector.
    pub fn word_vector(&self, word: &str) -> Vec<f32> {
        let dim = self.dim();
        let mut acc = vec![0.0f32; dim];
        let mut parts = 0usize;
        if let Some(id) = self.vocab.id(word) {
            accumulate(&mut acc, self.matrix.input_row(id));
            parts += 1;
        }
        if self.subwords.is_enabled() {
            for bucket in self.subwords.bucket_ids(word) {
                accumulate(&mut acc, self.matrix.input_row(self.matrix.bucket_row(bucket)));
                parts += 1;
            }
        }
        if parts > 1 {
            let inv = 1.0 / parts as f32;
            for v in acc.iter_mut() {
                *v *= inv;
            }
        }
        acc
    }
}

fn accumulate(acc: &mut [f32], row: &[f32]) {
    for (a, r) in acc.iter_mut().zip(row) {
        *a += r;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, LabeledTweet, Split};

    fn tiny_model(dim: usize, bucket_count: usize) -> EmbeddingModel {
        let corpus = Corpus::new(
            vec![LabeledTweet::new("0", vec!["go".into(), "stop".into()])],
            Split::Unlabeled,
        )
        .unwrap();
        let vocab = Vocabulary::build(&corpus, 1).unwrap();
        let subwords = SubwordIndex {
            n_min: 3,
            n_max: 6,
            bucket_count,
        };
        let matrix = EmbeddingMatrix::zeroed(vocab.len(), bucket_count, dim);
        EmbeddingModel {
            vocab,
            subwords,
            matrix,
        }
    }

    #[test]
    fn init_distribution_bounds() {
        let mut rng = Rng::new(3);
        let m = EmbeddingMatrix::init(4, 8, 25, &mut rng);
        let half = 0.5 / 25.0;
        assert!(m.input.iter().all(|v| (-half..half).contains(v)));
        assert!(m.output.iter().all(|&v| v == 0.0));
        assert!(m.input.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn in_vocab_word_without_ngrams_is_its_row() {
        // n_min=3 means a single-char word contributes no n-grams.
        let corpus = Corpus::new(
            vec![LabeledTweet::new("0", vec!["a".into()])],
            Split::Unlabeled,
        )
        .unwrap();
        let vocab = Vocabulary::build(&corpus, 1).unwrap();
        let mut matrix = EmbeddingMatrix::zeroed(1, 10, 3);
        matrix.input_row_mut(0).copy_from_slice(&[1.0, 2.0, 3.0]);
        let model = EmbeddingModel {
            vocab,
            subwords: SubwordIndex {
                n_min: 3,
                n_max: 6,
                bucket_count: 10,
            },
            matrix,
        };
        assert_eq!(model.word_vector("a"), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn oov_word_averages_identical_bucket_rows() {
        let mut model = tiny_model(2, 7);
        for bucket in 0..7 {
            let row = model.matrix.bucket_row(bucket);
            model.matrix.input_row_mut(row).copy_from_slice(&[0.5, -1.5]);
        }
        assert_eq!(model.word_vector("zzz"), vec![0.5, -1.5]);
    }

    #[test]
    fn oov_single_char_is_zero_vector() {
        let model = tiny_model(4, 9);
        assert_eq!(model.word_vector("q"), vec![0.0; 4]);
    }

    #[test]
    fn composition_ignores_ngram_order() {
        // Mean over word row and bucket rows: permuting the n-gram list
        // cannot change the sum. Exercise via two words whose n-gram
        // sets coincide after hashing into one bucket.
        let mut model = tiny_model(2, 1);
        let row = model.matrix.bucket_row(0);
        model.matrix.input_row_mut(row).copy_from_slice(&[4.0, 8.0]);
        let go = model.vocab.id("go").unwrap();
        model.matrix.input_row_mut(go).copy_from_slice(&[1.0, 1.0]);
        // "go" has n-grams <go and go>, both hashed to bucket 0.
        let v = model.word_vector("go");
        assert!((v[0] - 3.0).abs() < 1e-6);
        assert!((v[1] - 17.0 / 3.0).abs() < 1e-6);
    }
}
