//! Unsupervised projection of two embedding spaces into one.
//!
//! The pipeline: unit-normalize both spaces, truncate to the frequency
//! cutoff, induce a seed dictionary from intra-space similarity
//! distributions, then alternate orthogonal mapping and CSLS
//! re-induction until the mean dictionary similarity stops improving.
//! The final mapping is applied to every row of the full space,
//! including words beyond the cutoff and subword buckets.

pub mod csls;
pub mod linalg;
pub mod procrustes;
pub mod seed;
pub mod self_learning;

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use ndarray::Array2;

use crate::embeddings::{EmbeddingMatrix, EmbeddingModel, Vocabulary};
use crate::error::{Error, Result};

pub use csls::{csls_match, CslsMatch};
pub use procrustes::{map_pair, orthogonal_map};
pub use seed::build_seed_dictionary;
pub use self_learning::{self_learning_align, AlignmentOutcome};

/// Parameters of the self-learning alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentConfig {
    /// Neighbourhood size for CSLS retrieval.
    pub csls_k: usize,
    /// Number of frequency-ranked words participating in dictionary
    /// induction; rows beyond it are only projected at the end.
    pub vocab_cutoff: usize,
    /// Minimum objective improvement that counts as progress.
    pub convergence_threshold: f64,
    /// Initial probability of keeping a candidate during stochastic
    /// dictionary induction.
    pub keep_prob_initial: f64,
    /// Growth factor applied whenever an iteration fails to improve.
    pub keep_prob_multiplier: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// Enable the whitening + symmetric re-weighting variant of the
    /// mapping step. Off by default; the resulting transforms are not
    /// orthogonal in general.
    pub advanced_transforms: bool,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        AlignmentConfig {
            csls_k: 8,
            vocab_cutoff: 15_000,
            convergence_threshold: 1e-6,
            keep_prob_initial: 0.1,
            keep_prob_multiplier: 2.0,
            max_iterations: 500,
            seed: 1,
            advanced_transforms: false,
        }
    }
}

impl AlignmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.csls_k < 1 {
            return Err(Error::config("csls_k must be at least 1"));
        }
        if self.vocab_cutoff < 2 {
            return Err(Error::config("vocab_cutoff must be at least 2"));
        }
        if !(self.keep_prob_initial > 0.0 && self.keep_prob_initial <= 1.0) {
            return Err(Error::config("keep probability must be in (0, 1]"));
        }
        if self.keep_prob_multiplier <= 1.0 {
            return Err(Error::config("keep_prob_multiplier must exceed 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::config("max_iterations must be positive"));
        }
        Ok(())
    }
}

/// Word-pair index set with per-direction provenance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BilingualDictionary {
    forward: Vec<(u32, u32)>,
    backward: Vec<(u32, u32)>,
}

impl BilingualDictionary {
    /// `forward[i] = j` matches source row i to target row j;
    /// `backward[j] = i` matches target row j back to source row i.
    /// Both directions are stored in (source, target) orientation.
    pub fn from_matches(forward: &[usize], backward: &[usize]) -> Self {
        BilingualDictionary {
            forward: forward
                .iter()
                .enumerate()
                .map(|(i, &j)| (i as u32, j as u32))
                .collect(),
            backward: backward
                .iter()
                .enumerate()
                .map(|(j, &i)| (i as u32, j as u32))
                .collect(),
        }
    }

    pub fn forward(&self) -> &[(u32, u32)] {
        &self.forward
    }

    pub fn backward(&self) -> &[(u32, u32)] {
        &self.backward
    }

    /// Deduplicated union of both directions, (source, target).
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        let set: BTreeSet<(u32, u32)> = self
            .forward
            .iter()
            .chain(self.backward.iter())
            .copied()
            .collect();
        set.into_iter().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty() && self.backward.is_empty()
    }
}

/// A d x d projection produced by the mapping step.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingMatrix(pub Array2<f64>);

impl MappingMatrix {
    pub fn identity(d: usize) -> Self {
        MappingMatrix(Array2::<f64>::eye(d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// max |(WᵀW - I)| entry; < 1e-5 for every orthogonal mapping.
    pub fn orthogonality_defect(&self) -> f64 {
        linalg::orthogonality_defect(&self.0)
    }
}

/// Unit-normalize the word rows of an embedding matrix in place.
/// Zero rows are left untouched; their count is returned so callers
/// can warn.
pub fn normalize_embeddings(matrix: &mut EmbeddingMatrix) -> usize {
    let mut zero_rows = 0;
    for row in 0..matrix.vocab_rows() {
        let slice = matrix.input_row_mut(row);
        zero_rows += normalize_slice(slice) as usize;
    }
    zero_rows
}

/// Returns true when the row was zero. Rows already unit within f32
/// rounding are left untouched, making normalization exactly
/// idempotent.
fn normalize_slice(slice: &mut [f32]) -> bool {
    let norm = crate::num::dot_f64(slice, slice).sqrt();
    if norm == 0.0 {
        return true;
    }
    if (norm - 1.0).abs() > 1e-6 {
        let inv = (1.0 / norm) as f32;
        for v in slice.iter_mut() {
            *v *= inv;
        }
    }
    false
}

/// Unit-normalize the rows of a dense matrix in place, returning the
/// number of zero rows left untouched.
pub fn normalize_rows(matrix: &mut Array2<f32>) -> usize {
    let mut zero_rows = 0;
    for mut row in matrix.rows_mut() {
        let slice = row.as_slice_mut().expect("row-major layout");
        zero_rows += normalize_slice(slice) as usize;
    }
    zero_rows
}

/// Copy the top `cutoff` word rows (frequency-ranked order) into a
/// dense matrix for alignment. Clamps to the vocabulary size.
pub fn word_matrix(model: &EmbeddingModel, cutoff: usize) -> Array2<f32> {
    let rows = cutoff.min(model.vocab.len());
    let dim = model.dim();
    let mut m = Array2::<f32>::zeros((rows, dim));
    for r in 0..rows {
        m.row_mut(r)
            .assign(&ndarray::ArrayView1::from(model.matrix.input_row(r)));
    }
    m
}

/// Right-multiply every input row (words and subword buckets) by W.
/// Output rows describe the training-time context space and are left
/// untouched.
pub fn project_full(matrix: &mut EmbeddingMatrix, w: &MappingMatrix) -> Result<()> {
    let dim = matrix.dim();
    if w.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: w.dim(),
        });
    }
    let w32 = w.0.mapv(|v| v as f32);
    let rows = matrix.input_rows();
    let chunk = 4096;
    let mut buf = Array2::<f32>::zeros((chunk.min(rows.max(1)), dim));
    let mut start = 0;
    while start < rows {
        let end = (start + chunk).min(rows);
        let take = end - start;
        for (local, row) in (start..end).enumerate() {
            buf.row_mut(local)
                .assign(&ndarray::ArrayView1::from(matrix.input_row(row)));
        }
        let projected = buf.slice(ndarray::s![..take, ..]).dot(&w32);
        for (local, row) in (start..end).enumerate() {
            matrix
                .input_row_mut(row)
                .copy_from_slice(projected.row(local).as_slice().unwrap());
        }
        start = end;
    }
    Ok(())
}

/// Merge two aligned models into one joint space: source words keep
/// their rows and subword buckets; target words absent from the source
/// vocabulary are appended. Both models must already be projected into
/// the shared space.
pub fn merge_aligned(source: &EmbeddingModel, target: &EmbeddingModel) -> Result<EmbeddingModel> {
    let dim = source.dim();
    if target.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: target.dim(),
        });
    }
    let mut vocab = source.vocab.clone();
    let mut extra: Vec<usize> = Vec::new();
    for id in 0..target.vocab.len() {
        let word = target.vocab.word(id);
        if !vocab.contains(word) {
            vocab.append(word.to_string(), 0);
            extra.push(id);
        }
    }

    let buckets = source.matrix.bucket_rows();
    let mut matrix = EmbeddingMatrix::zeroed(vocab.len(), buckets, dim);
    let src_words = source.vocab.len();
    for row in 0..src_words {
        matrix
            .input_row_mut(row)
            .copy_from_slice(source.matrix.input_row(row));
    }
    for (offset, &target_id) in extra.iter().enumerate() {
        matrix
            .input_row_mut(src_words + offset)
            .copy_from_slice(target.matrix.input_row(target_id));
    }
    for bucket in 0..buckets {
        let dst = matrix.bucket_row(bucket);
        matrix
            .input_row_mut(dst)
            .copy_from_slice(source.matrix.input_row(source.matrix.bucket_row(bucket)));
    }
    Ok(EmbeddingModel {
        vocab,
        subwords: source.subwords,
        matrix,
    })
}

/// Write dictionary pairs as `<source_word>\t<target_word>` lines.
pub fn write_dictionary(
    dict: &BilingualDictionary,
    source_vocab: &Vocabulary,
    target_vocab: &Vocabulary,
    mut writer: impl Write,
) -> Result<()> {
    for (i, j) in dict.pairs() {
        writeln!(
            writer,
            "{}\t{}",
            source_vocab.word(i as usize),
            target_vocab.word(j as usize)
        )?;
    }
    Ok(())
}

/// Write a mapping as a numeric matrix file with a `<d> <d>` header.
pub fn write_mapping(w: &MappingMatrix, mut writer: impl Write) -> Result<()> {
    let d = w.dim();
    writeln!(writer, "{d} {d}")?;
    for row in w.0.rows() {
        let mut first = true;
        for v in row {
            if !first {
                write!(writer, " ")?;
            }
            write!(writer, "{v:.9}")?;
            first = false;
        }
        writeln!(writer)?;
    }
    Ok(())
}

/// Read a mapping written by [`write_mapping`].
pub fn read_mapping(reader: impl BufRead) -> Result<MappingMatrix> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::format("empty mapping file"))??;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::format(format!("bad mapping header {header:?}")))?;
    let [rows, cols] = dims.as_slice() else {
        return Err(Error::format(format!("bad mapping header {header:?}")));
    };
    let mut m = Array2::<f64>::zeros((*rows, *cols));
    for r in 0..*rows {
        let line = lines
            .next()
            .ok_or_else(|| Error::format("mapping file truncated"))??;
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::format(format!("bad mapping row {}", r + 1)))?;
        if values.len() != *cols {
            return Err(Error::format(format!(
                "mapping row {} has {} values, expected {cols}",
                r + 1,
                values.len()
            )));
        }
        for (c, v) in values.into_iter().enumerate() {
            m[[r, c]] = v;
        }
    }
    Ok(MappingMatrix(m))
}
