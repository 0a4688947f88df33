//! Text `.vec` format: `<V> <d>` header, then one `<word> <v1> ... <vd>`
//! line per word, values at six decimal places.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

use super::matrix::{EmbeddingMatrix, EmbeddingModel};
use super::subword::SubwordIndex;
use super::vocab::Vocabulary;

/// Result of loading a `.vec` file. Duplicate words are dropped (first
/// occurrence wins) and reported in `warnings`.
#[derive(Debug)]
pub struct VecLoad {
    pub model: EmbeddingModel,
    pub warnings: Vec<String>,
}

/// Load pre-trained word vectors. The resulting model has no subword
/// buckets; vocabulary order is file order.
pub fn load_pretrained(reader: impl BufRead) -> Result<VecLoad> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::format("empty .vec stream"))??;
    let mut parts = header.split_whitespace();
    let declared: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::format(format!("bad .vec header {header:?}")))?;
    let dim: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::format(format!("bad .vec header {header:?}")))?;
    if parts.next().is_some() || dim == 0 {
        return Err(Error::format(format!("bad .vec header {header:?}")));
    }

    let mut words: Vec<String> = Vec::with_capacity(declared);
    let mut rows: Vec<f32> = Vec::with_capacity(declared * dim);
    let mut seen = std::collections::HashSet::with_capacity(declared);
    let mut warnings = Vec::new();
    let mut data_rows = 0usize;

    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        data_rows += 1;
        if data_rows > declared {
            return Err(Error::format(format!(
                "row count mismatch: header declares {declared} rows but line {lineno} is row {data_rows}"
            )));
        }
        let mut fields = line.split_whitespace();
        let word = fields
            .next()
            .ok_or_else(|| Error::format(format!("empty row at line {lineno}")))?;
        let mut values = Vec::with_capacity(dim);
        for field in fields {
            let v: f32 = field.parse().map_err(|_| {
                Error::format(format!("non-numeric value {field:?} at line {lineno}"))
            })?;
            values.push(v);
        }
        if values.len() != dim {
            return Err(Error::format(format!(
                "row for {word:?} at line {lineno} has {} values, expected {dim}",
                values.len()
            )));
        }
        if !seen.insert(word.to_string()) {
            warnings.push(format!(
                "duplicate word {word:?} at line {lineno}; keeping first occurrence"
            ));
            continue;
        }
        words.push(word.to_string());
        rows.extend_from_slice(&values);
    }

    if data_rows != declared {
        return Err(Error::format(format!(
            "row count mismatch: header declares {declared} rows, found {data_rows}"
        )));
    }

    let vocab = Vocabulary::from_ordered_words(words);
    let matrix = EmbeddingMatrix::from_word_rows(rows, dim);
    Ok(VecLoad {
        model: EmbeddingModel {
            vocab,
            subwords: SubwordIndex::disabled(),
            matrix,
        },
        warnings,
    })
}

/// Write word rows (dedicated vectors only, no buckets) in `.vec` format.
pub fn save_vec(model: &EmbeddingModel, mut writer: impl Write) -> Result<()> {
    let dim = model.dim();
    writeln!(writer, "{} {}", model.vocab.len(), dim)?;
    for id in 0..model.vocab.len() {
        write!(writer, "{}", model.vocab.word(id))?;
        for v in model.matrix.input_row(id) {
            write!(writer, " {v:.6}")?;
        }
        writeln!(writer)?;
    }
    Ok(())
}
