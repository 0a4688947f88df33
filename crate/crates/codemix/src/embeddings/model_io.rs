//! Native binary container for embedding models.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic      4 bytes  "CMXE"
//! version    u32      currently 1
//! dim        u32
//! vocab      u32      number of word rows
//! buckets    u32      number of subword bucket rows (0 when disabled)
//! n_min      u32      subword n-gram bounds
//! n_max      u32
//! min_count  u64
//! words      vocab times: len u32, UTF-8 bytes, count u64
//! freeze     (vocab+buckets) bytes, 0 or 1
//! input      (vocab+buckets) * dim f32
//! output     vocab * dim f32
//! ```
//!
//! Readers and writers both maintain a running 64-bit FNV-1a over the
//! byte stream; the digest doubles as the model identity hash that
//! classifier files record.

use std::io::{Read, Write};

use crate::binio::{HashingReader, HashingWriter, Sink};
use crate::error::{Error, Result};

use super::matrix::{EmbeddingMatrix, EmbeddingModel};
use super::subword::SubwordIndex;
use super::vocab::Vocabulary;

const MAGIC: &[u8; 4] = b"CMXE";
const VERSION: u32 = 1;

/// Serialize a model; returns the identity hash of the written bytes.
pub fn save_model(model: &EmbeddingModel, writer: impl Write) -> Result<u64> {
    let mut w = HashingWriter::new(writer);
    let dim = model.dim();
    let vocab = model.vocab.len();
    let buckets = model.matrix.bucket_rows();

    w.put(MAGIC)?;
    w.put_u32(VERSION)?;
    w.put_u32(dim as u32)?;
    w.put_u32(vocab as u32)?;
    w.put_u32(buckets as u32)?;
    w.put_u32(model.subwords.n_min as u32)?;
    w.put_u32(model.subwords.n_max as u32)?;
    w.put_u64(model.vocab.min_count())?;

    for id in 0..vocab {
        w.put_str(model.vocab.word(id))?;
        w.put_u64(model.vocab.count(id))?;
    }
    let mask: Vec<u8> = model
        .matrix
        .freeze_mask
        .iter()
        .map(|&f| f as u8)
        .collect();
    w.put(&mask)?;
    w.put_f32s(&model.matrix.input)?;
    w.put_f32s(&model.matrix.output)?;
    Ok(w.hash.0)
}

/// Deserialize a model and its identity hash.
pub fn load_model(reader: impl Read) -> Result<(EmbeddingModel, u64)> {
    let mut r = HashingReader::new(reader);
    let mut magic = [0u8; 4];
    r.take(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::format("not an embedding model file (bad magic)"));
    }
    let version = r.take_u32()?;
    if version != VERSION {
        return Err(Error::format(format!(
            "unsupported model version {version}"
        )));
    }
    let dim = r.take_u32()? as usize;
    let vocab_len = r.take_u32()? as usize;
    let buckets = r.take_u32()? as usize;
    let n_min = r.take_u32()? as usize;
    let n_max = r.take_u32()? as usize;
    let min_count = r.take_u64()?;

    let mut words = Vec::with_capacity(vocab_len);
    let mut counts = Vec::with_capacity(vocab_len);
    for _ in 0..vocab_len {
        words.push(r.take_str()?);
        counts.push(r.take_u64()?);
    }
    let mut vocab = Vocabulary::from_ordered_words(words);
    vocab.set_min_count(min_count);
    for (id, count) in counts.into_iter().enumerate() {
        vocab.set_count(id, count);
    }

    let mut mask = vec![0u8; vocab_len + buckets];
    r.take(&mut mask)?;
    let input = r.take_f32s((vocab_len + buckets) * dim)?;
    let output = r.take_f32s(vocab_len * dim)?;

    let mut matrix = EmbeddingMatrix::zeroed(vocab_len, buckets, dim);
    matrix.input = input;
    matrix.output = output;
    matrix.freeze_mask = mask.into_iter().map(|b| b != 0).collect();

    let subwords = SubwordIndex {
        n_min,
        n_max,
        bucket_count: buckets,
    };
    Ok((
        EmbeddingModel {
            vocab,
            subwords,
            matrix,
        },
        r.hash.0,
    ))
}

/// Identity hash of a model without writing it anywhere.
pub fn model_hash(model: &EmbeddingModel) -> u64 {
    save_model(model, Sink).expect("hashing sink cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Corpus, LabeledTweet, Split};
    use crate::embeddings::skipgram::{train_skipgram, SkipGramConfig};

    fn trained_model() -> EmbeddingModel {
        let corpus = Corpus::new(
            vec![
                LabeledTweet::new("0", vec!["sun".into(), "moon".into(), "star".into()]),
                LabeledTweet::new("1", vec!["moon".into(), "sun".into()]),
            ],
            Split::Unlabeled,
        )
        .unwrap();
        let cfg = SkipGramConfig {
            dimension: 8,
            epochs: 2,
            min_count: 1,
            subsample: 0.0,
            subword: SubwordIndex {
                n_min: 3,
                n_max: 4,
                bucket_count: 32,
            },
            ..SkipGramConfig::default()
        };
        train_skipgram(&corpus, &cfg).unwrap().0
    }

    #[test]
    fn round_trip_is_exact() {
        let model = trained_model();
        let mut buf = Vec::new();
        let saved_hash = save_model(&model, &mut buf).unwrap();
        let (loaded, loaded_hash) = load_model(&buf[..]).unwrap();
        assert_eq!(saved_hash, loaded_hash);
        assert_eq!(model, loaded);
        assert_eq!(model_hash(&model), saved_hash);
    }

    #[test]
    fn rejects_bad_magic() {
        let err = load_model(&b"NOPE....."[..]).unwrap_err();
        assert!(err.to_string().contains("magic"));
    }

    #[test]
    fn hash_distinguishes_models() {
        let model = trained_model();
        let mut other = model.clone();
        other.matrix.input[0] += 1.0;
        assert_ne!(model_hash(&model), model_hash(&other));
    }
}
