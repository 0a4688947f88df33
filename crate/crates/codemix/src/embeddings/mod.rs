//! Embedding training, composition and persistence.

pub mod matrix;
pub mod model_io;
pub mod skipgram;
pub mod subword;
pub mod vec_format;
pub mod vocab;

pub use matrix::{EmbeddingMatrix, EmbeddingModel};
pub use model_io::{load_model, model_hash, save_model};
pub use skipgram::{incremental_retrain, train_skipgram, SkipGramConfig, TrainReport};
pub use subword::{extract_ngrams, hash_ngram, SubwordIndex};
pub use vec_format::{load_pretrained, save_vec, VecLoad};
pub use vocab::Vocabulary;
