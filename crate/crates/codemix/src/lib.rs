//! Sentiment analysis for romanized code-mixed social media text.
//!
//! Two embedding strategies feed a common set of classifiers:
//!
//! * treat the code-mixed text as an independent language, train
//!   subword skip-gram embeddings for it, and align them with
//!   pre-trained English vectors through unsupervised self-learning
//!   ([`alignment`]);
//! * treat code-mixed words as an extension of the English vocabulary
//!   and retrain pre-trained vectors incrementally with the original
//!   rows frozen ([`embeddings::incremental_retrain`]).
//!
//! On top of either embedding space, [`classifiers`] provides a linear
//! SVM, a stacked bidirectional LSTM and a multi-kernel CNN, and
//! [`evaluation`] computes the macro-averaged metrics used to compare
//! them. See the `examples/` directory for runnable walkthroughs of
//! each stage and the `codemix` binary for the scriptable pipeline.

pub mod alignment;
pub(crate) mod binio;
pub mod classifiers;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod evaluation;
pub mod num;
pub mod rng;

pub use error::{Error, Result};
