//! Incremental retraining: extend pre-trained vectors with new-corpus
//! words while the original rows stay frozen byte for byte.
//!
//! ```bash
//! cargo run --release -p codemix --example retrain_frozen
//! ```

use std::io::Cursor;

use codemix::corpus::{Corpus, LabeledTweet, Split};
use codemix::embeddings::{incremental_retrain, load_pretrained, SkipGramConfig, SubwordIndex};

fn main() {
    // A miniature stand-in for pre-trained English vectors.
    let vec_file = "\
4 6
good 0.9 0.1 0.0 0.2 -0.1 0.3
bad -0.8 0.2 0.1 -0.3 0.0 -0.2
movie 0.1 0.7 -0.2 0.4 0.1 0.0
very 0.0 0.1 0.6 -0.1 0.2 0.1
";
    let pretrained = load_pretrained(Cursor::new(vec_file)).unwrap().model;
    println!(
        "pre-trained: {} words, dim {}",
        pretrained.vocab.len(),
        pretrained.dim()
    );

    // Code-mixed text introducing words the pre-trained file lacks.
    let lines = [
        "movie bahut acha tha very good",
        "acha movie good acting",
        "bakwaas movie very bad",
        "bad hai bakwaas bilkul",
        "acha khana good mood",
        "bakwaas din bad mood",
    ];
    let tweets = lines
        .iter()
        .enumerate()
        .map(|(i, l)| LabeledTweet::new(i.to_string(), l.split_whitespace().map(Into::into).collect()))
        .collect();
    let corpus = Corpus::new(tweets, Split::Unlabeled).unwrap();

    let cfg = SkipGramConfig {
        epochs: 40,
        min_count: 1,
        subsample: 0.0,
        seed: 3,
        subword: SubwordIndex {
            n_min: 3,
            n_max: 5,
            bucket_count: 1_000,
        },
        ..SkipGramConfig::default()
    };
    let (model, _) = incremental_retrain(&pretrained, &corpus, &cfg).unwrap();

    println!(
        "after retraining: {} words, {} frozen rows\n",
        model.vocab.len(),
        model.matrix.frozen_count()
    );
    for word in ["good", "bad"] {
        let before = pretrained.matrix.input_row(pretrained.vocab.id(word).unwrap());
        let after = model.matrix.input_row(model.vocab.id(word).unwrap());
        println!(
            "{word:<8} frozen row unchanged: {}",
            before
                .iter()
                .zip(after)
                .all(|(a, b)| a.to_bits() == b.to_bits())
        );
    }
    for word in ["acha", "bakwaas"] {
        let id = model.vocab.id(word).unwrap();
        let row = model.matrix.input_row(id);
        let norm: f32 = row.iter().map(|v| v * v).sum::<f32>().sqrt();
        println!("{word:<8} new trained row, norm {norm:.3}");
    }
}
