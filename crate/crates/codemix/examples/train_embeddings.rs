//! Train subword skip-gram embeddings on a tiny corpus and query
//! nearest neighbours, including an out-of-vocabulary word composed
//! purely from its character n-grams.
//!
//! ```bash
//! cargo run --release -p codemix --example train_embeddings
//! ```

use codemix::corpus::{Corpus, LabeledTweet, Split};
use codemix::embeddings::{train_skipgram, EmbeddingModel, SkipGramConfig, SubwordIndex};
use codemix::num::dot_f64;

fn main() {
    // Three topical clusters so the geometry has something to find.
    let lines = [
        "khana bahut acha tha restaurant mein",
        "acha khana milta hai wahan",
        "restaurant ka khana mast tha",
        "cricket match dekha kal stadium mein",
        "kal cricket khela stadium gaye",
        "match mein cricket acha khela",
        "phone ki battery kharab hai bilkul",
        "naya phone liya battery sahi hai",
        "battery phone ki jaldi khatam hoti",
    ];
    let tweets = lines
        .iter()
        .enumerate()
        .map(|(i, l)| LabeledTweet::new(i.to_string(), l.split_whitespace().map(Into::into).collect()))
        .collect();
    let corpus = Corpus::new(tweets, Split::Unlabeled).unwrap();

    // A corpus this small needs far more epochs than the defaults
    // before the topical clusters separate.
    let cfg = SkipGramConfig {
        dimension: 24,
        window: 3,
        epochs: 600,
        min_count: 1,
        subsample: 0.0,
        seed: 7,
        subword: SubwordIndex {
            n_min: 3,
            n_max: 5,
            bucket_count: 2_000,
        },
        ..SkipGramConfig::default()
    };
    let (model, report) = train_skipgram(&corpus, &cfg).unwrap();
    println!(
        "trained {} words (+{} subword buckets) over {} tokens, loss {:.2}\n",
        model.vocab.len(),
        model.matrix.bucket_rows(),
        report.tokens,
        report.loss
    );

    for query in ["cricket", "battery", "achaa" /* OOV, subwords only */] {
        println!("nearest to {query:?}:");
        for (word, cos) in nearest(&model, query, 3) {
            println!("  {word:<12} {cos:.3}");
        }
        println!();
    }
}

fn nearest(model: &EmbeddingModel, query: &str, k: usize) -> Vec<(String, f64)> {
    let qv = model.word_vector(query);
    let qn = dot_f64(&qv, &qv).sqrt();
    let mut sims: Vec<(String, f64)> = model
        .vocab
        .words()
        .filter(|w| *w != query)
        .map(|w| {
            let v = model.word_vector(w);
            let cos = dot_f64(&qv, &v) / (qn * dot_f64(&v, &v).sqrt()).max(1e-12);
            (w.to_string(), cos)
        })
        .collect();
    sims.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    sims.truncate(k);
    sims
}
