//! Train all three classifiers (SVM, BiLSTM, CNN) on a small synthetic
//! sentiment task and compare their validation scores.
//!
//! ```bash
//! cargo run --release -p codemix --example train_classifier
//! ```

use codemix::classifiers::{
    train_bilstm, train_cnn, train_svm, BiLstmConfig, CnnConfig, SvmConfig, TrainedClassifier,
};
use codemix::corpus::{Corpus, LabeledTweet, SentimentLabel, Split};
use codemix::embeddings::{train_skipgram, EmbeddingModel, SkipGramConfig, SubwordIndex};
use codemix::evaluation;
use codemix::rng::Rng;

fn build_corpus(n: usize, seed: u64, id_base: usize) -> Corpus {
    let pools: [&[&str]; 3] = [
        &["acha", "mast", "badhiya", "zabardast", "khushi"],
        &["bura", "bekar", "ganda", "bakwaas", "dukh"],
        &["thik", "waisa", "normal", "aam", "sadharan"],
    ];
    let shared = [
        "aaj", "kal", "dost", "time", "din", "raat", "movie", "khana", "log", "baat", "ghar",
        "kaam",
    ];
    let mut rng = Rng::new(seed);
    let tweets = (0..n)
        .map(|i| {
            let class = i % 3;
            let mut tokens: Vec<String> = (0..6)
                .map(|_| shared[rng.next_below(shared.len())].to_string())
                .collect();
            for _ in 0..2 {
                let pool = pools[class];
                let at = rng.next_below(tokens.len() + 1);
                tokens.insert(at, pool[rng.next_below(pool.len())].to_string());
            }
            LabeledTweet::new((id_base + i).to_string(), tokens).with_label(
                [
                    SentimentLabel::Positive,
                    SentimentLabel::Negative,
                    SentimentLabel::Neutral,
                ][class],
            )
        })
        .collect();
    Corpus::new(tweets, Split::Train).unwrap()
}

fn macro_f1(clf: &TrainedClassifier, emb: &EmbeddingModel, corpus: &Corpus) -> f64 {
    let golds: Vec<SentimentLabel> = corpus.tweets.iter().map(|t| t.label.unwrap()).collect();
    let preds: Vec<SentimentLabel> = corpus
        .tweets
        .iter()
        .map(|t| clf.predict(t, emb).0)
        .collect();
    evaluation::evaluate(&golds, &preds).unwrap().macro_f1
}

fn main() {
    let train = build_corpus(600, 11, 0);
    let validation = build_corpus(150, 12, 10_000);

    let sg = SkipGramConfig {
        dimension: 24,
        epochs: 20,
        min_count: 1,
        subsample: 0.0,
        seed: 1,
        subword: SubwordIndex {
            n_min: 3,
            n_max: 5,
            bucket_count: 5_000,
        },
        ..SkipGramConfig::default()
    };
    let (embeddings, _) = train_skipgram(&train, &sg).unwrap();
    println!("embeddings ready: {} words, dim {}\n", embeddings.vocab.len(), embeddings.dim());

    let svm = train_svm(
        &train,
        &embeddings,
        &SvmConfig {
            epochs: 400,
            learning_rate: 1.0,
            ..SvmConfig::default()
        },
    )
    .unwrap();

    let cnn = train_cnn(
        &train,
        Some(&validation),
        &embeddings,
        &CnnConfig {
            kernel_sizes: vec![1, 2, 3],
            filters_per_size: 16,
            seq_len: 12,
            epochs: 10,
            ..CnnConfig::default()
        },
    )
    .unwrap();

    let bilstm = train_bilstm(
        &train,
        Some(&validation),
        &embeddings,
        &BiLstmConfig {
            hidden: 16,
            layers: 1,
            learning_rate: 0.02,
            epochs: 10,
            seq_len: 12,
            ..BiLstmConfig::default()
        },
    )
    .unwrap();

    let mut results = Vec::new();
    for clf in [&svm, &bilstm, &cnn] {
        let report = {
            let golds: Vec<SentimentLabel> =
                validation.tweets.iter().map(|t| t.label.unwrap()).collect();
            let preds: Vec<SentimentLabel> = validation
                .tweets
                .iter()
                .map(|t| clf.predict(t, &embeddings).0)
                .collect();
            evaluation::evaluate(&golds, &preds).unwrap()
        };
        results.push((clf.kind().as_str().to_string(), report));
    }
    print!("{}", evaluation::report_table(&results));

    println!(
        "\ntrain-set macro-F1: svm {:.3}, bilstm {:.3}, cnn {:.3}",
        macro_f1(&svm, &embeddings, &train),
        macro_f1(&bilstm, &embeddings, &train),
        macro_f1(&cnn, &embeddings, &train)
    );
}
