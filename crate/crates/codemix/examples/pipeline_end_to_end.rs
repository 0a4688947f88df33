//! Both systems end to end at demo scale, through the library API:
//! one path aligns independently trained spaces, the other extends
//! pre-trained vectors by incremental retraining. Both finish with the
//! same classifier and evaluation.
//!
//! ```bash
//! cargo run --release -p codemix --example pipeline_end_to_end
//! ```

use std::io::Cursor;

use codemix::alignment::{
    merge_aligned, normalize_embeddings, project_full, self_learning_align, word_matrix,
    AlignmentConfig,
};
use codemix::classifiers::{train_svm, SvmConfig, TrainedClassifier};
use codemix::corpus::{Corpus, LabeledTweet, SentimentLabel, Split};
use codemix::embeddings::{
    incremental_retrain, load_pretrained, train_skipgram, EmbeddingModel, SkipGramConfig,
    SubwordIndex,
};
use codemix::evaluation;
use codemix::rng::Rng;

const POOLS: [&[&str]; 3] = [
    &["acha", "mast", "badhiya", "khushi"],
    &["bura", "bekar", "ganda", "dukh"],
    &["thik", "waisa", "aam", "sadharan"],
];
const SHARED: [&str; 10] = [
    "aaj", "kal", "dost", "time", "din", "movie", "khana", "log", "ghar", "kaam",
];

fn labeled_corpus(n: usize, seed: u64, id_base: usize, split: Split) -> Corpus {
    let mut rng = Rng::new(seed);
    let tweets = (0..n)
        .map(|i| {
            let class = i % 3;
            let mut tokens: Vec<String> = (0..6)
                .map(|_| SHARED[rng.next_below(SHARED.len())].to_string())
                .collect();
            for _ in 0..2 {
                let at = rng.next_below(tokens.len() + 1);
                tokens.insert(at, POOLS[class][rng.next_below(4)].to_string());
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
    Corpus::new(tweets, split).unwrap()
}

fn score(clf: &TrainedClassifier, emb: &EmbeddingModel, corpus: &Corpus) -> f64 {
    let golds: Vec<SentimentLabel> = corpus.tweets.iter().map(|t| t.label.unwrap()).collect();
    let preds: Vec<SentimentLabel> = corpus
        .tweets
        .iter()
        .map(|t| clf.predict(t, emb).0)
        .collect();
    evaluation::evaluate(&golds, &preds).unwrap().macro_f1
}

fn main() {
    let train = labeled_corpus(600, 5, 0, Split::Train);
    let validation = labeled_corpus(150, 6, 50_000, Split::Validation);
    let unlabeled = Corpus::new(
        train
            .tweets
            .iter()
            .map(|t| LabeledTweet::new(t.id.clone(), t.tokens.clone()))
            .collect(),
        Split::Unlabeled,
    )
    .unwrap();

    // A small stand-in for pre-trained English vectors: random unit
    // rows for overlapping and English-only words.
    let mut rng = Rng::new(9);
    let en_words: Vec<&str> = SHARED
        .iter()
        .copied()
        .chain(["good", "bad", "okay", "very", "today"])
        .collect();
    let mut vec_text = format!("{} 20\n", en_words.len());
    for word in &en_words {
        vec_text.push_str(word);
        let row: Vec<f64> = (0..20).map(|_| rng.next_gaussian()).collect();
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &row {
            vec_text.push_str(&format!(" {:.6}", v / norm));
        }
        vec_text.push('\n');
    }

    let sg = SkipGramConfig {
        dimension: 20,
        epochs: 25,
        min_count: 1,
        subsample: 0.0,
        seed: 1,
        subword: SubwordIndex {
            n_min: 3,
            n_max: 5,
            bucket_count: 4_000,
        },
        ..SkipGramConfig::default()
    };
    let svm_cfg = SvmConfig {
        epochs: 400,
        learning_rate: 1.0,
        ..SvmConfig::default()
    };

    // System 1: independent spaces, aligned without supervision.
    {
        let (mut own, _) = train_skipgram(&unlabeled, &sg).unwrap();
        let mut english = load_pretrained(Cursor::new(&vec_text)).unwrap().model;
        normalize_embeddings(&mut own.matrix);
        normalize_embeddings(&mut english.matrix);

        let cfg = AlignmentConfig::default();
        let x = word_matrix(&own, cfg.vocab_cutoff);
        let z = word_matrix(&english, cfg.vocab_cutoff);
        let outcome = self_learning_align(&x, &z, &cfg).unwrap();
        project_full(&mut own.matrix, &outcome.w_source).unwrap();
        project_full(&mut english.matrix, &outcome.w_target).unwrap();
        let joint = merge_aligned(&own, &english).unwrap();

        let clf = train_svm(&train, &joint, &svm_cfg).unwrap();
        println!(
            "aligned-spaces system:    joint vocabulary {}, alignment objective {:.3}, validation macro-F1 {:.4}",
            joint.vocab.len(),
            outcome.objective,
            score(&clf, &joint, &validation)
        );
    }

    // System 2: extend pre-trained vectors, originals frozen.
    {
        let english = load_pretrained(Cursor::new(&vec_text)).unwrap().model;
        let (extended, _) = incremental_retrain(&english, &unlabeled, &sg).unwrap();
        let clf = train_svm(&train, &extended, &svm_cfg).unwrap();
        println!(
            "extended-vectors system:  vocabulary {} ({} frozen rows), validation macro-F1 {:.4}",
            extended.vocab.len(),
            extended.matrix.frozen_count(),
            score(&clf, &extended, &validation)
        );
    }
}
