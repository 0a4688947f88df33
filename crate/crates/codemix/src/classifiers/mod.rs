//! Sentence classifiers over embedding features: linear SVM on mean
//! vectors, and BiLSTM / CNN over token-vector sequences. Embeddings
//! are frozen during classifier training so that competing embedding
//! spaces stay comparable.

pub mod bilstm;
pub mod cnn;
pub mod model_io;
pub mod nn;
pub mod svm;

use ndarray::Array2;

use crate::corpus::{Corpus, LabeledTweet, SentimentLabel};
use crate::embeddings::{model_hash, EmbeddingModel};
use crate::error::{Error, Result};

pub use bilstm::{train_bilstm_on_encoded, BiLstmConfig, BiLstmModel};
pub use cnn::{argmax3, train_cnn_on_encoded, CnnConfig, CnnModel};
pub use model_io::{load_classifier, save_classifier};
pub use svm::{train_svm_on_features, SvmConfig, SvmModel};

/// A token-vector sequence padded or truncated to a fixed length.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedDocument {
    /// padded_len x dim rows; padding positions are zero.
    pub rows: Array2<f32>,
    /// True token count before padding/truncation.
    pub len: usize,
}

impl EncodedDocument {
    pub fn padded_len(&self) -> usize {
        self.rows.nrows()
    }

    /// The unpadded prefix, for consumers that handle variable length.
    pub fn prefix(&self) -> Array2<f32> {
        self.rows.slice(ndarray::s![..self.len, ..]).to_owned()
    }
}

/// Arithmetic mean of the token vectors; the zero vector for an empty
/// tweet.
pub fn encode_mean(tweet: &LabeledTweet, embeddings: &EmbeddingModel) -> Vec<f32> {
    let dim = embeddings.dim();
    let mut acc = vec![0.0f32; dim];
    if tweet.tokens.is_empty() {
        return acc;
    }
    for token in &tweet.tokens {
        let v = embeddings.word_vector(token);
        for (a, x) in acc.iter_mut().zip(&v) {
            *a += x;
        }
    }
    let inv = 1.0 / tweet.tokens.len() as f32;
    for a in acc.iter_mut() {
        *a *= inv;
    }
    acc
}

/// Per-token vectors, right-padded with zeros to `padded_len` (raised
/// to 5 so every kernel size applies) and truncated beyond it.
pub fn encode_sequence(
    tweet: &LabeledTweet,
    embeddings: &EmbeddingModel,
    padded_len: usize,
) -> EncodedDocument {
    let l = padded_len.max(5);
    let dim = embeddings.dim();
    let len = tweet.tokens.len().min(l);
    let mut rows = Array2::<f32>::zeros((l, dim));
    for (t, token) in tweet.tokens.iter().take(len).enumerate() {
        let v = embeddings.word_vector(token);
        rows.row_mut(t)
            .assign(&ndarray::ArrayView1::from(&v[..]));
    }
    EncodedDocument { rows, len }
}

/// Which classifier a trained model is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    Svm,
    BiLstm,
    Cnn,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Svm => "svm",
            ClassifierKind::BiLstm => "bilstm",
            ClassifierKind::Cnn => "cnn",
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = ();
    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.to_ascii_lowercase().as_str() {
            "svm" => Ok(ClassifierKind::Svm),
            "bilstm" | "bi-lstm" | "lstm" => Ok(ClassifierKind::BiLstm),
            "cnn" => Ok(ClassifierKind::Cnn),
            _ => Err(()),
        }
    }
}

/// Trained parameters plus the config that produced them.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierParams {
    Svm(SvmModel<f32>, SvmConfig),
    BiLstm(BiLstmModel<f32>, BiLstmConfig),
    Cnn(CnnModel<f32>, CnnConfig),
}

/// A classifier bound to the identity of the embedding model it was
/// trained against.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedClassifier {
    pub params: ClassifierParams,
    pub embedding_hash: u64,
}

impl TrainedClassifier {
    pub fn kind(&self) -> ClassifierKind {
        match &self.params {
            ClassifierParams::Svm(..) => ClassifierKind::Svm,
            ClassifierParams::BiLstm(..) => ClassifierKind::BiLstm,
            ClassifierParams::Cnn(..) => ClassifierKind::Cnn,
        }
    }

    /// True when `embeddings` is the model this classifier was trained
    /// with; callers should warn when it is not.
    pub fn embedding_matches(&self, embeddings: &EmbeddingModel) -> bool {
        model_hash(embeddings) == self.embedding_hash
    }

    /// Class scores for one tweet: SVM margins or network logits.
    pub fn scores(&self, tweet: &LabeledTweet, embeddings: &EmbeddingModel) -> [f64; 3] {
        match &self.params {
            ClassifierParams::Svm(model, _) => {
                let features = encode_mean(tweet, embeddings);
                let margins = model.margins(&features);
                [margins[0] as f64, margins[1] as f64, margins[2] as f64]
            }
            ClassifierParams::Cnn(model, cfg) => {
                let doc = encode_sequence(tweet, embeddings, cfg.seq_len);
                let logits = model.forward(&doc.rows);
                [logits[0] as f64, logits[1] as f64, logits[2] as f64]
            }
            ClassifierParams::BiLstm(model, cfg) => {
                let doc = encode_sequence(tweet, embeddings, cfg.seq_len);
                let logits = model.forward(&doc.prefix());
                [logits[0] as f64, logits[1] as f64, logits[2] as f64]
            }
        }
    }

    /// Argmax over scores; exact ties go to the earlier label in
    /// (positive, negative, neutral) order. Never fails, including on
    /// empty tweets.
    pub fn predict(
        &self,
        tweet: &LabeledTweet,
        embeddings: &EmbeddingModel,
    ) -> (SentimentLabel, [f64; 3]) {
        let scores = self.scores(tweet, embeddings);
        let label = SentimentLabel::from_index(argmax3(&scores)).unwrap();
        (label, scores)
    }
}

fn labeled_pairs(corpus: &Corpus) -> Result<Vec<(&LabeledTweet, usize)>> {
    corpus
        .tweets
        .iter()
        .map(|t| {
            t.label
                .map(|l| (t, l.index()))
                .ok_or_else(|| Error::format(format!("tweet {} has no label", t.id)))
        })
        .collect()
}

/// Train the linear SVM on mean-pooled vectors.
pub fn train_svm(
    corpus: &Corpus,
    embeddings: &EmbeddingModel,
    cfg: &SvmConfig,
) -> Result<TrainedClassifier> {
    let data: Vec<(Vec<f32>, usize)> = labeled_pairs(corpus)?
        .into_iter()
        .map(|(tweet, label)| (encode_mean(tweet, embeddings), label))
        .collect();
    let model = train_svm_on_features(&data, cfg)?;
    Ok(TrainedClassifier {
        params: ClassifierParams::Svm(model, cfg.clone()),
        embedding_hash: model_hash(embeddings),
    })
}

/// Train the CNN; when a validation corpus is given, early-stops on its
/// macro-F1.
pub fn train_cnn(
    corpus: &Corpus,
    validation: Option<&Corpus>,
    embeddings: &EmbeddingModel,
    cfg: &CnnConfig,
) -> Result<TrainedClassifier> {
    let encode = |c: &Corpus| -> Result<Vec<(Array2<f32>, usize)>> {
        Ok(labeled_pairs(c)?
            .into_iter()
            .map(|(tweet, label)| (encode_sequence(tweet, embeddings, cfg.seq_len).rows, label))
            .collect())
    };
    let train = encode(corpus)?;
    let val = validation.map(encode).transpose()?;
    let model = train_cnn_on_encoded(&train, val.as_deref(), embeddings.dim(), cfg)?;
    Ok(TrainedClassifier {
        params: ClassifierParams::Cnn(model, cfg.clone()),
        embedding_hash: model_hash(embeddings),
    })
}

/// Train the BiLSTM; when a validation corpus is given, early-stops on
/// its macro-F1.
pub fn train_bilstm(
    corpus: &Corpus,
    validation: Option<&Corpus>,
    embeddings: &EmbeddingModel,
    cfg: &BiLstmConfig,
) -> Result<TrainedClassifier> {
    let encode = |c: &Corpus| -> Result<Vec<(Array2<f32>, usize)>> {
        Ok(labeled_pairs(c)?
            .into_iter()
            .map(|(tweet, label)| {
                let doc = encode_sequence(tweet, embeddings, cfg.seq_len);
                (doc.prefix(), label)
            })
            .collect())
    };
    let train = encode(corpus)?;
    let val = validation.map(encode).transpose()?;
    let model = train_bilstm_on_encoded(&train, val.as_deref(), embeddings.dim(), cfg)?;
    Ok(TrainedClassifier {
        params: ClassifierParams::BiLstm(model, cfg.clone()),
        embedding_hash: model_hash(embeddings),
    })
}

/// One prediction record per tweet:
/// `<id>\t<label>\t<s_pos>\t<s_neg>\t<s_neu>`.
pub fn write_predictions(
    records: &[(String, SentimentLabel, [f64; 3])],
    mut writer: impl std::io::Write,
) -> Result<()> {
    for (id, label, scores) in records {
        writeln!(
            writer,
            "{id}\t{label}\t{:.6}\t{:.6}\t{:.6}",
            scores[0], scores[1], scores[2]
        )?;
    }
    Ok(())
}

/// Parse a predictions file back into (id, label, scores) records.
pub fn read_predictions(
    reader: impl std::io::BufRead,
) -> Result<Vec<(String, SentimentLabel, [f64; 3])>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                i + 1,
                format!("expected 5 tab-separated fields, got {}", fields.len()),
            ));
        }
        let label = fields[1]
            .parse::<SentimentLabel>()
            .map_err(|_| Error::parse(i + 1, format!("bad label {:?}", fields[1])))?;
        let mut scores = [0.0f64; 3];
        for (slot, field) in scores.iter_mut().zip(&fields[2..5]) {
            *slot = field
                .parse::<f64>()
                .map_err(|_| Error::parse(i + 1, format!("bad score {field:?}")))?;
        }
        out.push((fields[0].to_string(), label, scores));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Split;
    use crate::embeddings::{skipgram::SkipGramConfig, train_skipgram, SubwordIndex};

    fn tiny_embeddings() -> EmbeddingModel {
        let corpus = corpus_from_lines(
            &["good great nice", "bad awful poor", "ok fine meh"],
            None,
        );
        let cfg = SkipGramConfig {
            dimension: 6,
            epochs: 2,
            min_count: 1,
            subsample: 0.0,
            subword: SubwordIndex {
                n_min: 3,
                n_max: 4,
                bucket_count: 16,
            },
            ..SkipGramConfig::default()
        };
        train_skipgram(&corpus, &cfg).unwrap().0
    }

    fn corpus_from_lines(lines: &[&str], labels: Option<&[SentimentLabel]>) -> Corpus {
        let tweets: Vec<LabeledTweet> = lines
            .iter()
            .enumerate()
            .map(|(i, line)| {
                let mut t = LabeledTweet::new(
                    i.to_string(),
                    line.split_whitespace().map(str::to_owned).collect(),
                );
                if let Some(ls) = labels {
                    t.label = Some(ls[i]);
                }
                t
            })
            .collect();
        let split = if labels.is_some() {
            Split::Train
        } else {
            Split::Unlabeled
        };
        Corpus::new(tweets, split).unwrap()
    }

    #[test]
    fn encode_mean_rules() {
        let embeddings = tiny_embeddings();
        let dim = embeddings.dim();
        let empty = LabeledTweet::new("0", vec![]);
        assert_eq!(encode_mean(&empty, &embeddings), vec![0.0; dim]);

        let single = LabeledTweet::new("1", vec!["good".into()]);
        let twice = LabeledTweet::new("2", vec!["good".into(), "good".into()]);
        assert_eq!(
            encode_mean(&single, &embeddings),
            encode_mean(&twice, &embeddings)
        );
    }

    #[test]
    fn encode_sequence_pads_and_truncates() {
        let embeddings = tiny_embeddings();
        let dim = embeddings.dim();
        let tweet = LabeledTweet::new("0", vec!["good".into(), "bad".into(), "ok".into()]);
        let doc = encode_sequence(&tweet, &embeddings, 5);
        assert_eq!(doc.padded_len(), 5);
        assert_eq!(doc.len, 3);
        for t in 3..5 {
            assert!(doc.rows.row(t).iter().all(|&v| v == 0.0));
        }

        let long = LabeledTweet::new(
            "1",
            (0..9).map(|i| format!("tok{i}")).collect::<Vec<_>>(),
        );
        let doc = encode_sequence(&long, &embeddings, 5);
        assert_eq!(doc.len, 5);
        assert_eq!(doc.padded_len(), 5);

        let empty = LabeledTweet::new("2", vec![]);
        let doc = encode_sequence(&empty, &embeddings, 7);
        assert_eq!(doc.len, 0);
        assert!(doc.rows.iter().all(|&v| v == 0.0));
        let _ = dim;
    }

    #[test]
    fn padded_len_floor_is_five() {
        let embeddings = tiny_embeddings();
        let tweet = LabeledTweet::new("0", vec!["good".into()]);
        let doc = encode_sequence(&tweet, &embeddings, 2);
        assert_eq!(doc.padded_len(), 5);
    }

    #[test]
    fn predict_breaks_ties_by_label_order() {
        let embeddings = tiny_embeddings();
        let dim = embeddings.dim();
        let svm = TrainedClassifier {
            params: ClassifierParams::Svm(SvmModel::zeros(dim), SvmConfig::default()),
            embedding_hash: model_hash(&embeddings),
        };
        // Zero weights: every margin is exactly 0 -> positive wins.
        let tweet = LabeledTweet::new("0", vec!["good".into()]);
        let (label, scores) = svm.predict(&tweet, &embeddings);
        assert_eq!(scores, [0.0, 0.0, 0.0]);
        assert_eq!(label, SentimentLabel::Positive);

        let empty = LabeledTweet::new("1", vec![]);
        let (label, _) = svm.predict(&empty, &embeddings);
        assert_eq!(label, SentimentLabel::Positive);
    }

    #[test]
    fn argmax_of_plain_scores() {
        assert_eq!(argmax3(&[2.0, -1.0, 0.0]), 0);
        assert_eq!(argmax3(&[-5.0, -1.0, -1.0]), 1);
    }

    #[test]
    fn end_to_end_svm_on_separable_corpus() {
        use SentimentLabel::*;
        let embeddings = tiny_embeddings();
        let labels = [Positive, Negative, Neutral, Positive, Negative, Neutral];
        let corpus = corpus_from_lines(
            &[
                "good great",
                "bad awful",
                "ok fine",
                "great nice",
                "awful poor",
                "fine meh",
            ],
            Some(&labels),
        );
        let clf = train_svm(&corpus, &embeddings, &SvmConfig::default()).unwrap();
        assert!(clf.embedding_matches(&embeddings));
        assert_eq!(clf.kind(), ClassifierKind::Svm);
    }

    #[test]
    fn prediction_records_round_trip() {
        use SentimentLabel::*;
        let records = vec![
            ("12".to_string(), Positive, [1.5, -0.25, 0.0]),
            ("13".to_string(), Neutral, [0.0, 0.0, 2.0]),
        ];
        let mut buf = Vec::new();
        write_predictions(&records, &mut buf).unwrap();
        let back = read_predictions(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(records.len(), back.len());
        for ((id, label, scores), (id2, label2, scores2)) in records.iter().zip(&back) {
            assert_eq!(id, id2);
            assert_eq!(label, label2);
            for (a, b) in scores.iter().zip(scores2) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
