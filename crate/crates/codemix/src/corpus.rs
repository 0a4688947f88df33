//! Task-file parsing, tokenization and script filtering.
//!
//! The shared-task format is record oriented: a `meta <id> [<label>]` line
//! followed by one `<token>\t<lang_tag>` line per token, records separated
//! by blank lines. Language tags are parsed so files round-trip, but no
//! downstream stage consults them.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

/// The three sentiment classes, ordered for deterministic tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SentimentLabel {
    Positive,
    Negative,
    Neutral,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [
        SentimentLabel::Positive,
        SentimentLabel::Negative,
        SentimentLabel::Neutral,
    ];

    /// Dense index used by confusion matrices and classifier heads.
    pub fn index(self) -> usize {
        match self {
            SentimentLabel::Positive => 0,
            SentimentLabel::Negative => 1,
            SentimentLabel::Neutral => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<SentimentLabel> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::Positive => "positive",
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentLabel {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.to_ascii_lowercase().as_str() {
            "positive" => Ok(SentimentLabel::Positive),
            "negative" => Ok(SentimentLabel::Negative),
            "neutral" => Ok(SentimentLabel::Neutral),
            _ => Err(()),
        }
    }
}

/// Word-level language tag. Carried through for round-tripping only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LangTag {
    En,
    Hi,
    Mixed,
    Univ,
}

impl LangTag {
    pub fn as_str(self) -> &'static str {
        match self {
            LangTag::En => "en",
            LangTag::Hi => "hi",
            LangTag::Mixed => "mixed",
            LangTag::Univ => "univ",
        }
    }

    /// Tags outside the four known values collapse to `univ`, the
    /// catch-all class for symbols and other non-language tokens.
    fn parse_lenient(s: &str) -> LangTag {
        match s.to_ascii_lowercase().as_str() {
            "en" | "eng" => LangTag::En,
            "hi" | "hin" => LangTag::Hi,
            "mixed" => LangTag::Mixed,
            _ => LangTag::Univ,
        }
    }
}

impl fmt::Display for LangTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One tweet: tokens, optional per-token language tags, optional label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTweet {
    pub id: String,
    pub tokens: Vec<String>,
    pub lang_tags: Option<Vec<LangTag>>,
    pub label: Option<SentimentLabel>,
}

impl LabeledTweet {
    pub fn new(id: impl Into<String>, tokens: Vec<String>) -> Self {
        LabeledTweet {
            id: id.into(),
            tokens,
            lang_tags: None,
            label: None,
        }
    }

    pub fn with_label(mut self, label: SentimentLabel) -> Self {
        self.label = Some(label);
        self
    }
}

/// Which portion of the data a corpus represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Validation,
    Test,
    Unlabeled,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
            Split::Unlabeled => "unlabeled",
        }
    }

    pub fn requires_labels(self) -> bool {
        !matches!(self, Split::Unlabeled)
    }
}

impl FromStr for Split {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "validation" | "valid" | "dev" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            "unlabeled" => Ok(Split::Unlabeled),
            _ => Err(()),
        }
    }
}

/// A list of tweets belonging to one split.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub tweets: Vec<LabeledTweet>,
    pub split: Split,
}

impl Corpus {
    /// Build a corpus and enforce the label/split invariant.
    pub fn new(tweets: Vec<LabeledTweet>, split: Split) -> Result<Corpus> {
        for (i, tweet) in tweets.iter().enumerate() {
            if split.requires_labels() && tweet.label.is_none() {
                return Err(Error::format(format!(
                    "{} split requires a label on every tweet; tweet {} (id {}) has none",
                    split.as_str(),
                    i,
                    tweet.id
                )));
            }
            if !split.requires_labels() && tweet.label.is_some() {
                return Err(Error::format(format!(
                    "unlabeled split must not carry labels; tweet {} (id {}) has one",
                    i, tweet.id
                )));
            }
        }
        Ok(Corpus { tweets, split })
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    /// Token sequences, ready for embedding training.
    pub fn sentences(&self) -> impl Iterator<Item = &[String]> {
        self.tweets.iter().map(|t| t.tokens.as_slice())
    }

    /// Read a cleaned corpus file: one tweet per line, tokens
    /// space-separated. Empty lines are skipped.
    pub fn from_cleaned_text(reader: impl BufRead) -> Result<Corpus> {
        let mut tweets = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let tokens: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
            if tokens.is_empty() {
                continue;
            }
            tweets.push(LabeledTweet::new(i.to_string(), tokens));
        }
        Corpus::new(tweets, Split::Unlabeled)
    }

    /// Write the cleaned-corpus format.
    pub fn write_cleaned_text(&self, mut writer: impl Write) -> Result<()> {
        for tweet in &self.tweets {
            writeln!(writer, "{}", tweet.tokens.join(" "))?;
        }
        Ok(())
    }
}

/// Parse the shared-task record format.
///
/// Records are separated by blank lines. The first line of a record is
/// `meta <id> <label>` (label omitted for unlabeled data); every further
/// line is `<token>\t<lang_tag>`.
pub fn parse_task_file(reader: impl BufRead, split: Split) -> Result<Corpus> {
    Corpus::new(parse_task_records(reader)?, split)
}

/// As [`parse_task_file`], inferring the split from the records: all
/// labeled parses as `Test`, none labeled as `Unlabeled`, and a
/// mixture is an error.
pub fn parse_task_file_infer(reader: impl BufRead) -> Result<Corpus> {
    let tweets = parse_task_records(reader)?;
    let labeled = tweets.iter().filter(|t| t.label.is_some()).count();
    let split = if labeled == 0 {
        Split::Unlabeled
    } else if labeled == tweets.len() {
        Split::Test
    } else {
        return Err(Error::format(format!(
            "{labeled} of {} records carry labels; expected all or none",
            tweets.len()
        )));
    };
    Corpus::new(tweets, split)
}

fn parse_task_records(reader: impl BufRead) -> Result<Vec<LabeledTweet>> {
    struct Record {
        id: String,
        tokens: Vec<String>,
        tags: Vec<LangTag>,
        label: Option<SentimentLabel>,
    }

    let mut tweets = Vec::new();
    let mut current: Option<Record> = None;

    let flush = |record: Option<Record>, tweets: &mut Vec<LabeledTweet>| {
        if let Some(rec) = record {
            tweets.push(LabeledTweet {
                id: rec.id,
                tokens: rec.tokens,
                lang_tags: Some(rec.tags),
                label: rec.label,
            });
        }
    };

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() {
            flush(current.take(), &mut tweets);
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("meta") {
            if rest.is_empty() || rest.starts_with([' ', '\t']) {
                flush(current.take(), &mut tweets);
                let fields: Vec<&str> = rest.split_whitespace().collect();
                let (id, label) = match fields.as_slice() {
                    [id] => (id.to_string(), None),
                    [id, label] => {
                        let parsed = label.parse::<SentimentLabel>().map_err(|_| {
                            Error::parse(
                                lineno,
                                format!(
                                    "label {label:?} is not one of positive/negative/neutral"
                                ),
                            )
                        })?;
                        (id.to_string(), Some(parsed))
                    }
                    _ => {
                        return Err(Error::parse(
                            lineno,
                            format!("malformed meta line {trimmed:?}"),
                        ))
                    }
                };
                current = Some(Record {
                    id,
                    tokens: Vec::new(),
                    tags: Vec::new(),
                    label,
                });
                continue;
            }
        }
        // Token line.
        let rec = current.as_mut().ok_or_else(|| {
            Error::parse(lineno, format!("token line {trimmed:?} before any meta line"))
        })?;
        let mut parts = trimmed.split('\t');
        let token = parts.next().unwrap_or("");
        let tag = parts.next();
        if parts.next().is_some() {
            return Err(Error::parse(
                lineno,
                format!("token line {trimmed:?} has more than two fields"),
            ));
        }
        let tag = match tag {
            Some(t) if !t.trim().is_empty() => t.trim(),
            _ => {
                return Err(Error::parse(
                    lineno,
                    format!("token line {trimmed:?} is missing its language tag"),
                ))
            }
        };
        if token.is_empty() || token.contains(char::is_whitespace) {
            return Err(Error::parse(
                lineno,
                format!("invalid token {token:?} (empty or contains whitespace)"),
            ));
        }
        rec.tokens.push(token.to_string());
        rec.tags.push(LangTag::parse_lenient(tag));
    }
    flush(current.take(), &mut tweets);

    Ok(tweets)
}

/// Serialize a corpus back into the shared-task record format.
///
/// Tweets without language tags are written with the `univ` tag so the
/// output stays within the format.
pub fn write_task_file(corpus: &Corpus, mut writer: impl Write) -> Result<()> {
    for (i, tweet) in corpus.tweets.iter().enumerate() {
        if i > 0 {
            writeln!(writer)?;
        }
        match tweet.label {
            Some(label) => writeln!(writer, "meta {} {}", tweet.id, label)?,
            None => writeln!(writer, "meta {}", tweet.id)?,
        }
        for (j, token) in tweet.tokens.iter().enumerate() {
            let tag = tweet
                .lang_tags
                .as_ref()
                .and_then(|t| t.get(j).copied())
                .unwrap_or(LangTag::Univ);
            writeln!(writer, "{token}\t{tag}")?;
        }
    }
    Ok(())
}

/// Devanagari block, U+0900 through U+097F.
fn has_devanagari(text: &str) -> bool {
    text.chars().any(|c| ('\u{0900}'..='\u{097F}').contains(&c))
}

/// Keep only the strings free of Devanagari code points, preserving order.
pub fn filter_devanagari<S: AsRef<str>>(tweets: &[S]) -> Vec<String> {
    tweets
        .iter()
        .map(|s| s.as_ref())
        .filter(|s| !has_devanagari(s))
        .map(str::to_owned)
        .collect()
}

const URL_TOKEN: &str = "<url>";
const USER_TOKEN: &str = "<user>";

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || ('\u{2000}'..='\u{206F}').contains(&c)
}

fn looks_like_url(chunk: &str) -> bool {
    chunk.starts_with("http://") || chunk.starts_with("https://") || chunk.starts_with("www.")
}

fn looks_like_mention(chunk: &str) -> bool {
    let mut chars = chunk.chars();
    chars.next() == Some('@') && chars.clone().any(char::is_alphanumeric)
}

/// Rule-based tweet tokenizer.
///
/// Lowercases, splits on whitespace, replaces URLs with `<url>` and
/// @-mentions with `<user>`, strips the leading `#` off hashtags, and
/// detaches punctuation runs as their own tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    for chunk in lowered.split_whitespace() {
        if looks_like_url(chunk) {
            tokens.push(URL_TOKEN.to_string());
            continue;
        }
        if looks_like_mention(chunk) {
            tokens.push(USER_TOKEN.to_string());
            continue;
        }
        let body = chunk.strip_prefix('#').unwrap_or(chunk);
        let mut run = String::new();
        let mut run_is_punct = None;
        for c in body.chars() {
            let p = is_punct(c);
            if run_is_punct != Some(p) && !run.is_empty() {
                tokens.push(std::mem::take(&mut run));
            }
            run_is_punct = Some(p);
            run.push(c);
        }
        if !run.is_empty() {
            tokens.push(run);
        }
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Cursor;

    #[test]
    fn label_order_is_pos_neg_neu() {
        assert!(SentimentLabel::Positive < SentimentLabel::Negative);
        assert!(SentimentLabel::Negative < SentimentLabel::Neutral);
    }

    #[test]
    fn parse_simple_record() {
        let input = "meta 1 positive\nnice\ten\ndin\thi\n";
        let corpus = parse_task_file(Cursor::new(input), Split::Train).unwrap();
        assert_eq!(corpus.len(), 1);
        let tweet = &corpus.tweets[0];
        assert_eq!(tweet.id, "1");
        assert_eq!(tweet.tokens, vec!["nice", "din"]);
        assert_eq!(tweet.lang_tags, Some(vec![LangTag::En, LangTag::Hi]));
        assert_eq!(tweet.label, Some(SentimentLabel::Positive));
    }

    #[test]
    fn parse_empty_stream() {
        let corpus = parse_task_file(Cursor::new(""), Split::Unlabeled).unwrap();
        assert_eq!(corpus.len(), 0);
    }

    #[test]
    fn parse_rejects_unknown_label() {
        let input = "meta 7 happy\nnice\ten\n";
        let err = parse_task_file(Cursor::new(input), Split::Train).unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 1);
                assert!(msg.contains("happy"), "{msg}");
            }
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn parse_rejects_missing_tag() {
        let input = "meta 1 positive\nnice\n";
        let err = parse_task_file(Cursor::new(input), Split::Train).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn parse_rejects_malformed_meta() {
        let input = "meta 1 positive extra\nnice\ten\n";
        assert!(matches!(
            parse_task_file(Cursor::new(input), Split::Train),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn parse_rejects_unlabeled_in_train_split() {
        let input = "meta 1\nnice\ten\n";
        assert!(parse_task_file(Cursor::new(input), Split::Train).is_err());
        assert!(parse_task_file(Cursor::new(input), Split::Unlabeled).is_ok());
    }

    #[test]
    fn parse_unknown_tag_collapses_to_univ() {
        let input = "meta 1 neutral\n:-)\tO\n";
        let corpus = parse_task_file(Cursor::new(input), Split::Train).unwrap();
        assert_eq!(corpus.tweets[0].lang_tags, Some(vec![LangTag::Univ]));
    }

    #[test]
    fn task_file_round_trip() {
        let input = "meta 1 positive\nnice\ten\ndin\thi\n\nmeta 2 negative\nbad\ten\n\nmeta 3 neutral\n";
        let first = parse_task_file(Cursor::new(input), Split::Train).unwrap();
        let mut buf = Vec::new();
        write_task_file(&first, &mut buf).unwrap();
        let second = parse_task_file(Cursor::new(buf), Split::Train).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn devanagari_filter_drops_marked_strings() {
        let input = vec!["main happy hoon".to_string(), "मैं happy hoon".to_string()];
        assert_eq!(filter_devanagari(&input), vec!["main happy hoon"]);
    }

    #[test]
    fn devanagari_filter_keeps_emoji() {
        let input = vec!["hello 😊 #yolo".to_string()];
        assert_eq!(filter_devanagari(&input), vec!["hello 😊 #yolo"]);
        assert_eq!(filter_devanagari::<String>(&[]), Vec::<String>::new());
    }

    #[test]
    fn tokenize_sentinels() {
        assert_eq!(
            tokenize("Nice DIN @raj http://x.co"),
            vec!["nice", "din", "<user>", "<url>"]
        );
    }

    #[test]
    fn tokenize_hashtag_and_punct() {
        assert_eq!(tokenize("#Bharat zindabad!!"), vec!["bharat", "zindabad", "!!"]);
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(tokenize("a!b"), vec!["a", "!", "b"]);
    }

    #[test]
    fn tokenize_keeps_emoji() {
        assert_eq!(tokenize("hello 😊 #yolo"), vec!["hello", "😊", "yolo"]);
    }

    proptest! {
        #[test]
        fn devanagari_filter_idempotent(strings in proptest::collection::vec("[a-zA-Z\u{0900}-\u{097F} ]{0,12}", 0..8)) {
            let once = filter_devanagari(&strings);
            let twice = filter_devanagari(&once);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn tokens_never_contain_whitespace(text in "\\PC{0,60}") {
            for token in tokenize(&text) {
                prop_assert!(!token.is_empty());
                prop_assert!(!token.contains(char::is_whitespace));
            }
        }

        #[test]
        fn alphabetic_subsequence_preserved(text in "[a-zA-Z#!?.@ ]{0,40}") {
            let lowered = text.to_lowercase();
            let haystack: Vec<char> = lowered.chars().filter(|c| c.is_alphabetic()).collect();
            let needle: Vec<char> = tokenize(&text)
                .into_iter()
                .filter(|t| t != URL_TOKEN && t != USER_TOKEN)
                .flat_map(|t| t.chars().filter(|c| c.is_alphabetic()).collect::<Vec<_>>())
                .collect();
            // needle must be a subsequence of haystack
            let mut it = haystack.iter();
            for c in &needle {
                prop_assert!(it.any(|h| h == c), "token chars not a subsequence");
            }
        }
    }
}
