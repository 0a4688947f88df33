//! Deterministic synthetic code-mixed sentiment task.
//!
//! The construction mirrors the statistical shape of the real data:
//! romanized pseudo-words, class-flavoured vocabulary pools, shared
//! filler, and sentiment cues that negation tokens flip. Mean-pooled
//! linear models cannot resolve the negation-cue bigrams, sequence
//! models can, so the fixture preserves the classifier ordering the
//! real task exhibits.

use codemix::corpus::{Corpus, LabeledTweet, SentimentLabel, Split};
use codemix::rng::Rng;

const CONSONANTS: &[&str] = &[
    "b", "ch", "d", "dh", "g", "h", "j", "k", "kh", "l", "m", "n", "p", "r", "s", "sh", "t", "th",
    "v", "y", "z",
];
const VOWELS: &[&str] = &["a", "aa", "e", "i", "ii", "o", "u", "ai", "au"];

fn pseudo_word(rng: &mut Rng) -> String {
    let syllables = 2 + rng.next_below(2);
    let mut word = String::new();
    for _ in 0..syllables {
        word.push_str(CONSONANTS[rng.next_below(CONSONANTS.len())]);
        word.push_str(VOWELS[rng.next_below(VOWELS.len())]);
    }
    word
}

fn unique_words(count: usize, rng: &mut Rng, taken: &mut std::collections::HashSet<String>) -> Vec<String> {
    let mut words = Vec::with_capacity(count);
    while words.len() < count {
        let w = pseudo_word(rng);
        if taken.insert(w.clone()) {
            words.push(w);
        }
    }
    words
}

struct Lexicon {
    cue_pos: Vec<String>,
    cue_neg: Vec<String>,
    pools: [Vec<String>; 3],
    shared: Vec<String>,
    negators: Vec<String>,
}

fn lexicon(rng: &mut Rng) -> Lexicon {
    let mut taken = std::collections::HashSet::new();
    for reserved in ["nahi", "na", "mat"] {
        taken.insert(reserved.to_string());
    }
    Lexicon {
        cue_pos: unique_words(20, rng, &mut taken),
        cue_neg: unique_words(20, rng, &mut taken),
        pools: [
            unique_words(25, rng, &mut taken),
            unique_words(25, rng, &mut taken),
            unique_words(25, rng, &mut taken),
        ],
        shared: unique_words(150, rng, &mut taken),
        negators: vec!["nahi".into(), "na".into(), "mat".into()],
    }
}

fn make_tweet(id: usize, class: usize, lex: &Lexicon, rng: &mut Rng) -> LabeledTweet {
    let mut tokens: Vec<String> = Vec::new();
    let filler_len = 8 + rng.next_below(9);
    for _ in 0..filler_len {
        if rng.next_f64() < 0.85 {
            tokens.push(lex.shared[rng.next_below(lex.shared.len())].clone());
        } else {
            tokens.push(lex.pools[class][rng.next_below(lex.pools[class].len())].clone());
        }
    }

    match class {
        0 | 1 => {
            let positive = class == 0;
            // Half the tweets carry a cue of the opposite polarity
            // flipped by an immediately preceding negation token; the
            // other half carry a plain cue of their own polarity plus,
            // usually, a stray negation token elsewhere in the tweet.
            // The token multisets end up nearly label-balanced, so only
            // the negator-cue adjacency resolves the sentiment.
            let negator = lex.negators[rng.next_below(lex.negators.len())].clone();
            if rng.next_f64() < 0.5 {
                let opposite = if positive { &lex.cue_neg } else { &lex.cue_pos };
                let cue = opposite[rng.next_below(opposite.len())].clone();
                let at = rng.next_below(tokens.len() + 1);
                tokens.insert(at, cue);
                tokens.insert(at, negator);
            } else {
                let own = if positive { &lex.cue_pos } else { &lex.cue_neg };
                let cue = own[rng.next_below(own.len())].clone();
                let at = rng.next_below(tokens.len() + 1);
                tokens.insert(at, cue);
                if rng.next_f64() < 0.9 {
                    // Keep the stray negator at least two positions from
                    // the cue so it cannot read as a flip.
                    let cue_pos = at + 1;
                    let mut spot = rng.next_below(tokens.len() + 1);
                    let mut guard = 0;
                    while spot.abs_diff(cue_pos) <= 1 && guard < 8 {
                        spot = rng.next_below(tokens.len() + 1);
                        guard += 1;
                    }
                    if spot.abs_diff(cue_pos) > 1 {
                        tokens.insert(spot, negator);
                    }
                }
            }
        }
        _ => {
            // Neutral: no cues; negation tokens show up as noise at a
            // rate comparable to the other classes.
            if rng.next_f64() < 0.4 {
                let at = rng.next_below(tokens.len() + 1);
                tokens.insert(at, lex.negators[rng.next_below(lex.negators.len())].clone());
            }
        }
    }

    let label = [
        SentimentLabel::Positive,
        SentimentLabel::Negative,
        SentimentLabel::Neutral,
    ][class];
    LabeledTweet::new(id.to_string(), tokens).with_label(label)
}

/// Build balanced labeled train/validation corpora.
pub fn generate_task(train_n: usize, val_n: usize, seed: u64) -> (Corpus, Corpus) {
    let mut rng = Rng::new(seed);
    let lex = lexicon(&mut rng);
    let train: Vec<LabeledTweet> = (0..train_n)
        .map(|i| make_tweet(i, i % 3, &lex, &mut rng))
        .collect();
    let validation: Vec<LabeledTweet> = (0..val_n)
        .map(|i| make_tweet(1_000_000 + i, i % 3, &lex, &mut rng))
        .collect();
    (
        Corpus::new(train, Split::Train).unwrap(),
        Corpus::new(validation, Split::Validation).unwrap(),
    )
}
