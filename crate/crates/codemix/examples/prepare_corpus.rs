//! Corpus preparation: Devanagari filtering and rule-based
//! tokenization of raw tweets.
//!
//! ```bash
//! cargo run -p codemix --example prepare_corpus
//! ```

use codemix::corpus::{filter_devanagari, tokenize};

fn main() {
    let raw = vec![
        "Main bahut khush hoon aaj! 😊 #blessed".to_string(),
        "मैं आज बहुत खुश हूँ".to_string(),
        "Kya scene hai @raj check http://example.com/x".to_string(),
        "yeh movie EKDUM bakwaas thi!!".to_string(),
    ];

    println!("{} raw tweets", raw.len());
    let kept = filter_devanagari(&raw);
    println!(
        "{} kept after dropping Devanagari-script tweets\n",
        kept.len()
    );

    for tweet in &kept {
        let tokens = tokenize(tweet);
        println!("  {tweet}");
        println!("  -> {tokens:?}\n");
    }
}
