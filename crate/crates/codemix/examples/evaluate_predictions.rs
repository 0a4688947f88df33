//! Metrics walkthrough: confusion matrix, per-class and macro scores,
//! and the comparison table with its baseline row.
//!
//! ```bash
//! cargo run -p codemix --example evaluate_predictions
//! ```

use codemix::corpus::SentimentLabel::{Negative, Neutral, Positive};
use codemix::evaluation::{confusion, evaluate, macro_metrics, report_csv, report_table};

fn main() {
    let golds = [Positive, Positive, Negative, Neutral, Negative, Neutral];
    let preds = [Positive, Negative, Negative, Neutral, Positive, Neutral];

    let matrix = confusion(&golds, &preds).unwrap();
    println!("confusion (rows = gold, columns = predicted):");
    for gold in codemix::corpus::SentimentLabel::ALL {
        let row: Vec<u64> = codemix::corpus::SentimentLabel::ALL
            .iter()
            .map(|&pred| matrix.get(gold, pred))
            .collect();
        println!("  {:<9} {row:?}", gold.as_str());
    }

    let report = macro_metrics(&matrix);
    println!("\nper-class F1:");
    for (label, class) in codemix::corpus::SentimentLabel::ALL.iter().zip(&report.per_class) {
        println!(
            "  {:<9} precision {:.3} recall {:.3} F1 {:.3}",
            label.as_str(),
            class.precision,
            class.recall,
            class.f1
        );
    }
    println!(
        "macro: precision {:.4} recall {:.4} F1 {:.4}",
        report.macro_precision, report.macro_recall, report.macro_f1
    );

    // A second system for the comparison table.
    let lazy = [Positive; 6];
    let lazy_report = evaluate(&golds, &lazy).unwrap();
    let results = vec![
        ("model".to_string(), report),
        ("always-positive".to_string(), lazy_report),
    ];
    println!("\n{}", report_table(&results));
    println!("{}", report_csv(&results));
}
