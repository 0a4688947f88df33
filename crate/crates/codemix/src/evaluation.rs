//! Per-class and macro-averaged precision/recall/F1, plus report rendering.

use std::fmt::Write as _;

use crate::corpus::SentimentLabel;
use crate::error::{Error, Result};

/// Macro F1 of the shared-task majority baseline, included in reports
/// for context.
pub const BASELINE_MACRO_F1: f64 = 0.654;

/// 3x3 count matrix; rows are gold labels, columns are predictions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    counts: [[u64; 3]; 3],
}

impl ConfusionMatrix {
    pub fn zero() -> ConfusionMatrix {
        ConfusionMatrix {
            counts: [[0; 3]; 3],
        }
    }

    pub fn record(&mut self, gold: SentimentLabel, pred: SentimentLabel) {
        self.counts[gold.index()][pred.index()] += 1;
    }

    pub fn get(&self, gold: SentimentLabel, pred: SentimentLabel) -> u64 {
        self.counts[gold.index()][pred.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// Build a confusion matrix from parallel gold/prediction lists.
pub fn confusion(golds: &[SentimentLabel], preds: &[SentimentLabel]) -> Result<ConfusionMatrix> {
    if golds.len() != preds.len() {
        return Err(Error::LengthMismatch {
            left: golds.len(),
            right: preds.len(),
        });
    }
    let mut matrix = ConfusionMatrix::zero();
    for (&g, &p) in golds.iter().zip(preds) {
        matrix.record(g, p);
    }
    Ok(matrix)
}

/// Precision/recall/F1 for one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Per-class and macro-averaged metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub per_class: [ClassMetrics; 3],
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub total: u64,
}

/// Compute macro-averaged metrics from a confusion matrix.
///
/// Zero denominators yield 0 for the affected metric; F1 is 0 when both
/// precision and recall are 0. Macro values are unweighted means of the
/// per-class values.
pub fn macro_metrics(matrix: &ConfusionMatrix) -> MetricsReport {
    let mut per_class = [ClassMetrics {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    }; 3];

    for (c, slot) in per_class.iter_mut().enumerate() {
        let label = SentimentLabel::from_index(c).unwrap();
        let tp = matrix.get(label, label) as f64;
        let mut fp = 0.0;
        let mut fn_ = 0.0;
        for other in SentimentLabel::ALL {
            if other != label {
                fp += matrix.get(other, label) as f64;
                fn_ += matrix.get(label, other) as f64;
            }
        }
        let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        let recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        *slot = ClassMetrics {
            precision,
            recall,
            f1,
        };
    }

    MetricsReport {
        per_class,
        macro_precision: per_class.iter().map(|m| m.precision).sum::<f64>() / 3.0,
        macro_recall: per_class.iter().map(|m| m.recall).sum::<f64>() / 3.0,
        macro_f1: per_class.iter().map(|m| m.f1).sum::<f64>() / 3.0,
        total: matrix.total(),
    }
}

/// Convenience: confusion + macro metrics in one call.
pub fn evaluate(golds: &[SentimentLabel], preds: &[SentimentLabel]) -> Result<MetricsReport> {
    Ok(macro_metrics(&confusion(golds, preds)?))
}

/// Plain-text comparison table. One row per system, the task baseline
/// row first, metrics at four decimal places.
pub fn report_table(results: &[(String, MetricsReport)]) -> String {
    let name_width = results
        .iter()
        .map(|(name, _)| name.len())
        .chain(["system".len(), "baseline".len()])
        .max()
        .unwrap();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_width$}  {:>9}  {:>9}  {:>9}",
        "system", "precision", "recall", "macro_f1"
    );
    let _ = writeln!(
        out,
        "{:<name_width$}  {:>9}  {:>9}  {:>9.4}",
        "baseline", "-", "-", BASELINE_MACRO_F1
    );
    for (name, report) in results {
        let _ = writeln!(
            out,
            "{:<name_width$}  {:>9.4}  {:>9.4}  {:>9.4}",
            name, report.macro_precision, report.macro_recall, report.macro_f1
        );
    }
    out
}

/// Comma-separated variant of [`report_table`], same row order and
/// column order: system, precision, recall, macro_f1.
pub fn report_csv(results: &[(String, MetricsReport)]) -> String {
    let mut out = String::from("system,precision,recall,macro_f1\n");
    let _ = writeln!(out, "baseline,,,{BASELINE_MACRO_F1:.4}");
    for (name, report) in results {
        let _ = writeln!(
            out,
            "{},{:.4},{:.4},{:.4}",
            name, report.macro_precision, report.macro_recall, report.macro_f1
        );
    }
    out
}
