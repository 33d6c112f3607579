//! Evaluation metrics: confusion matrices, per-class precision/recall/F1,
//! macro-averaged F1, accuracy, and constant-prediction baselines.
//!
//! The confusion matrix is the sole input to every reported quantity.
//! Zero denominators yield a metric of 0, which is what makes the
//! one-class baseline rows come out the way shared-task organizers
//! report them.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Integer counts of gold x predicted labels.
///
/// Rows are gold classes, columns predicted classes, both in the order
/// given by `labels`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(labels: &[&str], counts: Vec<Vec<u64>>) -> Self {
        assert_eq!(labels.len(), counts.len());
        for row in &counts {
            assert_eq!(labels.len(), row.len());
        }
        ConfusionMatrix {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            counts,
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Plain-text rendering with row/column headers.
    pub fn render(&self) -> String {
        let width = self
            .counts
            .iter()
            .flatten()
            .map(|c| c.to_string().len())
            .chain(self.labels.iter().map(|l| l.len()))
            .max()
            .unwrap_or(1)
            .max(4);
        let mut out = String::new();
        let _ = write!(out, "{:>width$} |", "g\\p", width = width);
        for label in &self.labels {
            let _ = write!(out, " {:>width$}", label, width = width);
        }
        out.push('\n');
        let _ = writeln!(out, "{}", "-".repeat((width + 2) * (self.labels.len() + 1)));
        for (label, row) in self.labels.iter().zip(&self.counts) {
            let _ = write!(out, "{:>width$} |", label, width = width);
            for count in row {
                let _ = write!(out, " {:>width$}", count, width = width);
            }
            out.push('\n');
        }
        out
    }
}

/// Precision, recall and F1 for one class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Everything reported for one evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub labels: Vec<String>,
    pub per_class: Vec<ClassMetrics>,
    pub macro_f1: f64,
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
}

/// Round half away from zero to four decimals, the convention used by
/// the reported tables.
pub fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

impl MetricsReport {
    /// Copy of the report with every metric rounded to four decimals.
    pub fn rounded(&self) -> MetricsReport {
        MetricsReport {
            labels: self.labels.clone(),
            per_class: self
                .per_class
                .iter()
                .map(|m| ClassMetrics {
                    precision: round4(m.precision),
                    recall: round4(m.recall),
                    f1: round4(m.f1),
                })
                .collect(),
            macro_f1: round4(self.macro_f1),
            accuracy: round4(self.accuracy),
            confusion: self.confusion.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.rounded())?)
    }
}

/// Count gold x predicted label pairs.
///
/// `labels` fixes both the class set and the row/column order of the
/// result. Gold and prediction lists must have equal length and contain
/// only labels from that set.
pub fn confusion(gold: &[&str], pred: &[&str], labels: &[&str]) -> Result<ConfusionMatrix> {
    if gold.len() != pred.len() {
        return Err(Error::SizeMismatch(format!(
            "{} gold labels vs {} predictions",
            gold.len(),
            pred.len()
        )));
    }
    let index_of = |label: &str| -> Result<usize> {
        labels
            .iter()
            .position(|l| *l == label)
            .ok_or_else(|| Error::LabelSetMismatch(format!("unexpected label {label:?}")))
    };
    let mut counts = vec![vec![0u64; labels.len()]; labels.len()];
    for (g, p) in gold.iter().zip(pred) {
        counts[index_of(g)?][index_of(p)?] += 1;
    }
    Ok(ConfusionMatrix::new(labels, counts))
}

/// Compute the full metrics report from a confusion matrix.
///
/// precision_c = diagonal / column sum, recall_c = diagonal / row sum,
/// F1 the harmonic mean; any zero denominator yields 0. Macro-F1 is the
/// unweighted mean of per-class F1; accuracy is trace / total.
pub fn report(cm: &ConfusionMatrix) -> Result<MetricsReport> {
    let n = cm.labels.len();
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyConfusion);
    }
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let mut per_class = Vec::with_capacity(n);
    let mut trace = 0u64;
    for c in 0..n {
        let diag = cm.counts[c][c];
        trace += diag;
        let col_sum: u64 = (0..n).map(|g| cm.counts[g][c]).sum();
        let row_sum: u64 = cm.counts[c].iter().sum();
        let precision = ratio(diag, col_sum);
        let recall = ratio(diag, row_sum);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        per_class.push(ClassMetrics {
            precision,
            recall,
            f1,
        });
    }
    let macro_f1 = per_class.iter().map(|m| m.f1).sum::<f64>() / n as f64;
    let accuracy = trace as f64 / total as f64;
    Ok(MetricsReport {
        labels: cm.labels.clone(),
        per_class,
        macro_f1,
        accuracy,
        confusion: cm.clone(),
    })
}

/// Metrics for predicting `constant` on every example of `gold`.
pub fn trivial_baseline(gold: &[&str], constant: &str, labels: &[&str]) -> Result<MetricsReport> {
    let pred = vec![constant; gold.len()];
    report(&confusion(gold, &pred, labels)?)
}

/// Read a `id,label` CSV file (header optional when it matches exactly).
pub fn read_label_csv(path: &Path) -> Result<Vec<(String, String)>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        if i == 0 && line == "id,label" {
            continue;
        }
        let (id, label) = line.split_once(',').ok_or_else(|| {
            Error::parse(path.display().to_string(), i + 1, "expected `id,label`")
        })?;
        out.push((id.to_string(), label.to_string()));
    }
    Ok(out)
}

/// Write a `id,label` CSV file with header.
pub fn write_label_csv(path: &Path, rows: &[(String, String)]) -> Result<()> {
    let mut text = String::from("id,label\n");
    for (id, label) in rows {
        let _ = writeln!(text, "{id},{label}");
    }
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 5e-5;

    fn assert_close(actual: f64, expected: f64) {
        assert!(
            (actual - expected).abs() <= TOL,
            "expected {expected}, got {actual}"
        );
    }

    #[test]
    fn confusion_counts_pairs() {
        let cm = confusion(&["NOT", "OFF"], &["NOT", "NOT"], &["NOT", "OFF"]).unwrap();
        assert_eq!(cm.counts, vec![vec![1, 0], vec![1, 0]]);
    }

    #[test]
    fn confusion_perfect_predictions_is_diagonal() {
        let gold = ["NOT", "OFF", "OFF", "NOT"];
        let cm = confusion(&gold, &gold, &["NOT", "OFF"]).unwrap();
        assert_eq!(cm.counts, vec![vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn confusion_rejects_length_mismatch() {
        assert!(confusion(&["NOT"], &[], &["NOT", "OFF"]).is_err());
    }

    #[test]
    fn confusion_rejects_unknown_label() {
        assert!(confusion(&["XXX"], &["NOT"], &["NOT", "OFF"]).is_err());
    }

    // Reference values match the published subtask A result table.
    #[test]
    fn report_subtask_a_table() {
        let cm = ConfusionMatrix::new(&["NOT", "OFF"], vec![vec![572, 48], vec![95, 145]]);
        let r = report(&cm).unwrap();
        assert_close(r.per_class[0].precision, 0.8576);
        assert_close(r.per_class[0].recall, 0.9226);
        assert_close(r.per_class[0].f1, 0.8889);
        assert_close(r.per_class[1].precision, 0.7513);
        assert_close(r.per_class[1].recall, 0.6042);
        assert_close(r.per_class[1].f1, 0.6697);
        assert_close(r.accuracy, 0.8337);
        assert_close(r.macro_f1, 0.7793);
    }

    #[test]
    fn report_subtask_b_table() {
        let cm = ConfusionMatrix::new(&["TIN", "UNT"], vec![vec![206, 7], vec![20, 7]]);
        let r = report(&cm).unwrap();
        assert_close(r.per_class[0].precision, 0.9115);
        assert_close(r.per_class[0].recall, 0.9671);
        assert_close(r.per_class[0].f1, 0.9385);
        assert_close(r.per_class[1].precision, 0.5000);
        assert_close(r.per_class[1].recall, 0.2593);
        assert_close(r.per_class[1].f1, 0.3415);
        assert_close(r.accuracy, 0.8875);
        assert_close(r.macro_f1, 0.6400);
    }

    #[test]
    fn report_diagonal_is_all_ones() {
        let cm = ConfusionMatrix::new(&["A", "B"], vec![vec![3, 0], vec![0, 7]]);
        let r = report(&cm).unwrap();
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.macro_f1, 1.0);
        for m in r.per_class {
            assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn report_rejects_empty_matrix() {
        let cm = ConfusionMatrix::new(&["A", "B"], vec![vec![0, 0], vec![0, 0]]);
        assert!(report(&cm).is_err());
    }

    fn gold_of(counts: &[(&'static str, usize)]) -> Vec<&'static str> {
        counts
            .iter()
            .flat_map(|(label, n)| std::iter::repeat_n(*label, *n))
            .collect()
    }

    #[test]
    fn trivial_baseline_all_not() {
        let gold = gold_of(&[("NOT", 620), ("OFF", 240)]);
        let r = trivial_baseline(&gold, "NOT", &["NOT", "OFF"]).unwrap();
        assert_close(r.macro_f1, 0.4189);
        assert_close(r.accuracy, 0.7209);
    }

    #[test]
    fn trivial_baseline_all_tin() {
        let gold = gold_of(&[("TIN", 213), ("UNT", 27)]);
        let r = trivial_baseline(&gold, "TIN", &["TIN", "UNT"]).unwrap();
        assert_close(r.macro_f1, 0.4702);
        assert_close(r.accuracy, 0.8875);
    }

    #[test]
    fn trivial_baseline_all_unt() {
        let gold = gold_of(&[("TIN", 213), ("UNT", 27)]);
        let r = trivial_baseline(&gold, "UNT", &["TIN", "UNT"]).unwrap();
        assert_close(r.macro_f1, 0.1011);
        assert_close(r.accuracy, 0.1125);
    }

    // Closed form for a constant-c predictor: recall_c = 1,
    // precision_c = prevalence, F1_c = 2*prev/(1+prev), other classes 0.
    #[test]
    fn trivial_baseline_closed_form() {
        for (n_a, n_b) in [(620usize, 240usize), (213, 27), (1, 9), (5, 5)] {
            let gold = gold_of(&[("A", 0), ("B", 0)])
                .into_iter()
                .chain(std::iter::repeat_n("A", n_a))
                .chain(std::iter::repeat_n("B", n_b))
                .collect::<Vec<_>>();
            let total = (n_a + n_b) as f64;
            let r = trivial_baseline(&gold, "A", &["A", "B"]).unwrap();
            let prev = n_a as f64 / total;
            assert!((r.per_class[0].recall - 1.0).abs() < 1e-12);
            assert!((r.per_class[0].precision - prev).abs() < 1e-12);
            assert!((r.per_class[0].f1 - 2.0 * prev / (1.0 + prev)).abs() < 1e-12);
            assert_eq!(r.per_class[1].f1, 0.0);
            assert!((r.accuracy - prev).abs() < 1e-12);
        }
    }

    #[test]
    fn round4_is_half_away_from_zero() {
        assert_eq!(round4(0.12345), 0.1235);
        assert_eq!(round4(0.12344), 0.1234);
        assert_eq!(round4(-0.12345), -0.1235);
        assert_eq!(round4(0.27907), 0.2791);
    }

    // Naive per-example counting oracle, independent of `report`.
    fn naive_metrics(gold: &[&str], pred: &[&str], labels: &[&str]) -> (Vec<ClassMetrics>, f64, f64) {
        let mut per_class = Vec::new();
        for label in labels {
            let tp = gold
                .iter()
                .zip(pred)
                .filter(|(g, p)| *g == label && *p == label)
                .count() as f64;
            let pred_c = pred.iter().filter(|p| *p == label).count() as f64;
            let gold_c = gold.iter().filter(|g| *g == label).count() as f64;
            let precision = if pred_c == 0.0 { 0.0 } else { tp / pred_c };
            let recall = if gold_c == 0.0 { 0.0 } else { tp / gold_c };
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            per_class.push(ClassMetrics {
                precision,
                recall,
                f1,
            });
        }
        let macro_f1 = per_class.iter().map(|m| m.f1).sum::<f64>() / labels.len() as f64;
        let correct = gold.iter().zip(pred).filter(|(g, p)| g == p).count() as f64;
        (per_class, macro_f1, correct / gold.len() as f64)
    }

    #[test]
    fn report_matches_naive_oracle_on_random_lists() {
        use rand::prelude::*;
        let labels = ["NOT", "OFF"];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.gen_range(1..=20);
            let gold: Vec<&str> = (0..n).map(|_| labels[rng.gen_range(0..2)]).collect();
            let pred: Vec<&str> = (0..n).map(|_| labels[rng.gen_range(0..2)]).collect();
            let r = report(&confusion(&gold, &pred, &labels).unwrap()).unwrap();
            let (naive_pc, naive_macro, naive_acc) = naive_metrics(&gold, &pred, &labels);
            for (a, b) in r.per_class.iter().zip(&naive_pc) {
                assert_eq!(a, b);
            }
            assert_eq!(r.macro_f1, naive_macro);
            assert_eq!(r.accuracy, naive_acc);
            assert!(r.accuracy >= 0.0 && r.accuracy <= 1.0);
            let max_f1 = r.per_class.iter().map(|m| m.f1).fold(0.0, f64::max);
            assert!(r.macro_f1 <= max_f1 + 1e-12);
        }
    }

    #[test]
    fn metrics_are_order_invariant() {
        let gold = ["NOT", "OFF", "OFF", "NOT", "OFF"];
        let pred = ["OFF", "OFF", "NOT", "NOT", "OFF"];
        let r1 = report(&confusion(&gold, &pred, &["NOT", "OFF"]).unwrap()).unwrap();
        let perm = [4usize, 2, 0, 3, 1];
        let gold_p: Vec<&str> = perm.iter().map(|&i| gold[i]).collect();
        let pred_p: Vec<&str> = perm.iter().map(|&i| pred[i]).collect();
        let r2 = report(&confusion(&gold_p, &pred_p, &["NOT", "OFF"]).unwrap()).unwrap();
        assert_eq!(r1.macro_f1, r2.macro_f1);
        assert_eq!(r1.accuracy, r2.accuracy);
        assert_eq!(r1.per_class, r2.per_class);
    }

    #[test]
    fn render_contains_all_counts() {
        let cm = ConfusionMatrix::new(&["NOT", "OFF"], vec![vec![572, 48], vec![95, 145]]);
        let text = cm.render();
        for needle in ["572", "48", "95", "145", "NOT", "OFF"] {
            assert!(text.contains(needle), "missing {needle} in:\n{text}");
        }
    }

    #[test]
    fn label_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("preds.csv");
        let rows = vec![
            ("1".to_string(), "NOT".to_string()),
            ("2".to_string(), "OFF".to_string()),
        ];
        write_label_csv(&path, &rows).unwrap();
        assert_eq!(read_label_csv(&path).unwrap(), rows);
    }
}
