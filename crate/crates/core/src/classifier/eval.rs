use std::fmt::Write;

use serde::Serialize;

use super::{LabeledDataset, Model};
use crate::error::{Error, Result};
use crate::ObjectClass;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub class: ObjectClass,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// `confusion[truth][predicted]`, in class order.
    pub confusion: [[usize; 4]; 4],
    /// Classes that occur in the truth or the predictions.
    pub per_class: Vec<ClassMetrics>,
    pub macro_f1: f64,
}

pub fn evaluate(model: &Model, set: &LabeledDataset) -> Result<EvaluationReport> {
    if set.is_empty() {
        return Err(Error::Dataset("cannot evaluate on an empty set".into()));
    }
    let truth: Vec<ObjectClass> = set.samples.iter().map(|s| s.label).collect();
    let predicted: Vec<ObjectClass> = set
        .samples
        .iter()
        .map(|s| model.predict(&s.features).class)
        .collect();
    Ok(evaluate_predictions(&truth, &predicted))
}

pub fn evaluate_predictions(truth: &[ObjectClass], predicted: &[ObjectClass]) -> EvaluationReport {
    assert_eq!(truth.len(), predicted.len(), "one prediction per sample");
    let mut confusion = [[0usize; 4]; 4];
    for (t, p) in truth.iter().zip(predicted) {
        confusion[t.index()][p.index()] += 1;
    }
    let total = truth.len();
    let correct: usize = (0..4).map(|k| confusion[k][k]).sum();

    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let per_class: Vec<ClassMetrics> = ObjectClass::ALL
        .into_iter()
        .filter_map(|c| {
            let k = c.index();
            let support: usize = confusion[k].iter().sum();
            let predicted_k: usize = (0..4).map(|t| confusion[t][k]).sum();
            if support == 0 && predicted_k == 0 {
                return None;
            }
            let precision = ratio(confusion[k][k], predicted_k);
            let recall = ratio(confusion[k][k], support);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            Some(ClassMetrics {
                class: c,
                precision,
                recall,
                f1,
                support,
            })
        })
        .collect();
    let macro_f1 = if per_class.is_empty() {
        0.0
    } else {
        per_class.iter().map(|m| m.f1).sum::<f64>() / per_class.len() as f64
    };
    EvaluationReport {
        total,
        correct,
        accuracy: ratio(correct, total),
        confusion,
        per_class,
        macro_f1,
    }
}

/// One algorithm's line in the accuracy table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub algorithm: String,
    pub valid_accuracy: f64,
    pub test_accuracy: f64,
}

/// Aligned text table with `No.`, algorithm, validation and test accuracy.
pub fn render_table(rows: &[TableRow]) -> String {
    let name_w = rows
        .iter()
        .map(|r| r.algorithm.len())
        .chain(["Machine learning algorithm".len()])
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<4} {:<name_w$}  {:>14}  {:>13}",
        "No.", "Machine learning algorithm", "Valid accuracy", "Test accuracy"
    );
    for (i, r) in rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:<4} {:<name_w$}  {:>13.2}%  {:>12.2}%",
            i + 1,
            r.algorithm,
            r.valid_accuracy * 100.0,
            r.test_accuracy * 100.0
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ObjectClass::*;

    #[test]
    fn majority_guess_on_balanced_set() {
        let truth = [Wall, Wall, Door, Door];
        let r = evaluate_predictions(&truth, &[Wall; 4]);
        assert_eq!(r.accuracy, 0.5);
        let sum: usize = r.confusion.iter().flatten().sum();
        assert_eq!(sum, truth.len());
    }

    #[test]
    fn perfect_predictions() {
        let truth = [Wall, Floor, Window, Door, Wall];
        let r = evaluate_predictions(&truth, &truth);
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.macro_f1, 1.0);
        assert_eq!(r.per_class.len(), 4);
    }

    #[test]
    fn per_class_metrics() {
        let truth = [Wall, Wall, Wall, Window];
        let pred = [Wall, Wall, Window, Window];
        let r = evaluate_predictions(&truth, &pred);
        let wall = &r.per_class.iter().find(|m| m.class == Wall).unwrap();
        assert_eq!(wall.precision, 1.0);
        assert!((wall.recall - 2.0 / 3.0).abs() < 1e-15);
        let window = &r.per_class.iter().find(|m| m.class == Window).unwrap();
        assert_eq!(window.precision, 0.5);
        assert_eq!(window.recall, 1.0);
    }

    #[test]
    fn table_layout() {
        let t = render_table(&[TableRow {
            algorithm: "Random forest".into(),
            valid_accuracy: 1.0,
            test_accuracy: 0.9796,
        }]);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("No."));
        assert!(lines[1].contains("100.00%"));
        assert!(lines[1].contains("97.96%"));
    }
}
