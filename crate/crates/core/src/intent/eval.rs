use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ClassifierModel, IntentGroup, IntentLabel, LabeledDataset};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: IntentLabel,
    /// One-vs-rest accuracy: (TP + TN) / N.
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Precision, recall and F1 from confusion counts; zero where undefined.
pub fn precision_recall_f1(tp: usize, fp: usize, fn_: usize) -> (f64, f64, f64) {
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let p = ratio(tp, tp + fp);
    let r = ratio(tp, tp + fn_);
    let f1 = if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    };
    (p, r, f1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub folds: usize,
    pub examples: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub per_class: Vec<ClassMetrics>,
}

impl EvalReport {
    /// Metrics from paired gold/predicted labels over `labels`.
    pub fn from_predictions(
        labels: &[IntentLabel],
        gold: &[IntentLabel],
        predicted: &[IntentLabel],
        folds: usize,
    ) -> Self {
        let n = gold.len();
        let per_class: Vec<ClassMetrics> = labels
            .iter()
            .map(|&label| {
                let (mut tp, mut fp, mut fn_) = (0, 0, 0);
                for (g, p) in gold.iter().zip(predicted) {
                    match (*g == label, *p == label) {
                        (true, true) => tp += 1,
                        (false, true) => fp += 1,
                        (true, false) => fn_ += 1,
                        (false, false) => {}
                    }
                }
                let (precision, recall, f1) = precision_recall_f1(tp, fp, fn_);
                let tn = n - tp - fp - fn_;
                ClassMetrics {
                    label,
                    accuracy: if n == 0 {
                        0.0
                    } else {
                        (tp + tn) as f64 / n as f64
                    },
                    precision,
                    recall,
                    f1,
                    support: tp + fn_,
                }
            })
            .collect();
        let correct = gold.iter().zip(predicted).filter(|(g, p)| g == p).count();
        Self {
            folds,
            examples: n,
            accuracy: if n == 0 {
                0.0
            } else {
                correct as f64 / n as f64
            },
            macro_f1: if per_class.is_empty() {
                0.0
            } else {
                per_class.iter().map(|m| m.f1).sum::<f64>() / per_class.len() as f64
            },
            per_class,
        }
    }

    pub fn metrics(&self, label: IntentLabel) -> Option<&ClassMetrics> {
        self.per_class.iter().find(|m| m.label == label)
    }

    /// Rows grouped S / IR / T with ACC and F1 columns.
    pub fn render_table(&self, title: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{title}");
        let _ = writeln!(
            out,
            "ACC is one-vs-rest accuracy per class; {} folds, {} examples",
            self.folds, self.examples
        );
        let _ = writeln!(out, "{:<22} {:>6} {:>6}", "Class Name", "ACC", "F1");
        render_groups(&mut out, &self.per_class, |m| {
            format!("{:>6.3} {:>6.3}", m.accuracy, m.f1)
        });
        let _ = writeln!(
            out,
            "{:<22} {:>6.3} {:>6.3}",
            "Overall / macro-F1", self.accuracy, self.macro_f1
        );
        out
    }

    /// Two reports side by side as Before / After columns.
    pub fn render_comparison(before: &EvalReport, after: &EvalReport, title: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{title}");
        let _ = writeln!(out, "{:<22} {:>13} {:>13}", "", "Before", "After");
        let _ = writeln!(
            out,
            "{:<22} {:>6} {:>6} {:>6} {:>6}",
            "Class Name", "ACC", "F1", "ACC", "F1"
        );
        render_groups(&mut out, &before.per_class, |m| {
            let a = after.metrics(m.label).copied().unwrap_or(*m);
            format!(
                "{:>6.3} {:>6.3} {:>6.3} {:>6.3}",
                m.accuracy, m.f1, a.accuracy, a.f1
            )
        });
        let _ = writeln!(
            out,
            "{:<22} {:>6.3} {:>6.3} {:>6.3} {:>6.3}",
            "Overall / macro-F1", before.accuracy, before.macro_f1, after.accuracy, after.macro_f1
        );
        out
    }
}

fn render_groups(out: &mut String, rows: &[ClassMetrics], cells: impl Fn(&ClassMetrics) -> String) {
    let groups = [
        IntentGroup::Sentiment,
        IntentGroup::InformationRetrieval,
        IntentGroup::Transitional,
    ];
    for group in groups {
        let members: Vec<&ClassMetrics> =
            rows.iter().filter(|m| m.label.group() == group).collect();
        if members.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{}", "-".repeat(50));
        for m in members {
            let name = format!("{} ({})", m.label.display_name(), group.abbreviation());
            let _ = writeln!(out, "{name:<22} {}", cells(m));
        }
    }
    let _ = writeln!(out, "{}", "-".repeat(50));
}

/// Stratified fold assignment: within each class, examples go round-robin
/// to folds in dataset order.
pub fn stratified_folds(data: &LabeledDataset, k: usize) -> Result<Vec<usize>> {
    if k < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {k}")));
    }
    let counts = data.class_counts();
    let small: Vec<String> = counts
        .iter()
        .filter(|(_, &n)| n < k)
        .map(|(l, n)| format!("{l} ({n})"))
        .collect();
    if !small.is_empty() {
        return Err(Error::Config(format!(
            "classes with fewer than {k} examples: {}",
            small.join(", ")
        )));
    }
    let mut seen = std::collections::HashMap::new();
    Ok(data
        .examples()
        .iter()
        .map(|e| {
            let i = seen.entry(e.label).or_insert(0usize);
            let fold = *i % k;
            *i += 1;
            fold
        })
        .collect())
}

/// k-fold stratified cross-validation with predictions pooled over folds.
/// Folds train concurrently.
pub fn cross_validate<F>(data: &LabeledDataset, k: usize, trainer: F) -> Result<EvalReport>
where
    F: Fn(&LabeledDataset) -> Result<ClassifierModel> + Sync,
{
    let fold_of = stratified_folds(data, k)?;
    let predictions: Vec<Result<Vec<(usize, IntentLabel)>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..k)
            .map(|fold| {
                let fold_of = &fold_of;
                let trainer = &trainer;
                scope.spawn(move || -> Result<Vec<(usize, IntentLabel)>> {
                    let (test, train): (Vec<usize>, Vec<usize>) =
                        (0..data.len()).partition(|&i| fold_of[i] == fold);
                    let model = trainer(&data.subset(&train)?)?;
                    test.into_iter()
                        .map(|i| Ok((i, model.predict(&data.examples()[i].features)?.label)))
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::Training("fold worker panicked".into())))
            })
            .collect()
    });
    let mut predicted = vec![None; data.len()];
    for fold in predictions {
        for (i, label) in fold? {
            predicted[i] = Some(label);
        }
    }
    let predicted: Vec<IntentLabel> = predicted
        .into_iter()
        .map(|p| p.ok_or_else(|| Error::Training("example missing from every fold".into())))
        .collect::<Result<_>>()?;
    let gold: Vec<IntentLabel> = data.examples().iter().map(|e| e.label).collect();
    Ok(EvalReport::from_predictions(
        data.label_order(),
        &gold,
        &predicted,
        k,
    ))
}
