use std::collections::BTreeMap;
use std::path::Path;

use super::IntentLabel;
use crate::error::{data_lines, read_to_string};
use crate::text::{FeatureLayout, FeatureModels, FeatureVector};
use crate::{Error, Result};

/// A raw labeled utterance as read from a `label<TAB>text` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledText {
    pub label: IntentLabel,
    pub text: String,
}

/// Reads a labeled utterance file. Blank lines and `#` comments are skipped.
pub fn load_labeled_texts(path: &Path) -> Result<Vec<LabeledText>> {
    parse_labeled_texts(&read_to_string(path)?, path)
}

pub fn parse_labeled_texts(contents: &str, origin: &Path) -> Result<Vec<LabeledText>> {
    data_lines(contents)
        .map(|(line_no, line)| {
            let (label, text) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(origin, line_no, "expected 'label<TAB>text'"))?;
            let label = label
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(origin, line_no, e.to_string()))?;
            let text = text.trim();
            if text.is_empty() {
                return Err(Error::parse(origin, line_no, "empty utterance"));
            }
            Ok(LabeledText {
                label,
                text: text.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct LabeledExample {
    pub features: FeatureVector,
    pub label: IntentLabel,
    pub text: String,
}

/// Featurized examples plus the label order the classifiers will use.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    examples: Vec<LabeledExample>,
    label_order: Vec<IntentLabel>,
    layout: FeatureLayout,
}

impl LabeledDataset {
    /// The label order defaults to the labels present, in canonical order.
    pub fn new(examples: Vec<LabeledExample>) -> Result<Self> {
        let mut present: Vec<IntentLabel> = examples.iter().map(|e| e.label).collect();
        present.sort();
        present.dedup();
        Self::with_label_order(examples, present)
    }

    pub fn with_label_order(
        examples: Vec<LabeledExample>,
        label_order: Vec<IntentLabel>,
    ) -> Result<Self> {
        let Some(first) = examples.first() else {
            return Err(Error::Config("dataset has no examples".into()));
        };
        let layout = first.features.layout();
        for e in &examples {
            if e.features.layout() != layout {
                return Err(Error::Dimension {
                    expected: layout.width(),
                    found: e.features.width(),
                });
            }
            if !label_order.contains(&e.label) {
                return Err(Error::Config(format!(
                    "example label {} missing from label order",
                    e.label
                )));
            }
        }
        Ok(Self {
            examples,
            label_order,
            layout,
        })
    }

    pub fn featurize(models: &FeatureModels, texts: &[LabeledText]) -> Result<Self> {
        Self::new(
            texts
                .iter()
                .map(|t| LabeledExample {
                    features: models.featurize_text(&t.text),
                    label: t.label,
                    text: t.text.clone(),
                })
                .collect(),
        )
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn label_order(&self) -> &[IntentLabel] {
        &self.label_order
    }

    pub fn layout(&self) -> FeatureLayout {
        self.layout
    }

    pub fn class_counts(&self) -> BTreeMap<IntentLabel, usize> {
        let mut counts: BTreeMap<IntentLabel, usize> =
            self.label_order.iter().map(|l| (*l, 0)).collect();
        for e in &self.examples {
            *counts.entry(e.label).or_default() += 1;
        }
        counts
    }

    /// Subset by example index, keeping the label order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::with_label_order(
            indices.iter().map(|&i| self.examples[i].clone()).collect(),
            self.label_order.clone(),
        )
    }

    pub fn matrix(&self) -> TrainingMatrix {
        TrainingMatrix {
            width: self.layout.width(),
            classes: self.label_order.len(),
            rows: self
                .examples
                .iter()
                .map(|e| e.features.nonzeros())
                .collect(),
            labels: self
                .examples
                .iter()
                .map(|e| {
                    self.label_order
                        .iter()
                        .position(|l| *l == e.label)
                        .unwrap_or(0)
                })
                .collect(),
        }
    }
}

/// Learner input: sparse rows with class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingMatrix {
    pub width: usize,
    pub classes: usize,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub labels: Vec<usize>,
}

impl TrainingMatrix {
    pub fn from_dense(rows: &[Vec<f64>], labels: Vec<usize>, classes: usize) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.len() != labels.len() {
            return Err(Error::Input("row and label counts differ".into()));
        }
        let mut sparse = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() != width {
                return Err(Error::Dimension {
                    expected: width,
                    found: r.len(),
                });
            }
            sparse.push(
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(i, v)| (i, *v))
                    .collect(),
            );
        }
        let m = Self {
            width,
            classes,
            rows: sparse,
            labels,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    /// Checks shape, label range, finiteness, and that every class has at
    /// least one example.
    pub fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::Training("no training examples".into()));
        }
        if self.classes == 0 {
            return Err(Error::Training("no classes".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                if c >= self.width {
                    return Err(Error::Dimension {
                        expected: self.width,
                        found: c + 1,
                    });
                }
                if !v.is_finite() {
                    return Err(Error::Training(format!(
                        "non-finite value in row {i}, column {c}"
                    )));
                }
            }
            if self.labels[i] >= self.classes {
                return Err(Error::Training(format!("row {i} has label out of range")));
            }
        }
        if let Some(missing) = self.class_counts().iter().position(|&n| n == 0) {
            return Err(Error::Training(format!("class {missing} has no examples")));
        }
        Ok(())
    }
}

/// Value of column `col` in a sparse row sorted by column.
pub(crate) fn sparse_value(row: &[(usize, f64)], col: usize) -> f64 {
    row.binary_search_by_key(&col, |(c, _)| *c)
        .map(|p| row[p].1)
        .unwrap_or(0.0)
}

/// Softmax that is exact for all-equal inputs and safe for large values.
pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}
