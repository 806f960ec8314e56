use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::EntityLinker;
use crate::intent::{ClassifierModel, EvalReport, IntentLabel, LabeledText};
use crate::text::{tokenize, FeatureModels};
use crate::Result;

/// General-only versus two-level accuracy on one labeled set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalReport {
    pub before: EvalReport,
    pub after: EvalReport,
    /// Utterances with at least one gazetteer mention.
    pub entity_examples: usize,
    pub entity_accuracy_before: f64,
    pub entity_accuracy_after: f64,
}

impl HierarchicalReport {
    pub fn render(&self, title: &str) -> String {
        let mut out = EvalReport::render_comparison(&self.before, &self.after, title);
        let _ = writeln!(
            out,
            "Entity-bearing utterances: {} (accuracy {:.3} -> {:.3})",
            self.entity_examples, self.entity_accuracy_before, self.entity_accuracy_after
        );
        out
    }
}

pub fn evaluate_hierarchical(
    linker: &EntityLinker,
    model: &ClassifierModel,
    features: &FeatureModels,
    data: &[LabeledText],
) -> Result<HierarchicalReport> {
    let mut gold = Vec::with_capacity(data.len());
    let mut before = Vec::with_capacity(data.len());
    let mut after = Vec::with_capacity(data.len());
    let (mut entity_n, mut entity_before, mut entity_after) = (0usize, 0usize, 0usize);
    for example in data {
        let tokens = tokenize(&example.text);
        let prediction = model.predict(&features.featurize_tokens(&tokens))?;
        let decision = linker.decide(&prediction, &tokens);
        if !linker.gazetteer().detect_entities(&tokens).is_empty() {
            entity_n += 1;
            entity_before += usize::from(decision.general_label == example.label);
            entity_after += usize::from(decision.final_label == example.label);
        }
        gold.push(example.label);
        before.push(decision.general_label);
        after.push(decision.final_label);
    }
    let labels: Vec<IntentLabel> = model.label_order.clone();
    let ratio = |a: usize| {
        if entity_n == 0 {
            0.0
        } else {
            a as f64 / entity_n as f64
        }
    };
    Ok(HierarchicalReport {
        before: EvalReport::from_predictions(&labels, &gold, &before, 1),
        after: EvalReport::from_predictions(&labels, &gold, &after, 1),
        entity_examples: entity_n,
        entity_accuracy_before: ratio(entity_before),
        entity_accuracy_after: ratio(entity_after),
    })
}
