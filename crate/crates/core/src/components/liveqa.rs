use std::path::Path;

use super::{Component, ComponentId, ComponentRequest, ComponentResponse, TOPIC_OFFER};
use crate::error::{data_lines, read_to_string};
use crate::text::{tokenize, SparseVector, TermWeightModel};
use crate::{Error, Result};

/// Minimum question similarity for an answer.
pub const DEFAULT_QA_THRESHOLD: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct QaPair {
    pub question: String,
    pub answer: String,
}

/// Answers factual questions from a bank of question/answer pairs by
/// nearest question.
pub struct LiveQaComponent {
    pairs: Vec<QaPair>,
    model: TermWeightModel,
    vectors: Vec<SparseVector>,
    threshold: f64,
}

impl LiveQaComponent {
    pub fn new(pairs: Vec<QaPair>, threshold: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Config("question bank is empty".into()));
        }
        let docs: Vec<Vec<String>> = pairs.iter().map(|p| tokenize(&p.question)).collect();
        let model = TermWeightModel::fit(&docs)?;
        let vectors = docs.iter().map(|d| model.weigh(d)).collect();
        Ok(Self {
            pairs,
            model,
            vectors,
            threshold,
        })
    }

    /// `question<TAB>answer` per line.
    pub fn load(path: &Path, threshold: f64) -> Result<Self> {
        let text = read_to_string(path)?;
        let pairs = data_lines(&text)
            .map(|(line, content)| {
                content
                    .split_once('\t')
                    .map(|(q, a)| QaPair {
                        question: q.trim().to_string(),
                        answer: a.trim().to_string(),
                    })
                    .ok_or_else(|| Error::parse(path, line, "expected question<TAB>answer"))
            })
            .collect::<Result<_>>()?;
        Self::new(pairs, threshold)
    }

    /// Best pair and its similarity; the earliest pair wins ties.
    pub fn best_match(&self, text: &str) -> Option<(&QaPair, f64)> {
        let query = self.model.weigh(&tokenize(text));
        let mut best: Option<(usize, f64)> = None;
        for (i, v) in self.vectors.iter().enumerate() {
            let sim = query.cosine(v);
            if best.is_none_or(|(_, b)| sim > b) {
                best = Some((i, sim));
            }
        }
        best.filter(|&(_, s)| s >= self.threshold && s > 0.0)
            .map(|(i, s)| (&self.pairs[i], s))
    }
}

impl Component for LiveQaComponent {
    fn id(&self) -> ComponentId {
        ComponentId::LiveQa
    }

    fn respond(&self, request: &ComponentRequest<'_>) -> ComponentResponse {
        match self.best_match(request.resolved_text) {
            Some((pair, _)) => ComponentResponse::say(pair.answer.clone()),
            None => ComponentResponse::offer(
                "I don't know the answer to that one.",
                TOPIC_OFFER,
                ComponentId::Transition,
                "offer_topics",
            ),
        }
    }
}
