use serde::{Deserialize, Serialize};

use super::{tokenize, EmbeddingTable, RuleSet, SparseVector, TermWeightModel};
use crate::{Error, Result};

/// One user utterance within a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub text: String,
    pub timestamp_ms: i64,
    pub turn_index: u32,
}

impl Utterance {
    pub fn new(text: impl Into<String>, timestamp_ms: i64, turn_index: u32) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::Input("utterance text is empty".into()));
        }
        Ok(Self {
            text,
            timestamp_ms,
            turn_index,
        })
    }
}

/// Widths of the three feature blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureLayout {
    pub lexical: usize,
    pub semantic: usize,
    pub syntactic: usize,
}

impl FeatureLayout {
    pub fn width(&self) -> usize {
        self.lexical + self.semantic + self.syntactic
    }

    pub fn semantic_range(&self) -> std::ops::Range<usize> {
        self.lexical..self.lexical + self.semantic
    }
}

/// Concatenated lexical ‖ semantic ‖ syntactic features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub lexical: SparseVector,
    pub semantic: Vec<f64>,
    pub syntactic: Vec<u8>,
}

impl FeatureVector {
    pub fn layout(&self) -> FeatureLayout {
        FeatureLayout {
            lexical: self.lexical.dim,
            semantic: self.semantic.len(),
            syntactic: self.syntactic.len(),
        }
    }

    pub fn width(&self) -> usize {
        self.layout().width()
    }

    /// Non-zero entries in global column order.
    pub fn nonzeros(&self) -> Vec<(usize, f64)> {
        let layout = self.layout();
        let mut out: Vec<(usize, f64)> = self
            .lexical
            .entries
            .iter()
            .copied()
            .filter(|(_, v)| *v != 0.0)
            .collect();
        out.extend(
            self.semantic
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (layout.lexical + i, *v)),
        );
        let offset = layout.lexical + layout.semantic;
        out.extend(
            self.syntactic
                .iter()
                .enumerate()
                .filter(|(_, f)| **f != 0)
                .map(|(i, f)| (offset + i, f64::from(*f))),
        );
        out
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.width()];
        for (i, v) in self.nonzeros() {
            out[i] = v;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.nonzeros().is_empty()
    }
}

/// The fitted sub-models that turn text into a [`FeatureVector`].
#[derive(Debug, Clone)]
pub struct FeatureModels {
    pub terms: TermWeightModel,
    pub embeddings: EmbeddingTable,
    pub rules: RuleSet,
}

impl FeatureModels {
    pub fn layout(&self) -> FeatureLayout {
        FeatureLayout {
            lexical: self.terms.len(),
            semantic: self.embeddings.dimension(),
            syntactic: self.rules.len(),
        }
    }

    pub fn featurize(&self, utterance: &Utterance) -> FeatureVector {
        self.featurize_text(&utterance.text)
    }

    pub fn featurize_text(&self, text: &str) -> FeatureVector {
        self.featurize_tokens(&tokenize(text))
    }

    pub fn featurize_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> FeatureVector {
        FeatureVector {
            lexical: self.terms.weigh(tokens),
            semantic: self.embeddings.embed_average(tokens),
            syntactic: self.rules.flags(tokens),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::PatternRule;

    fn models() -> FeatureModels {
        let corpus = vec![tokenize("how to cook rice"), tokenize("play some music")];
        let mut embeddings = EmbeddingTable::new(2).unwrap();
        embeddings.insert("cook", vec![1.0, -1.0]).unwrap();
        FeatureModels {
            terms: TermWeightModel::fit(&corpus).unwrap(),
            embeddings,
            rules: RuleSet::new(vec![
                PatternRule::new("cook", "how to cook X", 0).unwrap(),
                PatternRule::new("news", "news about X", 1).unwrap(),
            ])
            .unwrap(),
        }
    }

    #[test]
    fn empty_text_is_all_zero() {
        let fv = models().featurize_text("");
        assert!(fv.is_zero());
        assert_eq!(fv.to_dense(), vec![0.0; fv.width()]);
    }

    #[test]
    fn block_widths_follow_models() {
        let m = models();
        let fv = m.featurize_text("anything");
        assert_eq!(fv.layout(), m.layout());
        assert_eq!(fv.layout().lexical, 7);
        assert_eq!(fv.layout().semantic, 2);
        assert_eq!(fv.layout().syntactic, 2);
    }

    #[test]
    fn cook_sets_flag_and_lexical() {
        let m = models();
        let fv = m.featurize(&Utterance::new("How to cook rice", 0, 1).unwrap());
        assert_eq!(fv.syntactic, vec![1, 0]);
        assert!((fv.lexical.norm() - 1.0).abs() < 1e-9);
        assert_eq!(fv.semantic, vec![1.0, -1.0]);
        let dense = fv.to_dense();
        assert_eq!(dense[7..9], [1.0, -1.0]);
        assert_eq!(dense[9], 1.0);
    }

    #[test]
    fn deterministic_bits() {
        let m = models();
        let a = m.featurize_text("how to cook rice and music").to_dense();
        let b = m.featurize_text("how to cook rice and music").to_dense();
        assert_eq!(
            a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            b.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn blank_utterance_rejected() {
        assert!(Utterance::new("   ", 0, 1).is_err());
    }
}
