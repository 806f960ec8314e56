use std::path::Path;

use serde::{Deserialize, Serialize};

use super::dataset::LabeledDataset;
use super::{Gbdt, GbdtParams, IntentLabel, MaxEnt, MaxEntParams, NaiveBayes};
use crate::error::read_to_string;
use crate::text::{FeatureLayout, FeatureVector};
use crate::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassifierKind {
    NaiveBayes,
    MaxEnt,
    Gbdt,
}

impl ClassifierKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "NB",
            ClassifierKind::MaxEnt => "ME",
            ClassifierKind::Gbdt => "GBDT",
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nb" | "naive-bayes" | "naivebayes" => Ok(ClassifierKind::NaiveBayes),
            "me" | "maxent" | "max-ent" => Ok(ClassifierKind::MaxEnt),
            "gbdt" => Ok(ClassifierKind::Gbdt),
            _ => Err(Error::Input(format!("unknown classifier '{s}'"))),
        }
    }
}

/// Learner choice together with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TrainerSpec {
    NaiveBayes { alpha: f64 },
    MaxEnt(MaxEntParams),
    Gbdt(GbdtParams),
}

impl TrainerSpec {
    pub fn default_for(kind: ClassifierKind) -> Self {
        match kind {
            ClassifierKind::NaiveBayes => TrainerSpec::NaiveBayes { alpha: 1.0 },
            ClassifierKind::MaxEnt => TrainerSpec::MaxEnt(MaxEntParams::default()),
            ClassifierKind::Gbdt => TrainerSpec::Gbdt(GbdtParams::default()),
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            TrainerSpec::NaiveBayes { .. } => ClassifierKind::NaiveBayes,
            TrainerSpec::MaxEnt(_) => ClassifierKind::MaxEnt,
            TrainerSpec::Gbdt(_) => ClassifierKind::Gbdt,
        }
    }

    pub fn train(&self, data: &LabeledDataset) -> Result<ClassifierModel> {
        let matrix = data.matrix();
        let params = match *self {
            TrainerSpec::NaiveBayes { alpha } => {
                ModelParams::NaiveBayes(NaiveBayes::fit(&matrix, alpha)?)
            }
            TrainerSpec::MaxEnt(p) => ModelParams::MaxEnt(MaxEnt::fit(&matrix, p)?),
            TrainerSpec::Gbdt(p) => ModelParams::Gbdt(Gbdt::fit(&matrix, p)?),
        };
        Ok(ClassifierModel {
            format_version: MODEL_FORMAT_VERSION,
            label_order: data.label_order().to_vec(),
            layout: data.layout(),
            params,
        })
    }
}

pub fn train_naive_bayes(data: &LabeledDataset, alpha: f64) -> Result<ClassifierModel> {
    TrainerSpec::NaiveBayes { alpha }.train(data)
}

pub fn train_maxent(
    data: &LabeledDataset,
    l2: f64,
    epochs: usize,
    lr: f64,
) -> Result<ClassifierModel> {
    TrainerSpec::MaxEnt(MaxEntParams { l2, epochs, lr }).train(data)
}

pub fn train_gbdt(
    data: &LabeledDataset,
    rounds: usize,
    depth: usize,
    lr: f64,
) -> Result<ClassifierModel> {
    TrainerSpec::Gbdt(GbdtParams { rounds, depth, lr }).train(data)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    NaiveBayes(NaiveBayes),
    MaxEnt(MaxEnt),
    Gbdt(Gbdt),
}

/// A trained general intent classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub format_version: u32,
    pub label_order: Vec<IntentLabel>,
    pub layout: FeatureLayout,
    pub params: ModelParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: IntentLabel,
    pub score: f64,
    pub scores: Vec<(IntentLabel, f64)>,
}

impl ClassifierModel {
    pub fn kind(&self) -> ClassifierKind {
        match self.params {
            ModelParams::NaiveBayes(_) => ClassifierKind::NaiveBayes,
            ModelParams::MaxEnt(_) => ClassifierKind::MaxEnt,
            ModelParams::Gbdt(_) => ClassifierKind::Gbdt,
        }
    }

    pub fn width(&self) -> usize {
        self.layout.width()
    }

    /// One score per entry of `label_order`, summing to one.
    pub fn predict_scores(&self, fv: &FeatureVector) -> Result<Vec<f64>> {
        if fv.width() != self.width() {
            return Err(Error::Dimension {
                expected: self.width(),
                found: fv.width(),
            });
        }
        let row = fv.nonzeros();
        Ok(match &self.params {
            ModelParams::NaiveBayes(m) => m.predict_scores(&row),
            ModelParams::MaxEnt(m) => m.predict_scores(&row),
            ModelParams::Gbdt(m) => m.predict_scores(&row),
        })
    }

    /// Argmax label; ties go to the earlier label in `label_order`.
    pub fn predict(&self, fv: &FeatureVector) -> Result<Prediction> {
        let scores = self.predict_scores(fv)?;
        Ok(self.decide(&scores))
    }

    pub fn decide(&self, scores: &[f64]) -> Prediction {
        let mut best = 0;
        for (i, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = i;
            }
        }
        Prediction {
            label: self.label_order[best],
            score: scores[best],
            scores: self
                .label_order
                .iter()
                .copied()
                .zip(scores.iter().copied())
                .collect(),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self)?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let model: Self = serde_json::from_str(&read_to_string(path)?)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "{} has model format {}, expected {MODEL_FORMAT_VERSION}",
                path.display(),
                model.format_version
            )));
        }
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intent::LabeledExample;
    use crate::text::SparseVector;

    fn example(label: IntentLabel, x: f64) -> LabeledExample {
        LabeledExample {
            features: FeatureVector {
                lexical: SparseVector {
                    dim: 1,
                    entries: if x == 0.0 { vec![] } else { vec![(0, x)] },
                },
                semantic: vec![0.0],
                syntactic: vec![],
            },
            label,
            text: String::new(),
        }
    }

    fn dataset() -> LabeledDataset {
        LabeledDataset::new(vec![
            example(IntentLabel::Music, 1.0),
            example(IntentLabel::News, 0.0),
            example(IntentLabel::News, 0.0),
        ])
        .unwrap()
    }

    #[test]
    fn ties_go_to_earlier_label() {
        let model = train_naive_bayes(&dataset(), 1.0).unwrap();
        let p = model.decide(&[0.5, 0.5]);
        assert_eq!(p.label, model.label_order[0]);
        assert_eq!(model.decide(&[0.7, 0.3]).label, model.label_order[0]);
    }

    #[test]
    fn nb_zero_features_pick_prior_argmax() {
        let model = train_naive_bayes(&dataset(), 1.0).unwrap();
        assert_eq!(
            model
                .predict(&example(IntentLabel::News, 0.0).features)
                .unwrap()
                .label,
            IntentLabel::News
        );
    }

    #[test]
    fn width_mismatch_is_dimension_error() {
        let model = train_naive_bayes(&dataset(), 1.0).unwrap();
        let mut fv = example(IntentLabel::News, 0.0).features;
        fv.semantic.push(0.0);
        assert!(matches!(model.predict(&fv), Err(Error::Dimension { .. })));
    }

    #[test]
    fn all_learners_sum_to_one_and_round_trip() {
        let data = dataset();
        for kind in [
            ClassifierKind::NaiveBayes,
            ClassifierKind::MaxEnt,
            ClassifierKind::Gbdt,
        ] {
            let model = TrainerSpec::default_for(kind).train(&data).unwrap();
            for ex in data.examples() {
                let s = model.predict_scores(&ex.features).unwrap();
                assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-6);
                assert!(s.iter().all(|v| *v >= 0.0));
            }
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("m.json");
            model.save(&path).unwrap();
            assert_eq!(ClassifierModel::load(&path).unwrap(), model);
        }
    }

    #[test]
    fn missing_class_in_label_order_fails_training() {
        let data = LabeledDataset::with_label_order(
            vec![example(IntentLabel::Music, 1.0)],
            vec![IntentLabel::Music, IntentLabel::Food],
        )
        .unwrap();
        assert!(matches!(
            train_naive_bayes(&data, 1.0),
            Err(Error::Training(_))
        ));
    }
}
