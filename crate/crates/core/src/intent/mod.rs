//! General intent classification over the fourteen intent labels.

mod dataset;
mod eval;
mod gbdt;
mod label;
mod maxent;
mod model;
mod naive_bayes;
pub mod synthetic;

pub use dataset::{
    load_labeled_texts, parse_labeled_texts, LabeledDataset, LabeledExample, LabeledText,
    TrainingMatrix,
};
pub use eval::{cross_validate, precision_recall_f1, stratified_folds, ClassMetrics, EvalReport};
pub use gbdt::{Gbdt, GbdtParams, RegressionTree, TreeNode};
pub use label::{IntentGroup, IntentLabel};
pub use maxent::{MaxEnt, MaxEntParams};
pub use model::{
    train_gbdt, train_maxent, train_naive_bayes, ClassifierKind, ClassifierModel, ModelParams,
    Prediction, TrainerSpec, MODEL_FORMAT_VERSION,
};
pub use naive_bayes::NaiveBayes;
