//! Classifiers (LDA, CART, random forest), the four evaluation schemes,
//! confusion matrices and Gini-importance stepwise selection.

mod confusion;
mod dataset;
mod forest;
mod lda;
mod model;
mod persist;
mod scheme;
mod selection;
mod tree;

pub use confusion::{ConfusionMatrix, EvaluationSummary};
pub use dataset::{order_classes, split_train_test, LabeledDataset, TRANSIENT};
pub use forest::{ForestParams, RandomForest};
pub use lda::{Lda, RIDGE};
pub use model::{
    train, train_forest, train_lda, train_tree, Classifier, ClassifierKind, ClassifierModel, ModelParams, Prediction,
    TrainParams,
};
pub use persist::{model_from_json, model_to_json, MODEL_FORMAT, MODEL_VERSION};
pub use scheme::{
    evaluate_predictions, evaluate_scheme, hierarchical_predict, train_scheme, Scheme, SchemeStages, SecondStage,
    TrainedScheme,
};
pub use selection::{stepwise_selection, stepwise_selection_split, SelectionStep, SelectionTrace};
pub use tree::{DecisionTree, Node, TreeParams};

/// Fraction of rows used for training.
pub const TRAIN_FRACTION: f64 = 2.0 / 3.0;
