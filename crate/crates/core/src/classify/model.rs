use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dataset::LabeledDataset;
use super::forest::{ForestParams, RandomForest};
use super::lda::Lda;
use super::tree::{DecisionTree, TreeParams};
use crate::error::ClassifyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Lda,
    Tree,
    Forest,
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierKind::Lda => "lda",
            ClassifierKind::Tree => "tree",
            ClassifierKind::Forest => "forest",
        })
    }
}

impl FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lda" => Ok(ClassifierKind::Lda),
            "tree" => Ok(ClassifierKind::Tree),
            "forest" | "rf" => Ok(ClassifierKind::Forest),
            other => Err(format!("unknown classifier {other:?} (expected lda, tree or forest)")),
        }
    }
}

/// Hyperparameters for every classifier kind plus the seed for the forest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainParams {
    pub tree: TreeParams,
    pub forest: ForestParams,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        Self {
            tree: TreeParams::default(),
            forest: ForestParams::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelParams {
    Lda(Lda),
    Tree(DecisionTree),
    Forest(RandomForest),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub params: ModelParams,
}

/// Anything that maps a feature row to a class name.
pub trait Classifier {
    fn predict_label(&self, row: &[f64]) -> Result<String, ClassifyError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: String,
    /// Fraction of trees voting for each class (forests only).
    pub vote_shares: Option<Vec<f64>>,
}

fn require_two_classes(ds: &LabeledDataset) -> Result<(), ClassifyError> {
    let mut seen = vec![false; ds.class_names.len()];
    ds.y.iter().for_each(|&c| seen[c] = true);
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(ClassifyError::SingleClass);
    }
    Ok(())
}

pub fn train_lda(train: &LabeledDataset) -> Result<ClassifierModel, ClassifyError> {
    require_two_classes(train)?;
    let lda = Lda::fit(&train.x, &train.y, train.class_names.len())?;
    Ok(ClassifierModel {
        class_names: train.class_names.clone(),
        feature_names: train.feature_names.clone(),
        params: ModelParams::Lda(lda),
    })
}

pub fn train_tree(train: &LabeledDataset, params: &TreeParams) -> Result<ClassifierModel, ClassifyError> {
    require_two_classes(train)?;
    let rows: Vec<usize> = (0..train.len()).collect();
    let (tree, _) = DecisionTree::grow::<rand_chacha::ChaCha8Rng>(
        &train.x,
        &train.y,
        train.class_names.len(),
        &rows,
        *params,
        None,
    );
    Ok(ClassifierModel {
        class_names: train.class_names.clone(),
        feature_names: train.feature_names.clone(),
        params: ModelParams::Tree(tree),
    })
}

pub fn train_forest(train: &LabeledDataset, params: &ForestParams, seed: u64) -> Result<ClassifierModel, ClassifyError> {
    require_two_classes(train)?;
    if params.n_trees == 0 {
        return Err(ClassifyError::InvalidParameter("forest needs at least one tree".into()));
    }
    let forest = RandomForest::fit(&train.x, &train.y, train.class_names.len(), params, seed);
    Ok(ClassifierModel {
        class_names: train.class_names.clone(),
        feature_names: train.feature_names.clone(),
        params: ModelParams::Forest(forest),
    })
}

pub fn train(kind: ClassifierKind, train: &LabeledDataset, params: &TrainParams) -> Result<ClassifierModel, ClassifyError> {
    match kind {
        ClassifierKind::Lda => train_lda(train),
        ClassifierKind::Tree => train_tree(train, &params.tree),
        ClassifierKind::Forest => train_forest(train, &params.forest, params.seed),
    }
}

impl ClassifierModel {
    pub fn kind(&self) -> ClassifierKind {
        match self.params {
            ModelParams::Lda(_) => ClassifierKind::Lda,
            ModelParams::Tree(_) => ClassifierKind::Tree,
            ModelParams::Forest(_) => ClassifierKind::Forest,
        }
    }

    fn check_dims(&self, row: &[f64]) -> Result<(), ClassifyError> {
        if row.len() != self.feature_names.len() {
            return Err(ClassifyError::DimensionMismatch {
                expected: self.feature_names.len(),
                got: row.len(),
            });
        }
        Ok(())
    }

    pub fn predict_index(&self, row: &[f64]) -> Result<usize, ClassifyError> {
        self.check_dims(row)?;
        Ok(match &self.params {
            ModelParams::Lda(m) => m.predict(row),
            ModelParams::Tree(m) => m.predict(row),
            ModelParams::Forest(m) => m.predict(row),
        })
    }

    pub fn predict(&self, row: &[f64]) -> Result<Prediction, ClassifyError> {
        let idx = self.predict_index(row)?;
        let vote_shares = match &self.params {
            ModelParams::Forest(f) => Some(f.vote_shares(row)),
            _ => None,
        };
        Ok(Prediction {
            label: self.class_names[idx].clone(),
            vote_shares,
        })
    }

    /// Per-feature mean Gini decrease, for forests.
    pub fn importance(&self) -> Option<&[f64]> {
        match &self.params {
            ModelParams::Forest(f) => Some(&f.importance),
            _ => None,
        }
    }

    /// Fraction of rows of `ds` whose predicted label matches.
    pub fn accuracy(&self, ds: &LabeledDataset) -> Result<f64, ClassifyError> {
        let mut correct = 0usize;
        for i in 0..ds.len() {
            if self.class_names[self.predict_index(&ds.x[i])?] == ds.label(i) {
                correct += 1;
            }
        }
        Ok(correct as f64 / ds.len().max(1) as f64)
    }
}

impl Classifier for ClassifierModel {
    fn predict_label(&self, row: &[f64]) -> Result<String, ClassifyError> {
        Ok(self.class_names[self.predict_index(row)?].clone())
    }
}
