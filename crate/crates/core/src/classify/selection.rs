//! Backward elimination of features by random-forest Gini importance.

use std::fmt::Write as _;

use super::dataset::{split_train_test, LabeledDataset};
use super::forest::ForestParams;
use super::model::train_forest;
use super::tree::argmax_first;
use crate::error::ClassifyError;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionStep {
    pub removed: String,
    /// Accuracy of the model refitted without the removed feature (and all
    /// earlier ones).
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SelectionTrace {
    pub steps: Vec<SelectionStep>,
}

impl SelectionTrace {
    pub fn removal_order(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.removed.as_str()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,removed,train_accuracy,test_accuracy\n");
        for (i, s) in self.steps.iter().enumerate() {
            let _ = writeln!(out, "{},{},{:.6},{:.6}", i + 1, s.removed, s.train_accuracy, s.test_accuracy);
        }
        out
    }
}

/// Accuracy of always predicting the most frequent training class.
fn majority_accuracy(train: &LabeledDataset, ds: &LabeledDataset) -> f64 {
    let mut counts = vec![0usize; train.class_names.len()];
    train.y.iter().for_each(|&c| counts[c] += 1);
    let majority = &train.class_names[argmax_first(&counts)];
    ds.labels().iter().filter(|&&l| l == majority).count() as f64 / ds.len().max(1) as f64
}

/// Repeatedly fits a forest on the training rows and drops the feature with
/// the smallest mean Gini decrease (ties: earliest in current order). After
/// each removal the forest is refitted and its train and test accuracy
/// recorded. The last feature's entry reports a featureless majority-class
/// predictor.
pub fn stepwise_selection_split(
    train: &LabeledDataset,
    test: &LabeledDataset,
    params: &ForestParams,
    seed: u64,
) -> Result<SelectionTrace, ClassifyError> {
    if train.n_features() < 2 {
        return Err(ClassifyError::InvalidParameter("stepwise selection needs at least two features".into()));
    }
    let mut current = train.feature_names.clone();
    let mut model = train_forest(train, params, seed)?;
    let mut trace = SelectionTrace::default();
    for step in 1..=train.n_features() {
        let imp = model.importance().expect("forest model");
        let mut worst = 0;
        for (i, v) in imp.iter().enumerate() {
            if *v < imp[worst] {
                worst = i;
            }
        }
        let removed = current.remove(worst);
        let (train_accuracy, test_accuracy) = if current.is_empty() {
            (majority_accuracy(train, train), majority_accuracy(train, test))
        } else {
            let tr = train.select_features(&current)?;
            let te = test.select_features(&current)?;
            model = train_forest(&tr, params, seed.wrapping_add(step as u64))?;
            (model.accuracy(&tr)?, model.accuracy(&te)?)
        };
        trace.steps.push(SelectionStep {
            removed,
            train_accuracy,
            test_accuracy,
        });
    }
    Ok(trace)
}

/// Splits `ds` 2/3 : 1/3 with `seed`, then runs [`stepwise_selection_split`]
/// with forest seed `seed + 1`.
pub fn stepwise_selection(ds: &LabeledDataset, params: &ForestParams, seed: u64) -> Result<SelectionTrace, ClassifyError> {
    let (train, test) = split_train_test(ds, 2.0 / 3.0, seed)?;
    stepwise_selection_split(&train, &test, params, seed.wrapping_add(1))
}
