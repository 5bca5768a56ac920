//! The four classification problems: all classes at once, transient or
//! not, transients only, and the two-stage hierarchical scheme.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::confusion::ConfusionMatrix;
use super::dataset::{order_classes, LabeledDataset, TRANSIENT};
use super::model::{train, Classifier, ClassifierKind, ClassifierModel, TrainParams};
use crate::error::ClassifyError;
use crate::lightcurve::{is_non_transient, NON_TRANSIENT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    All,
    TransientOrNot,
    TransientOnly,
    Hierarchical,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::All, Scheme::TransientOrNot, Scheme::TransientOnly, Scheme::Hierarchical];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::All => "all",
            Scheme::TransientOrNot => "binary",
            Scheme::TransientOnly => "transient",
            Scheme::Hierarchical => "hier",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Scheme::All),
            "binary" => Ok(Scheme::TransientOrNot),
            "transient" => Ok(Scheme::TransientOnly),
            "hier" => Ok(Scheme::Hierarchical),
            other => Err(format!("unknown scheme {other:?} (expected all, binary, transient or hier)")),
        }
    }
}

/// Second stage of the hierarchical scheme. A training set with a single
/// transient class degenerates to a constant prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SecondStage {
    Model(ClassifierModel),
    Constant(String),
}

impl Classifier for SecondStage {
    fn predict_label(&self, row: &[f64]) -> Result<String, ClassifyError> {
        match self {
            SecondStage::Model(m) => m.predict_label(row),
            SecondStage::Constant(c) => Ok(c.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SchemeStages {
    Single(ClassifierModel),
    Hierarchical { stage1: ClassifierModel, stage2: SecondStage },
}

/// Models trained for one scheme, ready to evaluate on a test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedScheme {
    pub scheme: Scheme,
    pub kind: ClassifierKind,
    pub feature_names: Vec<String>,
    pub stages: SchemeStages,
}

fn require_non_transient(ds: &LabeledDataset) -> Result<(), ClassifyError> {
    if ds.labels().into_iter().any(is_non_transient) {
        Ok(())
    } else {
        Err(ClassifyError::MissingClass(NON_TRANSIENT.to_string()))
    }
}

impl Scheme {
    /// The labels a test set is scored against under this scheme.
    pub fn prepare(self, ds: &LabeledDataset) -> LabeledDataset {
        match self {
            Scheme::All | Scheme::Hierarchical => ds.clone(),
            Scheme::TransientOrNot => ds.to_binary(),
            Scheme::TransientOnly => ds.filter_labels(|l| !is_non_transient(l)),
        }
    }
}

/// Hierarchical decision for one row: stage 1 decides transient or not;
/// rows called transient get the stage-2 label.
pub fn hierarchical_predict(
    stage1: &dyn Classifier,
    stage2: &dyn Classifier,
    row: &[f64],
) -> Result<String, ClassifyError> {
    let first = stage1.predict_label(row)?;
    if is_non_transient(&first) {
        Ok(NON_TRANSIENT.to_string())
    } else {
        stage2.predict_label(row)
    }
}

pub fn train_scheme(
    scheme: Scheme,
    kind: ClassifierKind,
    train_set: &LabeledDataset,
    params: &TrainParams,
) -> Result<TrainedScheme, ClassifyError> {
    let stages = match scheme {
        Scheme::All => SchemeStages::Single(train(kind, train_set, params)?),
        Scheme::TransientOrNot => {
            require_non_transient(train_set)?;
            SchemeStages::Single(train(kind, &train_set.to_binary(), params)?)
        }
        Scheme::TransientOnly => SchemeStages::Single(train(kind, &Scheme::TransientOnly.prepare(train_set), params)?),
        Scheme::Hierarchical => {
            require_non_transient(train_set)?;
            let stage1 = train(kind, &train_set.to_binary(), params)?;
            let transients = train_set.filter_labels(|l| !is_non_transient(l));
            let classes = transients.present_classes();
            let stage2 = match classes.len() {
                0 => return Err(ClassifyError::MissingClass(TRANSIENT.to_string())),
                1 => SecondStage::Constant(classes[0].clone()),
                _ => SecondStage::Model(train(kind, &transients, params)?),
            };
            SchemeStages::Hierarchical { stage1, stage2 }
        }
    };
    Ok(TrainedScheme {
        scheme,
        kind,
        feature_names: train_set.feature_names.clone(),
        stages,
    })
}

impl TrainedScheme {
    pub fn predict_label(&self, row: &[f64]) -> Result<String, ClassifyError> {
        match &self.stages {
            SchemeStages::Single(m) => m.predict_label(row),
            SchemeStages::Hierarchical { stage1, stage2 } => hierarchical_predict(stage1, stage2, row),
        }
    }

    fn output_classes(&self) -> Vec<String> {
        match &self.stages {
            SchemeStages::Single(m) => m.class_names.clone(),
            SchemeStages::Hierarchical { stage2, .. } => {
                let mut c = match stage2 {
                    SecondStage::Model(m) => m.class_names.clone(),
                    SecondStage::Constant(c) => vec![c.clone()],
                };
                c.push(NON_TRANSIENT.to_string());
                c
            }
        }
    }

    /// Confusion matrix over the union of the model's classes and the
    /// classes present in the prepared test set.
    pub fn evaluate(&self, test: &LabeledDataset) -> Result<ConfusionMatrix, ClassifyError> {
        if test.feature_names != self.feature_names {
            return Err(ClassifyError::DimensionMismatch {
                expected: self.feature_names.len(),
                got: test.feature_names.len(),
            });
        }
        let target = self.scheme.prepare(test);
        let predicted: Vec<String> = target
            .x
            .iter()
            .map(|row| self.predict_label(row))
            .collect::<Result<_, _>>()?;
        evaluate_predictions(&self.output_classes(), &target, &predicted)
    }
}

/// Tallies predictions against a test set's labels.
pub fn evaluate_predictions(
    model_classes: &[String],
    target: &LabeledDataset,
    predicted: &[String],
) -> Result<ConfusionMatrix, ClassifyError> {
    let actual = target.labels();
    let classes = order_classes(
        model_classes
            .iter()
            .map(String::as_str)
            .chain(actual.iter().copied())
            .chain(predicted.iter().map(String::as_str)),
    );
    Ok(ConfusionMatrix::from_labels(
        classes,
        predicted.iter().map(String::as_str).zip(actual),
    ))
}

/// Trains under `scheme` on `train_set` and scores on `test`.
pub fn evaluate_scheme(
    scheme: Scheme,
    train_set: &LabeledDataset,
    test: &LabeledDataset,
    kind: ClassifierKind,
    params: &TrainParams,
) -> Result<ConfusionMatrix, ClassifyError> {
    train_scheme(scheme, kind, train_set, params)?.evaluate(test)
}
