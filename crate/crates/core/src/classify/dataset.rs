use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::ClassifyError;
use crate::features::FeatureVector;
use crate::lightcurve::{canonical_label, is_non_transient, KNOWN_CLASSES, NON_TRANSIENT};

/// Label given to every non-`non-transient` class when collapsing to the
/// binary problem.
pub const TRANSIENT: &str = "transient";

/// Orders class names: the known survey classes first in reporting order,
/// then `transient`, then any other labels alphabetically.
pub fn order_classes<'a>(labels: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let set: BTreeSet<&str> = labels.into_iter().collect();
    let rank = |c: &str| {
        KNOWN_CLASSES
            .iter()
            .position(|k| *k == c)
            .unwrap_or(if c == TRANSIENT { KNOWN_CLASSES.len() } else { KNOWN_CLASSES.len() + 1 })
    };
    let mut out: Vec<&str> = set.into_iter().collect();
    out.sort_by(|a, b| rank(a).cmp(&rank(b)).then(a.cmp(b)));
    out.into_iter().map(str::to_string).collect()
}

/// Feature rows with class labels. Row `i` has features `x[i]` and class
/// `class_names[y[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    pub ids: Vec<String>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<usize>,
}

impl LabeledDataset {
    /// Builds a dataset from rows of `(id, label, features)`. Every value
    /// must be finite.
    pub fn from_rows(
        feature_names: Vec<String>,
        rows: Vec<(String, String, Vec<f64>)>,
    ) -> Result<Self, ClassifyError> {
        let labels: Vec<String> = rows.iter().map(|(_, l, _)| canonical_label(l)).collect();
        let class_names = order_classes(labels.iter().map(String::as_str));
        let mut ids = Vec::with_capacity(rows.len());
        let mut x = Vec::with_capacity(rows.len());
        let mut y = Vec::with_capacity(rows.len());
        for (row, ((id, _, values), label)) in rows.into_iter().zip(&labels).enumerate() {
            if values.len() != feature_names.len() {
                return Err(ClassifyError::DimensionMismatch {
                    expected: feature_names.len(),
                    got: values.len(),
                });
            }
            if let Some(col) = values.iter().position(|v| !v.is_finite()) {
                return Err(ClassifyError::MissingValue {
                    row,
                    column: feature_names[col].clone(),
                });
            }
            ids.push(id);
            x.push(values);
            y.push(class_names.iter().position(|c| c == label).expect("label collected above"));
        }
        Ok(Self {
            feature_names,
            class_names,
            ids,
            x,
            y,
        })
    }

    /// Pairs feature vectors with labels; all vectors must share names.
    pub fn from_vectors(rows: &[(FeatureVector, String)]) -> Result<Self, ClassifyError> {
        let names: Vec<String> = match rows.first() {
            Some((fv, _)) => fv.names().map(str::to_string).collect(),
            None => Vec::new(),
        };
        let mut out = Vec::with_capacity(rows.len());
        for (fv, label) in rows {
            if !fv.names().eq(names.iter().map(String::as_str)) {
                return Err(ClassifyError::DimensionMismatch {
                    expected: names.len(),
                    got: fv.len(),
                });
            }
            out.push((fv.curve_id.clone(), label.clone(), fv.values()));
        }
        Self::from_rows(names, out)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn label(&self, row: usize) -> &str {
        &self.class_names[self.y[row]]
    }

    pub fn labels(&self) -> Vec<&str> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    /// Classes that actually occur in the rows, in class order.
    pub fn present_classes(&self) -> Vec<String> {
        order_classes(self.labels())
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.class_names.iter().position(|c| c == name)
    }

    pub fn has_class(&self, name: &str) -> bool {
        self.y.iter().any(|&c| self.class_names[c] == name)
    }

    /// Rows at `indices`, keeping the class list.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
            x: indices.iter().map(|&i| self.x[i].clone()).collect(),
            y: indices.iter().map(|&i| self.y[i]).collect(),
        }
    }

    /// Keeps only the rows whose label satisfies `keep`, dropping classes
    /// that no longer occur from the class list.
    pub fn filter_labels(&self, keep: impl Fn(&str) -> bool) -> Self {
        let rows: Vec<usize> = (0..self.len()).filter(|&i| keep(self.label(i))).collect();
        self.subset(&rows).relabel(|l| l.to_string())
    }

    /// Maps every label through `f`, rebuilding the class list.
    pub fn relabel(&self, f: impl Fn(&str) -> String) -> Self {
        let labels: Vec<String> = self.labels().into_iter().map(&f).collect();
        let class_names = order_classes(labels.iter().map(String::as_str));
        let y = labels
            .iter()
            .map(|l| class_names.iter().position(|c| c == l).expect("present"))
            .collect();
        Self {
            feature_names: self.feature_names.clone(),
            class_names,
            ids: self.ids.clone(),
            x: self.x.clone(),
            y,
        }
    }

    /// Collapses labels to `non-transient` / `transient`.
    pub fn to_binary(&self) -> Self {
        self.relabel(|l| {
            if is_non_transient(l) {
                NON_TRANSIENT.to_string()
            } else {
                TRANSIENT.to_string()
            }
        })
    }

    /// Projects onto the named feature columns, in the given order.
    pub fn select_features(&self, names: &[String]) -> Result<Self, ClassifyError> {
        let cols: Vec<usize> = names
            .iter()
            .map(|n| {
                self.feature_names
                    .iter()
                    .position(|f| f == n)
                    .ok_or_else(|| ClassifyError::UnknownFeature(n.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            feature_names: names.to_vec(),
            class_names: self.class_names.clone(),
            ids: self.ids.clone(),
            x: self.x.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect(),
            y: self.y.clone(),
        })
    }

    /// Appends a feature column.
    pub fn with_column(&self, name: &str, values: &[f64]) -> Self {
        let mut out = self.clone();
        out.feature_names.push(name.to_string());
        for (row, v) in out.x.iter_mut().zip(values) {
            row.push(*v);
        }
        out
    }

    /// Applies `f` to one column in place.
    pub fn map_column(&mut self, col: usize, f: impl Fn(f64) -> f64) {
        for row in &mut self.x {
            row[col] = f(row[col]);
        }
    }

    /// Parses a feature matrix CSV: `id,label,<feature names...>`.
    pub fn from_csv(text: &str) -> Result<Self, ClassifyError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let bad = |m: String| ClassifyError::ModelFormat(m);
        let header = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
        if header.len() < 2 || &header[0] != "id" || &header[1] != "label" {
            return Err(bad("feature matrix header must start with id,label".into()));
        }
        let names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let values = rec
                .iter()
                .skip(2)
                .enumerate()
                .map(|(c, v)| {
                    v.parse::<f64>().map_err(|_| ClassifyError::MissingValue {
                        row: i,
                        column: names.get(c).cloned().unwrap_or_default(),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            rows.push((rec[0].to_string(), rec[1].to_string(), values));
        }
        Self::from_rows(names, rows)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,label");
        for n in &self.feature_names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for i in 0..self.len() {
            let _ = write!(out, "{},{}", self.ids[i], self.label(i));
            for v in &self.x[i] {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Seeded uniform partition without replacement. Both parts keep the
/// original row order.
pub fn split_train_test(
    ds: &LabeledDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset), ClassifyError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(ClassifyError::InvalidParameter(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let n = ds.len();
    if n < 2 {
        return Err(ClassifyError::DatasetTooSmall(n));
    }
    let n_train = ((n as f64 * train_fraction).round() as usize).clamp(1, n - 1);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train, test) = idx.split_at_mut(n_train);
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.subset(train), ds.subset(test)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(n: usize) -> LabeledDataset {
        let rows = (0..n)
            .map(|i| {
                let label = if i % 3 == 0 { "non-transient" } else if i % 3 == 1 { "sne" } else { "AGN" };
                (format!("c{i}"), label.to_string(), vec![i as f64, (i * i) as f64])
            })
            .collect();
        LabeledDataset::from_rows(vec!["a".into(), "b".into()], rows).unwrap()
    }

    #[test]
    fn class_order_follows_survey_order() {
        let ds = toy(6);
        assert_eq!(ds.class_names, vec!["AGN", "SNe", "non-transient"]);
        assert_eq!(order_classes(["zeta", "transient", "CV", "alpha"]), vec!["CV", "transient", "alpha", "zeta"]);
    }

    #[test]
    fn split_sizes_for_survey_sample() {
        let ds = toy(3720);
        let (train, test) = split_train_test(&ds, 2.0 / 3.0, 7).unwrap();
        assert_eq!(train.len(), 2480);
        assert_eq!(test.len(), 1240);
        let mut all: Vec<&String> = train.ids.iter().chain(&test.ids).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 3720);
    }

    #[test]
    fn split_is_deterministic() {
        let ds = toy(100);
        let a = split_train_test(&ds, 2.0 / 3.0, 11).unwrap();
        let b = split_train_test(&ds, 2.0 / 3.0, 11).unwrap();
        assert_eq!(a, b);
        let c = split_train_test(&ds, 2.0 / 3.0, 12).unwrap();
        assert_ne!(a.0.ids, c.0.ids);
    }

    #[test]
    fn split_rejects_tiny_dataset() {
        assert_eq!(split_train_test(&toy(1), 0.5, 0), Err(ClassifyError::DatasetTooSmall(1)));
    }

    #[test]
    fn binary_collapse() {
        let b = toy(6).to_binary();
        assert_eq!(b.class_names, vec!["non-transient", "transient"]);
        assert_eq!(b.labels(), vec!["non-transient", "transient", "transient", "non-transient", "transient", "transient"]);
    }

    #[test]
    fn csv_round_trip() {
        let ds = toy(9);
        assert_eq!(LabeledDataset::from_csv(&ds.to_csv()).unwrap(), ds);
    }

    #[test]
    fn rejects_non_finite() {
        let rows = vec![("a".to_string(), "AGN".to_string(), vec![f64::NAN])];
        assert!(matches!(
            LabeledDataset::from_rows(vec!["x".into()], rows),
            Err(ClassifyError::MissingValue { row: 0, .. })
        ));
    }
}
