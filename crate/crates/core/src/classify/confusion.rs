use std::fmt;
use std::fmt::Write as _;

use super::model::ClassifierKind;
use super::scheme::Scheme;

/// Predicted-by-actual count grid: `counts[predicted][actual]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub class_names: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    /// Tallies `(predicted, actual)` label pairs. Every label must appear in
    /// `class_names`.
    pub fn from_labels<'a>(class_names: Vec<String>, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        let k = class_names.len();
        let mut counts = vec![vec![0; k]; k];
        let index = |l: &str| {
            class_names
                .iter()
                .position(|c| c == l)
                .unwrap_or_else(|| panic!("label {l:?} not in class list"))
        };
        for (p, a) in pairs {
            counts[index(p)][index(a)] += 1;
        }
        Self { class_names, counts }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        self.correct() as f64 / self.total().max(1) as f64
    }

    /// Binomial standard error of the accuracy.
    pub fn stderr(&self) -> f64 {
        let a = self.accuracy();
        (a * (1.0 - a) / self.total().max(1) as f64).sqrt()
    }

    /// Number of test rows of each actual class.
    pub fn column_sums(&self) -> Vec<usize> {
        (0..self.class_names.len())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    /// CSV with predicted classes as rows and actual classes as columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("predicted");
        for c in &self.class_names {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
        for (c, row) in self.class_names.iter().zip(&self.counts) {
            out.push_str(c);
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// One evaluation result, printed as `scheme,kind,accuracy,stderr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationSummary {
    pub scheme: Scheme,
    pub kind: ClassifierKind,
    pub accuracy: f64,
    pub stderr: f64,
}

impl EvaluationSummary {
    pub const HEADER: &'static str = "scheme,kind,accuracy,stderr";

    pub fn new(scheme: Scheme, kind: ClassifierKind, cm: &ConfusionMatrix) -> Self {
        Self {
            scheme,
            kind,
            accuracy: cm.accuracy(),
            stderr: cm.stderr(),
        }
    }
}

impl fmt::Display for EvaluationSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{:.6},{:.6}", self.scheme, self.kind, self.accuracy, self.stderr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_over_total() {
        let names = vec!["A".to_string(), "B".to_string()];
        let pairs = [("A", "A"), ("A", "B"), ("B", "B"), ("B", "B")];
        let cm = ConfusionMatrix::from_labels(names, pairs);
        assert_eq!(cm.counts, vec![vec![1, 1], vec![0, 2]]);
        assert_eq!(cm.accuracy(), 0.75);
        assert_eq!(cm.column_sums(), vec![1, 3]);
        assert_eq!(cm.row_sums(), vec![2, 2]);
        assert!((cm.stderr() - (0.75f64 * 0.25 / 4.0).sqrt()).abs() < 1e-15);
        assert_eq!(cm.to_csv(), "predicted,A,B\nA,1,1\nB,0,2\n");
    }

    #[test]
    fn perfect_summary_line() {
        let names = vec!["A".to_string(), "B".to_string()];
        let cm = ConfusionMatrix::from_labels(names, [("A", "A"), ("B", "B")]);
        let s = EvaluationSummary::new(Scheme::TransientOrNot, ClassifierKind::Forest, &cm);
        assert_eq!(s.to_string(), "binary,forest,1.000000,0.000000");
    }
}
