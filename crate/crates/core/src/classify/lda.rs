use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::ClassifyError;

/// Ridge added to the pooled covariance diagonal, relative to its mean
/// diagonal entry.
pub const RIDGE: f64 = 1e-8;

/// Linear discriminant analysis with a pooled within-class covariance and
/// priors proportional to class frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lda {
    /// Per-class `Σ⁻¹ μ_k`.
    pub coef: Vec<Vec<f64>>,
    /// Per-class `−½ μ_kᵀ Σ⁻¹ μ_k + ln π_k`; `-inf` for classes absent from
    /// training.
    pub intercept: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub priors: Vec<f64>,
}

impl Lda {
    pub fn fit(x: &[Vec<f64>], y: &[usize], n_classes: usize) -> Result<Self, ClassifyError> {
        let n = x.len();
        let p = x.first().map_or(0, Vec::len);
        let mut counts = vec![0usize; n_classes];
        for &c in y {
            counts[c] += 1;
        }
        let present = counts.iter().filter(|&&c| c > 0).count();
        if present < 2 {
            return Err(ClassifyError::SingleClass);
        }

        let mut means = vec![vec![0.0; p]; n_classes];
        for (row, &c) in x.iter().zip(y) {
            for (m, v) in means[c].iter_mut().zip(row) {
                *m += v;
            }
        }
        for (m, &k) in means.iter_mut().zip(&counts) {
            if k > 0 {
                m.iter_mut().for_each(|v| *v /= k as f64);
            }
        }

        let mut cov = DMatrix::<f64>::zeros(p, p);
        for (row, &c) in x.iter().zip(y) {
            let d = DVector::from_iterator(p, row.iter().zip(&means[c]).map(|(v, m)| v - m));
            cov.ger(1.0, &d, &d, 1.0);
        }
        let dof = n.saturating_sub(present).max(1) as f64;
        cov /= dof;
        let scale = (cov.trace() / p as f64).max(f64::MIN_POSITIVE);
        for i in 0..p {
            cov[(i, i)] += RIDGE * scale;
        }
        let chol = cov.cholesky().ok_or(ClassifyError::SingularCovariance)?;

        let priors: Vec<f64> = counts.iter().map(|&k| k as f64 / n as f64).collect();
        let mut coef = Vec::with_capacity(n_classes);
        let mut intercept = Vec::with_capacity(n_classes);
        for (m, &prior) in means.iter().zip(&priors) {
            let mu = DVector::from_column_slice(m);
            let w = chol.solve(&mu);
            intercept.push(if prior > 0.0 { -0.5 * mu.dot(&w) + prior.ln() } else { f64::NEG_INFINITY });
            coef.push(w.as_slice().to_vec());
        }
        Ok(Self {
            coef,
            intercept,
            means,
            priors,
        })
    }

    pub fn discriminants(&self, row: &[f64]) -> Vec<f64> {
        self.coef
            .iter()
            .zip(&self.intercept)
            .map(|(w, b)| w.iter().zip(row).map(|(w, x)| w * x).sum::<f64>() + b)
            .collect()
    }

    /// Class with the largest discriminant; ties go to the earliest class.
    pub fn predict(&self, row: &[f64]) -> usize {
        let d = self.discriminants(row);
        let mut best = 0;
        for (i, v) in d.iter().enumerate() {
            if *v > d[best] {
                best = i;
            }
        }
        best
    }
}
