//! Measures of the fitted posterior mean curve.

use crate::gp::{posterior_derivative, GpFit};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveMeasures {
    pub totvar: f64,
    pub quadvar: f64,
    pub famp: f64,
    pub fslope: f64,
}

/// Variation, amplitude and steepest slope of the fitted mean on its grid.
/// Both variations are normalized by the grid size `m`.
pub fn curve_measures(fit: &GpFit) -> CurveMeasures {
    let f = &fit.mean_on_grid;
    let m = f.len() as f64;
    let (mut totvar, mut quadvar) = (0.0, 0.0);
    for w in f.windows(2) {
        let d = w[1] - w[0];
        totvar += d.abs();
        quadvar += d * d;
    }
    let (lo, hi) = f
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let fslope = posterior_derivative(fit)
        .map(|d| d.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
        .unwrap_or(0.0);
    CurveMeasures {
        totvar: totvar / m,
        quadvar: quadvar / m,
        famp: hi - lo,
        fslope,
    }
}

/// Largest absolute residual in units of the reported error.
pub fn outlier_measure(fit: &GpFit) -> f64 {
    fit.scaled_residuals.iter().fold(0.0f64, |acc, r| acc.max(r.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::even_grid;

    fn fit_from_grid(values: Vec<f64>) -> GpFit {
        let m = values.len();
        GpFit {
            grid: even_grid(0.0, 600.0, m),
            var_on_grid: vec![0.0; m],
            mean_on_grid: values,
            obs_times: vec![],
            obs_errors: vec![],
            mean_at_obs: vec![],
            prior_mean_used: 0.0,
            residuals: vec![],
            scaled_residuals: vec![],
        }
    }

    #[test]
    fn constant_curve_has_no_variation() {
        let c = curve_measures(&fit_from_grid(vec![18.0; 300]));
        assert_eq!(c, CurveMeasures { totvar: 0.0, quadvar: 0.0, famp: 0.0, fslope: 0.0 });
    }

    #[test]
    fn linear_rise_telescopes() {
        let values: Vec<f64> = (0..300).map(|j| 17.0 + 3.0 * j as f64 / 299.0).collect();
        let c = curve_measures(&fit_from_grid(values));
        assert!((c.totvar - 0.01).abs() < 1e-12);
        assert!((c.famp - 3.0).abs() < 1e-12);
        assert!((c.fslope - 3.0 / 600.0).abs() < 1e-12);
    }

    #[test]
    fn sawtooth_matches_direct_sum() {
        let m = 300;
        let values: Vec<f64> = (0..m).map(|j| (j % 2) as f64).collect();
        let c = curve_measures(&fit_from_grid(values));
        let expected = (m - 1) as f64 / m as f64;
        assert!((c.totvar - expected).abs() < 1e-12);
        assert!((c.quadvar - expected).abs() < 1e-12);
        assert_eq!(c.famp, 1.0);
    }

    #[test]
    fn outl_is_max_abs_scaled_residual() {
        let mut fit = fit_from_grid(vec![0.0; 3]);
        fit.residuals = vec![0.1, -0.3];
        fit.obs_errors = vec![0.1, 0.1];
        fit.scaled_residuals = vec![1.0, -3.0];
        assert!((outlier_measure(&fit) - 3.0).abs() < 1e-12);
    }
}
