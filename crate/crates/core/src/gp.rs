//! Gaussian process regression for a single lightcurve.
//!
//! The latent curve has a constant prior mean `psi` and a squared-exponential
//! covariance. Observation noise is a single dataset-wide variance; a small
//! jitter proportional to the signal variance is always added to the
//! diagonal so clustered or duplicated epochs stay factorizable.

use std::fmt::Write as _;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::GpError;
use crate::kv::KvMap;
use crate::lightcurve::{is_non_transient, Lightcurve};
use crate::stats;

pub const DEFAULT_LENGTH_SCALE: f64 = 140.0;
pub const DEFAULT_GRID_SIZE: usize = 300;
/// Diagonal jitter as a fraction of the signal variance.
pub const JITTER_FRACTION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpHyperparameters {
    /// Signal variance (mag²).
    pub sigma_f2: f64,
    /// Noise variance (mag²).
    pub sigma_n2: f64,
    /// Length-scale (days).
    pub length_scale: f64,
}

impl GpHyperparameters {
    pub fn new(sigma_f2: f64, sigma_n2: f64, length_scale: f64) -> Result<Self, GpError> {
        let h = Self {
            sigma_f2,
            sigma_n2,
            length_scale,
        };
        h.check()?;
        Ok(h)
    }

    pub fn check(&self) -> Result<(), GpError> {
        let bad = |m: &str| Err(GpError::InvalidHyperparameters(m.to_string()));
        if !(self.sigma_f2.is_finite() && self.sigma_f2 > 0.0) {
            return bad("sigma_f2 must be finite and positive");
        }
        if !(self.sigma_n2.is_finite() && self.sigma_n2 >= 0.0) {
            return bad("sigma_n2 must be finite and nonnegative");
        }
        if !(self.length_scale.is_finite() && self.length_scale > 0.0) {
            return bad("length_scale must be finite and positive");
        }
        Ok(())
    }

    pub fn to_kv(&self) -> KvMap {
        let mut kv = KvMap::default();
        kv.insert("sigma_f2", self.sigma_f2);
        kv.insert("sigma_n2", self.sigma_n2);
        kv.insert("length_scale", self.length_scale);
        kv
    }

    /// Reads persisted hyperparameters; all three keys are required.
    pub fn from_kv(kv: &KvMap) -> Result<Self, GpError> {
        let get = |k: &str| -> Result<f64, GpError> {
            kv.get::<f64>(k)
                .map_err(|e| GpError::InvalidHyperparameters(e.to_string()))?
                .ok_or_else(|| GpError::InvalidHyperparameters(format!("missing key {k}")))
        };
        Self::new(get("sigma_f2")?, get("sigma_n2")?, get("length_scale")?)
    }
}

/// Covariance function over scalar times.
pub trait Kernel {
    /// Noise-free covariance between latent values at `x` and `x_prime`.
    fn signal_cov(&self, x: f64, x_prime: f64) -> f64;

    /// Prior variance of the latent curve at a single point.
    fn signal_var(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquaredExponential {
    pub sigma_f2: f64,
    pub length_scale: f64,
}

impl From<&GpHyperparameters> for SquaredExponential {
    fn from(h: &GpHyperparameters) -> Self {
        Self {
            sigma_f2: h.sigma_f2,
            length_scale: h.length_scale,
        }
    }
}

impl Kernel for SquaredExponential {
    #[inline]
    fn signal_cov(&self, x: f64, x_prime: f64) -> f64 {
        let d = x - x_prime;
        self.sigma_f2 * (-d * d / (2.0 * self.length_scale * self.length_scale)).exp()
    }

    fn signal_var(&self) -> f64 {
        self.sigma_f2
    }
}

/// Full observation covariance: squared-exponential signal plus white noise
/// on exactly equal inputs.
pub fn kernel(x: f64, x_prime: f64, h: &GpHyperparameters) -> f64 {
    #[allow(clippy::float_cmp)]
    let delta = if x == x_prime { 1.0 } else { 0.0 };
    SquaredExponential::from(h).signal_cov(x, x_prime) + h.sigma_n2 * delta
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorMeanRule {
    pub detection_limit: f64,
    /// Curves spanning less than this many days revert to the detection limit.
    pub span_threshold: f64,
}

impl Default for PriorMeanRule {
    fn default() -> Self {
        Self {
            detection_limit: 20.5,
            span_threshold: 365.0,
        }
    }
}

/// Short curves revert to the detection limit; curves covering at least
/// the span threshold revert to their own median magnitude.
pub fn select_prior_mean(lc: &Lightcurve, rule: &PriorMeanRule) -> f64 {
    if lc.span() < rule.span_threshold {
        rule.detection_limit
    } else {
        stats::median(&lc.mags())
    }
}

/// Empirical-Bayes hyperparameters from a labeled reference set.
///
/// The signal variance is the median of per-curve sample variances over
/// non-transients; the noise variance is the mean squared reported error
/// over every detected observation in the set.
pub fn estimate_hyperparameters(reference: &[Lightcurve], length_scale: f64) -> Result<GpHyperparameters, GpError> {
    let variances: Vec<f64> = reference
        .iter()
        .filter(|lc| lc.label.as_deref().is_some_and(is_non_transient))
        .filter(|lc| lc.n() >= 2)
        .map(|lc| stats::sample_variance(&lc.mags()))
        .collect();
    if variances.is_empty() {
        return Err(GpError::NoNonTransients);
    }
    let sigma_f2 = stats::median(&variances);

    let (sum, count) = reference
        .iter()
        .flat_map(|lc| lc.detected())
        .fold((0.0, 0usize), |(s, c), o| (s + o.s * o.s, c + 1));
    let sigma_n2 = if count == 0 { 0.0 } else { sum / count as f64 };
    GpHyperparameters::new(sigma_f2, sigma_n2, length_scale)
}

/// A GP conditioned on one curve's detections; predicts at arbitrary times.
#[derive(Debug, Clone)]
pub struct Posterior {
    kernel: SquaredExponential,
    times: Vec<f64>,
    prior_mean: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

impl Posterior {
    /// Conditions on `(times, y)`. Fails only if the jittered covariance is
    /// not positive definite even after inflating the jitter 100-fold.
    pub fn condition(times: &[f64], y: &[f64], h: &GpHyperparameters, prior_mean: f64) -> Result<Self, GpError> {
        h.check()?;
        assert_eq!(times.len(), y.len(), "times and magnitudes differ in length");
        let kernel = SquaredExponential::from(h);
        let n = times.len();
        let k = DMatrix::from_fn(n, n, |i, j| kernel.signal_cov(times[i], times[j]));
        let jitter = JITTER_FRACTION * h.sigma_f2;
        let chol = [jitter, 100.0 * jitter]
            .into_iter()
            .find_map(|eps| {
                let mut a = k.clone();
                for i in 0..n {
                    a[(i, i)] += h.sigma_n2 + eps;
                }
                Cholesky::new(a)
            })
            .ok_or(GpError::FactorizationFailure)?;
        let resid = DVector::from_iterator(n, y.iter().map(|v| v - prior_mean));
        let alpha = chol.solve(&resid);
        Ok(Self {
            kernel,
            times: times.to_vec(),
            prior_mean,
            chol,
            alpha,
        })
    }

    pub fn prior_mean(&self) -> f64 {
        self.prior_mean
    }

    fn cross_cov(&self, targets: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.times.len(), targets.len(), |i, j| {
            self.kernel.signal_cov(self.times[i], targets[j])
        })
    }

    pub fn mean(&self, targets: &[f64]) -> Vec<f64> {
        let kx = self.cross_cov(targets);
        let m = kx.tr_mul(&self.alpha);
        m.iter().map(|v| v + self.prior_mean).collect()
    }

    /// Posterior mean and latent-curve variance at `targets`.
    pub fn mean_and_var(&self, targets: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let kx = self.cross_cov(targets);
        let mean = kx.tr_mul(&self.alpha).iter().map(|v| v + self.prior_mean).collect();
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&kx)
            .expect("Cholesky factor has a positive diagonal");
        let prior_var = self.kernel.signal_var();
        let var = v
            .column_iter()
            .map(|c| (prior_var - c.norm_squared()).max(0.0))
            .collect();
        (mean, var)
    }
}

/// Posterior summary of one curve on an even grid and at its observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GpFit {
    pub grid: Vec<f64>,
    pub mean_on_grid: Vec<f64>,
    pub var_on_grid: Vec<f64>,
    pub obs_times: Vec<f64>,
    pub obs_errors: Vec<f64>,
    pub mean_at_obs: Vec<f64>,
    pub prior_mean_used: f64,
    pub residuals: Vec<f64>,
    pub scaled_residuals: Vec<f64>,
}

/// `m` evenly spaced points covering `[lo, hi]`, both ends included.
pub fn even_grid(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    let step = (hi - lo) / (m - 1) as f64;
    (0..m)
        .map(|j| if j == m - 1 { hi } else { lo + step * j as f64 })
        .collect()
}

/// Fits the adaptive-prior GP to a validated curve's detections.
pub fn fit_posterior(lc: &Lightcurve, h: &GpHyperparameters, rule: &PriorMeanRule, m: usize) -> Result<GpFit, GpError> {
    fit_with_prior(lc, h, select_prior_mean(lc, rule), m)
}

/// Same as [`fit_posterior`] with an explicit constant prior mean.
pub fn fit_with_prior(lc: &Lightcurve, h: &GpHyperparameters, prior_mean: f64, m: usize) -> Result<GpFit, GpError> {
    if m < 2 {
        return Err(GpError::InvalidGrid(m));
    }
    let t = lc.times();
    let y = lc.mags();
    let s = lc.errors();
    let (lo, hi) = match (t.first(), t.last()) {
        (Some(&lo), Some(&hi)) if hi > lo => (lo, hi),
        _ => return Err(GpError::DegenerateSpan),
    };
    let post = Posterior::condition(&t, &y, h, prior_mean)?;
    let grid = even_grid(lo, hi, m);
    let (mean_on_grid, var_on_grid) = post.mean_and_var(&grid);
    let mean_at_obs = post.mean(&t);
    let residuals: Vec<f64> = y.iter().zip(&mean_at_obs).map(|(y, f)| y - f).collect();
    let scaled_residuals = residuals.iter().zip(&s).map(|(r, s)| r / s).collect();
    Ok(GpFit {
        grid,
        mean_on_grid,
        var_on_grid,
        obs_times: t,
        obs_errors: s,
        mean_at_obs,
        prior_mean_used: prior_mean,
        residuals,
        scaled_residuals,
    })
}

/// Derivative of the fitted mean along the grid: central differences in the
/// interior, one-sided at both ends.
pub fn posterior_derivative(fit: &GpFit) -> Result<Vec<f64>, GpError> {
    finite_difference(&fit.grid, &fit.mean_on_grid)
}

pub(crate) fn finite_difference(u: &[f64], f: &[f64]) -> Result<Vec<f64>, GpError> {
    let m = u.len();
    if m < 2 || u[m - 1] <= u[0] {
        return Err(GpError::DegenerateSpan);
    }
    let mut d = Vec::with_capacity(m);
    d.push((f[1] - f[0]) / (u[1] - u[0]));
    for j in 1..m - 1 {
        d.push((f[j + 1] - f[j - 1]) / (u[j + 1] - u[j - 1]));
    }
    d.push((f[m - 1] - f[m - 2]) / (u[m - 1] - u[m - 2]));
    Ok(d)
}

/// Plot-ready dump: a `#` metadata line followed by `t,mean,var` rows.
pub fn write_fit_dump(id: &str, fit: &GpFit, h: &GpHyperparameters) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# id={id} prior_mean={} sigma_f2={} sigma_n2={} length_scale={}",
        fit.prior_mean_used, h.sigma_f2, h.sigma_n2, h.length_scale
    );
    out.push_str("t,mean,var\n");
    for ((t, m), v) in fit.grid.iter().zip(&fit.mean_on_grid).zip(&fit.var_on_grid) {
        let _ = writeln!(out, "{t},{m},{v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn h(sf: f64, sn: f64) -> GpHyperparameters {
        GpHyperparameters::new(sf, sn, DEFAULT_LENGTH_SCALE).unwrap()
    }

    #[test]
    fn kernel_on_diagonal_adds_noise() {
        let hp = h(0.04, 0.01);
        assert_relative_eq!(kernel(3.0, 3.0, &hp), 0.05, epsilon = 1e-15);
    }

    #[test]
    fn kernel_at_one_length_scale() {
        let hp = h(0.04, 0.01);
        assert_relative_eq!(kernel(0.0, 140.0, &hp), 0.04 * (-0.5f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(kernel(140.0, 0.0, &hp), 0.04 * (-0.5f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn kernel_decays_far_away() {
        let hp = h(0.04, 0.01);
        let k = kernel(0.0, 1400.0, &hp);
        assert!(k <= 0.04 * (-50f64).exp() * (1.0 + 1e-12));
        assert!(k < 1e-22);
    }

    fn span_curve(span: f64, y: &[f64]) -> Lightcurve {
        let n = y.len();
        let t: Vec<f64> = (0..n).map(|i| span * i as f64 / (n - 1) as f64).collect();
        Lightcurve::from_arrays("c", &t, y, &vec![0.1; n])
    }

    #[test]
    fn short_curve_uses_detection_limit() {
        let lc = span_curve(90.0, &[17.0, 18.0, 19.0, 18.5, 17.5]);
        assert_eq!(select_prior_mean(&lc, &PriorMeanRule::default()), 20.5);
    }

    #[test]
    fn long_curve_uses_median() {
        let lc = span_curve(800.0, &[17.0, 19.0, 18.0]);
        assert_eq!(select_prior_mean(&lc, &PriorMeanRule::default()), 18.0);
        let lc = span_curve(800.0, &[17.0, 19.0, 18.0, 20.0]);
        assert_eq!(select_prior_mean(&lc, &PriorMeanRule::default()), 18.5);
    }

    #[test]
    fn exactly_one_year_uses_median() {
        let lc = span_curve(365.0, &[17.0, 18.0, 19.0]);
        assert_eq!(select_prior_mean(&lc, &PriorMeanRule::default()), 18.0);
    }

    fn with_variance(id: &str, var: f64, label: &str) -> Lightcurve {
        // y = [-a, 0, a] has sample variance a².
        let a = var.sqrt();
        Lightcurve::from_arrays(id, &[0.0, 1.0, 2.0], &[18.0 - a, 18.0, 18.0 + a], &[0.1; 3]).with_label(label)
    }

    #[test]
    fn hyperparameters_from_reference() {
        let refs = vec![
            with_variance("a", 0.01, "non-transient"),
            with_variance("b", 0.09, "Non-Transient"),
            with_variance("c", 0.04, "non-transient"),
            with_variance("d", 4.0, "SNe"),
        ];
        let hp = estimate_hyperparameters(&refs, 140.0).unwrap();
        assert_relative_eq!(hp.sigma_f2, 0.04, max_relative = 1e-12);
        assert_relative_eq!(hp.sigma_n2, 0.01, max_relative = 1e-12);
        assert_eq!(hp.length_scale, 140.0);
    }

    #[test]
    fn hyperparameters_need_non_transients() {
        let refs = vec![with_variance("d", 4.0, "SNe")];
        assert_eq!(estimate_hyperparameters(&refs, 140.0), Err(GpError::NoNonTransients));
    }

    #[test]
    fn noise_free_fit_interpolates() {
        let t = [0.0, 150.0, 420.0, 700.0, 1000.0, 1300.0];
        let y = [18.0, 18.4, 17.7, 18.9, 18.1, 18.3];
        let lc = Lightcurve::from_arrays("c", &t, &y, &[0.1; 6]);
        let fit = fit_with_prior(&lc, &h(0.5, 0.0), 18.2, 300).unwrap();
        for (f, y) in fit.mean_at_obs.iter().zip(&y) {
            assert!((f - y).abs() < 1e-6, "{f} vs {y}");
        }
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-6));
    }

    #[test]
    fn reverts_to_prior_far_from_data() {
        let t = [0.0, 10.0, 20.0, 30.0, 5000.0];
        let y = [17.0, 17.5, 16.8, 17.2, 17.1];
        let lc = Lightcurve::from_arrays("c", &t, &y, &[0.1; 5]);
        let hp = h(0.25, 0.01);
        let fit = fit_with_prior(&lc, &hp, 20.5, 300).unwrap();
        for (u, f) in fit.grid.iter().zip(&fit.mean_on_grid) {
            if t.iter().all(|x| (u - x).abs() >= 1400.0) {
                assert!((f - 20.5).abs() < 1e-6 * hp.sigma_f2.sqrt());
            }
        }
    }

    #[test]
    fn duplicate_times_are_factorizable() {
        let t = [0.0, 0.0, 0.0, 5.0, 5.0];
        let y = [18.0, 18.1, 17.9, 18.3, 18.2];
        let lc = Lightcurve::from_arrays("c", &t, &y, &[0.1; 5]);
        let fit = fit_with_prior(&lc, &h(0.04, 0.0), 18.0, 50).unwrap();
        assert!(fit.mean_on_grid.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn zero_span_is_degenerate() {
        let lc = Lightcurve::from_arrays("c", &[1.0; 5], &[18.0; 5], &[0.1; 5]);
        assert_eq!(
            fit_with_prior(&lc, &h(0.04, 0.01), 18.0, 300).unwrap_err(),
            GpError::DegenerateSpan
        );
    }

    #[test]
    fn grid_has_requested_size_and_ends() {
        let g = even_grid(1.5, 10.0, 300);
        assert_eq!(g.len(), 300);
        assert_eq!(g[0], 1.5);
        assert_eq!(g[299], 10.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn derivative_of_linear_and_constant() {
        let u = even_grid(0.0, 500.0, 300);
        let f: Vec<f64> = u.iter().map(|u| 3.0 + 0.02 * u).collect();
        let d = finite_difference(&u, &f).unwrap();
        assert_eq!(d.len(), 300);
        assert!(d.iter().all(|d| (d - 0.02).abs() < 1e-12));
        let d = finite_difference(&u, &vec![18.0; 300]).unwrap();
        assert!(d.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn derivative_of_sine_within_truncation_bound() {
        let u = even_grid(0.0, 600.0, 300);
        let step = u[1] - u[0];
        let f: Vec<f64> = u.iter().map(|u| (u / 50.0).sin()).collect();
        let d = finite_difference(&u, &f).unwrap();
        // Central difference error is step²/6 · max|f'''| = step²/6 / 50³.
        let bound = step * step / 6.0 / 50f64.powi(3) * 1.01 + 1e-13;
        for j in 1..299 {
            let exact = (u[j] / 50.0).cos() / 50.0;
            assert!((d[j] - exact).abs() <= bound, "j={j}");
        }
    }

    #[test]
    fn hyperparameters_round_trip_kv() {
        let hp = h(0.0437, 0.0123);
        let kv = KvMap::parse(&hp.to_kv().to_text()).unwrap();
        assert_eq!(GpHyperparameters::from_kv(&kv).unwrap(), hp);
    }

    #[test]
    fn dump_has_header_and_m_rows() {
        let t = [0.0, 80.0, 160.0, 240.0, 320.0];
        let lc = Lightcurve::from_arrays("c", &t, &[18.0; 5], &[0.1; 5]);
        let hp = h(0.04, 0.01);
        let fit = fit_posterior(&lc, &hp, &PriorMeanRule::default(), 300).unwrap();
        let dump = write_fit_dump("c", &fit, &hp);
        let lines: Vec<&str> = dump.lines().collect();
        assert!(lines[0].contains("prior_mean=20.5"));
        assert_eq!(lines[1], "t,mean,var");
        assert_eq!(lines.len(), 302);
    }
}
