mod common;

use lcmodel::gp::{fit_posterior, fit_with_prior, GpHyperparameters, PriorMeanRule, DEFAULT_GRID_SIZE};
use lcmodel::lightcurve::Lightcurve;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{oracle_posterior, random_curve};

fn curve_and_hyper(seed: u64, n_max: usize) -> (Lightcurve, GpHyperparameters) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(5..=n_max);
    let span = rng.random_range(20.0..2000.0);
    let lc = random_curve(&mut rng, "p", n, span);
    let h = GpHyperparameters::new(
        rng.random_range(0.01..0.5),
        rng.random_range(0.001..0.1),
        rng.random_range(20.0..400.0),
    )
    .unwrap();
    (lc, h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_extended_precision_oracle(seed in any::<u64>()) {
        let (lc, h) = curve_and_hyper(seed, 40);
        let fit = fit_posterior(&lc, &h, &PriorMeanRule::default(), 60).unwrap();
        let (mean, var) = oracle_posterior(
            &lc.times(), &lc.mags(), h.sigma_f2, h.sigma_n2, h.length_scale, fit.prior_mean_used, &fit.grid,
        );
        for j in 0..mean.len() {
            prop_assert!((mean[j] - fit.mean_on_grid[j]).abs() < 1e-8);
            prop_assert!((var[j] - fit.var_on_grid[j]).abs() < 1e-7);
        }
    }

    #[test]
    fn variance_is_bounded_by_the_prior(seed in any::<u64>()) {
        let (lc, h) = curve_and_hyper(seed, 120);
        let fit = fit_posterior(&lc, &h, &PriorMeanRule::default(), DEFAULT_GRID_SIZE).unwrap();
        for v in &fit.var_on_grid {
            prop_assert!(*v >= 0.0 && *v <= h.sigma_f2 + 1e-9, "{v}");
        }
    }

    #[test]
    fn magnitude_shift_moves_the_mean_with_a_matching_prior(seed in any::<u64>(), c in -5.0f64..5.0) {
        let (lc, h) = curve_and_hyper(seed, 80);
        let psi = 18.0;
        let a = fit_with_prior(&lc, &h, psi, DEFAULT_GRID_SIZE).unwrap();
        let b = fit_with_prior(&lc.shifted_mags(c), &h, psi + c, DEFAULT_GRID_SIZE).unwrap();
        for j in 0..a.grid.len() {
            prop_assert!((a.mean_on_grid[j] + c - b.mean_on_grid[j]).abs() < 1e-10);
            prop_assert!((a.var_on_grid[j] - b.var_on_grid[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn time_translation_moves_the_grid(seed in any::<u64>(), dt in -1000.0f64..1000.0) {
        let (lc, h) = curve_and_hyper(seed, 80);
        let rule = PriorMeanRule::default();
        let a = fit_posterior(&lc, &h, &rule, DEFAULT_GRID_SIZE).unwrap();
        let b = fit_posterior(&lc.shifted_times(dt), &h, &rule, DEFAULT_GRID_SIZE).unwrap();
        prop_assert_eq!(a.prior_mean_used, b.prior_mean_used);
        for j in 0..a.grid.len() {
            prop_assert!((a.grid[j] + dt - b.grid[j]).abs() < 1e-8);
            prop_assert!((a.mean_on_grid[j] - b.mean_on_grid[j]).abs() < 1e-7);
        }
    }
}

#[test]
fn mean_reverts_far_from_data() {
    let h = GpHyperparameters::new(0.2, 0.01, 140.0).unwrap();
    let t = [0.0, 1.0, 2.0, 3.0, 4.0, 5000.0, 5001.0, 5002.0, 5003.0, 5004.0];
    let y = [17.0, 17.1, 17.2, 17.1, 17.0, 16.8, 16.9, 17.0, 16.9, 16.8];
    let lc = Lightcurve::from_arrays("r", &t, &y, &[0.1; 10]);
    let fit = fit_with_prior(&lc, &h, 19.0, DEFAULT_GRID_SIZE).unwrap();
    let mid = fit.grid.iter().position(|&u| u > 2400.0).unwrap();
    assert!((fit.mean_on_grid[mid] - 19.0).abs() < 1e-9);
    assert!((fit.var_on_grid[mid] - 0.2).abs() < 1e-9);
}

#[test]
fn censored_rows_do_not_enter_the_fit() {
    let h = GpHyperparameters::new(0.1, 0.01, 140.0).unwrap();
    let t = [0.0, 50.0, 100.0, 150.0, 200.0];
    let y = [17.0, 17.5, 17.2, 17.8, 17.1];
    let lc = Lightcurve::from_arrays("c", &t, &y, &[0.1; 5]);
    let mut obs = lc.observations().to_vec();
    obs.push(lcmodel::lightcurve::Observation { t: 120.0, y: 20.5, s: 0.1, censored: true });
    let with_censored = Lightcurve::new("c", None, obs);
    let a = fit_posterior(&lc, &h, &PriorMeanRule::default(), 100).unwrap();
    let b = fit_posterior(&with_censored, &h, &PriorMeanRule::default(), 100).unwrap();
    assert_eq!(a.mean_on_grid, b.mean_on_grid);
}
