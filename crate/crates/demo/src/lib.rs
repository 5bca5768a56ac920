//! Browser bindings: simulate a curve, fit its posterior, list its measures.
//! Results cross the boundary as JSON strings.

use lcmodel::benchmark::generate_benchmark;
use lcmodel::features::{extract_features, ExtractionConfig, FeatureSet};
use lcmodel::gp::{fit_posterior, GpHyperparameters, PriorMeanRule};
use lcmodel::lightcurve::{Lightcurve, Observation};
use lcmodel::synth::CurveKind;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct SimulatedCurve {
    label: String,
    t: Vec<f64>,
    y: Vec<f64>,
    s: Vec<f64>,
    censored: Vec<bool>,
    truth: Vec<f64>,
}

#[derive(Serialize)]
struct FitResult {
    prior_mean: f64,
    grid: Vec<f64>,
    mean: Vec<f64>,
    var: Vec<f64>,
}

#[derive(Serialize)]
struct Measure {
    name: &'static str,
    value: f64,
}

fn curve(t: &[f64], y: &[f64], s: &[f64], censored: &[u8]) -> Result<Lightcurve, String> {
    if t.len() != y.len() || t.len() != s.len() || t.len() != censored.len() {
        return Err("t, y, s and censored must have equal lengths".into());
    }
    let obs = (0..t.len())
        .map(|i| Observation {
            t: t[i],
            y: y[i],
            s: s[i],
            censored: censored[i] != 0,
        })
        .collect();
    Ok(Lightcurve::new("demo", None, obs))
}

fn hyper(sigma_f2: f64, sigma_n2: f64, length_scale: f64) -> Result<GpHyperparameters, String> {
    GpHyperparameters::new(sigma_f2, sigma_n2, length_scale).map_err(|e| e.to_string())
}

/// One benchmark curve of `kind` (flat, burst, stochastic, periodic).
pub fn simulate(kind: &str, seed: u32) -> Result<String, String> {
    let kind: CurveKind = kind.parse()?;
    let g = generate_benchmark(1, u64::from(seed))
        .into_iter()
        .find(|g| g.spec.kind == kind)
        .expect("one curve per kind");
    let obs = g.lc.observations();
    let out = SimulatedCurve {
        label: g.lc.label.clone().unwrap_or_default(),
        t: obs.iter().map(|o| o.t).collect(),
        y: obs.iter().map(|o| o.y).collect(),
        s: obs.iter().map(|o| o.s).collect(),
        censored: obs.iter().map(|o| o.censored).collect(),
        truth: g.truth,
    };
    Ok(serde_json::to_string(&out).expect("serializable"))
}

/// Posterior mean and variance on an even grid over the detections.
pub fn fit(
    t: &[f64],
    y: &[f64],
    s: &[f64],
    censored: &[u8],
    sigma_f2: f64,
    sigma_n2: f64,
    length_scale: f64,
    grid_size: usize,
) -> Result<String, String> {
    let lc = curve(t, y, s, censored)?;
    let h = hyper(sigma_f2, sigma_n2, length_scale)?;
    let f = fit_posterior(&lc, &h, &PriorMeanRule::default(), grid_size).map_err(|e| e.to_string())?;
    let out = FitResult {
        prior_mean: f.prior_mean_used,
        grid: f.grid,
        mean: f.mean_on_grid,
        var: f.var_on_grid,
    };
    Ok(serde_json::to_string(&out).expect("serializable"))
}

/// The full set of transformed measures.
pub fn measures(
    t: &[f64],
    y: &[f64],
    s: &[f64],
    censored: &[u8],
    sigma_f2: f64,
    sigma_n2: f64,
    length_scale: f64,
) -> Result<String, String> {
    let lc = curve(t, y, s, censored)?;
    let cfg = ExtractionConfig::new(hyper(sigma_f2, sigma_n2, length_scale)?, FeatureSet::Full);
    let fv = extract_features(&lc, &cfg).map_err(|e| e.to_string())?;
    let out: Vec<Measure> = fv.names().zip(fv.values()).map(|(name, value)| Measure { name, value }).collect();
    Ok(serde_json::to_string(&out).expect("serializable"))
}

#[wasm_bindgen(js_name = simulateCurve)]
pub fn simulate_curve(kind: &str, seed: u32) -> Result<String, JsError> {
    simulate(kind, seed).map_err(|e| JsError::new(&e))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen(js_name = fitCurve)]
pub fn fit_curve(
    t: &[f64],
    y: &[f64],
    s: &[f64],
    censored: &[u8],
    sigma_f2: f64,
    sigma_n2: f64,
    length_scale: f64,
    grid_size: usize,
) -> Result<String, JsError> {
    fit(t, y, s, censored, sigma_f2, sigma_n2, length_scale, grid_size).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = curveMeasures)]
pub fn curve_measures(
    t: &[f64],
    y: &[f64],
    s: &[f64],
    censored: &[u8],
    sigma_f2: f64,
    sigma_n2: f64,
    length_scale: f64,
) -> Result<String, JsError> {
    measures(t, y, s, censored, sigma_f2, sigma_n2, length_scale).map_err(|e| JsError::new(&e))
}
