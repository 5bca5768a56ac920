//! Seeded four-kind synthetic benchmark with survey-like cadence: sparse
//! visits of up to four exposures, a yearly observing gap and censoring at
//! the detection limit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::LabeledDataset;
use crate::error::Error;
use crate::features::{extract_batch, ExtractionConfig, FeatureSet};
use crate::gp::{estimate_hyperparameters, GpHyperparameters, DEFAULT_LENGTH_SCALE};
use crate::lightcurve::{validate, DatasetConfig, Lightcurve};
use crate::synth::{
    generate_cadence, generate_curve, AnnualGap, CadenceSpec, ClassSpec, CurveKind, ErrorModel, GeneratedCurve,
    YEAR_DAYS,
};

pub const DEFAULT_CURVES_PER_KIND: usize = 500;
const GAP_LENGTH: f64 = 120.0;
const MAX_ATTEMPTS: usize = 1000;
/// Offset between a benchmark seed and the seed of its reference set.
const REFERENCE_SEED_OFFSET: u64 = 0x5EED_0000;

fn uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    uniform(rng, lo.ln(), hi.ln()).exp()
}

fn random_cadence<R: Rng>(rng: &mut R) -> CadenceSpec {
    CadenceSpec {
        n_nights: log_uniform(rng, 6.0, 40.0).round() as usize,
        exposures_per_night: 4,
        annual_gap: Some(AnnualGap {
            start_day: uniform(rng, 0.0, YEAR_DAYS - GAP_LENGTH - 5.0),
            length_days: GAP_LENGTH,
        }),
        total_span: uniform(rng, 200.0, 2800.0),
        ..CadenceSpec::default()
    }
}

fn random_class<R: Rng>(kind: CurveKind, rng: &mut R) -> ClassSpec {
    let level = log_uniform(rng, 0.05, 0.2);
    let errors = ErrorModel {
        lo: level,
        hi: 1.5 * level,
    };
    let spec = match kind {
        CurveKind::Flat => ClassSpec::new(kind, 0.0, 1.0, uniform(rng, 14.0, 19.5)),
        CurveKind::Burst => ClassSpec::burst(uniform(rng, 1.5, 4.0), uniform(rng, 10.0, 60.0)),
        CurveKind::Stochastic => ClassSpec::new(
            kind,
            log_uniform(rng, 0.1, 0.6),
            uniform(rng, 60.0, 300.0),
            uniform(rng, 15.0, 19.0),
        ),
        CurveKind::Periodic => ClassSpec::new(
            kind,
            uniform(rng, 0.15, 0.6),
            uniform(rng, 0.3, 0.9),
            uniform(rng, 14.0, 18.5),
        ),
    };
    ClassSpec { errors, ..spec }
}

/// `curves_per_kind` validated curves of each kind, kind-major. Draws that
/// leave too few detections are redrawn.
pub fn generate_benchmark(curves_per_kind: usize, seed: u64) -> Vec<GeneratedCurve> {
    let config = DatasetConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(4 * curves_per_kind);
    for kind in CurveKind::ALL {
        for i in 0..curves_per_kind {
            let id = format!("{kind}-{i:04}");
            let curve = (0..MAX_ATTEMPTS)
                .find_map(|_| {
                    let cadence = random_cadence(&mut rng);
                    let spec = random_class(kind, &mut rng);
                    let times = generate_cadence(&cadence, rng.random()).ok()?;
                    let mut g = generate_curve(&id, &spec, &times, rng.random()).ok()?;
                    g.lc = validate(g.lc, &config).ok()?;
                    Some(g)
                })
                .expect("benchmark parameters admit valid curves");
            out.push(curve);
        }
    }
    out
}

/// A benchmark sample plus hyperparameters estimated on an independently
/// seeded reference sample.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub curves: Vec<GeneratedCurve>,
    pub hyper: GpHyperparameters,
}

impl Benchmark {
    pub fn generate(curves_per_kind: usize, seed: u64) -> Self {
        let reference: Vec<Lightcurve> = generate_benchmark(curves_per_kind.clamp(20, 200), seed ^ REFERENCE_SEED_OFFSET)
            .into_iter()
            .map(|g| g.lc)
            .collect();
        let hyper = estimate_hyperparameters(&reference, DEFAULT_LENGTH_SCALE)
            .expect("reference sample contains flat curves");
        Self {
            curves: generate_benchmark(curves_per_kind, seed),
            hyper,
        }
    }

    pub fn lightcurves(&self) -> Vec<Lightcurve> {
        self.curves.iter().map(|g| g.lc.clone()).collect()
    }

    pub fn dataset(&self, tag: FeatureSet) -> Result<LabeledDataset, Error> {
        let cfg = ExtractionConfig::new(self.hyper, tag);
        let curves = self.lightcurves();
        let rows = extract_batch(&curves, &cfg)
            .into_iter()
            .zip(&curves)
            .map(|(fv, lc)| Ok((fv?, lc.label.clone().unwrap_or_default())))
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(LabeledDataset::from_vectors(&rows)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_benchmark_is_valid_and_deterministic() {
        let a = generate_benchmark(5, 1);
        assert_eq!(a.len(), 20);
        assert!(a.iter().all(|g| g.lc.detected().count() >= 5));
        assert_eq!(a, generate_benchmark(5, 1));
        let labels: Vec<_> = a.iter().map(|g| g.lc.label.clone().unwrap()).collect();
        assert_eq!(labels[0], "non-transient");
        assert_eq!(labels[19], "RR-Lyrae");
    }

    #[test]
    fn dataset_has_one_row_per_curve() {
        let b = Benchmark::generate(5, 2);
        let ds = b.dataset(FeatureSet::Full).unwrap();
        assert_eq!(ds.len(), 20);
        assert_eq!(ds.n_features(), 27);
        assert_eq!(ds.class_names.len(), 4);
    }
}
