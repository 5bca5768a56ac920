//! Classification measures and feature-vector assembly.
//!
//! Two feature sets exist: the sixteen-measure sample-statistic baseline
//! (`richards`) and `full`, which appends eleven model, visit and sample
//! measures. Heavy-tailed nonnegative measures are log-transformed as
//! `ln(x + 1e-6)` during assembly.

mod curve;
mod group;
mod richards;
mod sample;

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

pub use curve::{curve_measures, outlier_measure, CurveMeasures};
pub use group::{group_measures, group_stats, GroupMeasures, GroupNormalization, GroupStats, SIGMA_FLOOR};
pub use richards::{richards_measures, RichardsMeasures, MIN_DT, PAIRSLOPE_WINDOW};
pub use sample::{sample_measures, SampleMeasures};

use crate::error::FeatureError;
use crate::gp::{fit_posterior, GpFit, GpHyperparameters, PriorMeanRule};
use crate::lightcurve::{group_observations, DatasetConfig, Lightcurve, ObservationGroup};

pub const RICHARDS_NAMES: [&str; 16] = [
    "skew",
    "kurtosis",
    "std",
    "beyond1std",
    "amplitude",
    "maxslope",
    "mad",
    "medbuf",
    "pairslope",
    "rcorbor",
    "fpr20",
    "fpr35",
    "fpr50",
    "fpr80",
    "peramp",
    "pdfp",
];

/// Measures appended to the baseline by the `full` set, in canonical order.
pub const MODEL_NAMES: [&str; 11] = [
    "totvar", "quadvar", "famp", "fslope", "outl", "lsd", "gtvar", "gscore", "shov", "maxdiff", "dscore",
];

pub const LOG_TRANSFORMED: [&str; 14] = [
    "totvar",
    "quadvar",
    "famp",
    "fslope",
    "outl",
    "gtvar",
    "shov",
    "maxdiff",
    "std",
    "amplitude",
    "mad",
    "maxslope",
    "peramp",
    "pdfp",
];

pub const LOG_OFFSET: f64 = 1e-6;

pub fn is_log_transformed(name: &str) -> bool {
    LOG_TRANSFORMED.contains(&name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureSet {
    Richards,
    Full,
}

impl FeatureSet {
    pub fn names(self) -> Vec<&'static str> {
        match self {
            FeatureSet::Richards => RICHARDS_NAMES.to_vec(),
            FeatureSet::Full => RICHARDS_NAMES.iter().chain(MODEL_NAMES.iter()).copied().collect(),
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureSet::Richards => "richards",
            FeatureSet::Full => "full",
        })
    }
}

impl FromStr for FeatureSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "richards" => Ok(FeatureSet::Richards),
            "full" => Ok(FeatureSet::Full),
            other => Err(format!("unknown feature set {other:?} (expected richards or full)")),
        }
    }
}

/// Transformed measures for one curve in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub curve_id: String,
    pub tag: FeatureSet,
    values: Vec<(&'static str, f64)>,
}

impl FeatureVector {
    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.values.iter().map(|(n, _)| *n)
    }

    pub fn values(&self) -> Vec<f64> {
        self.values.iter().map(|(_, v)| *v).collect()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Untransformed measures of the `full` set, canonical order.
pub fn raw_measures(
    lc: &Lightcurve,
    fit: &GpFit,
    groups: &[ObservationGroup],
    norm: GroupNormalization,
) -> Vec<(&'static str, f64)> {
    let mut out: Vec<(&'static str, f64)> = richards_measures(lc).named().to_vec();
    let c = curve_measures(fit);
    let g = group_measures(lc, groups, norm);
    let s = sample_measures(lc);
    out.extend([
        ("totvar", c.totvar),
        ("quadvar", c.quadvar),
        ("famp", c.famp),
        ("fslope", c.fslope),
        ("outl", outlier_measure(fit)),
        ("lsd", g.lsd),
        ("gtvar", g.gtvar),
        ("gscore", g.gscore),
        ("shov", s.shov),
        ("maxdiff", s.maxdiff),
        ("dscore", s.dscore),
    ]);
    out
}

fn finish(id: &str, tag: FeatureSet, raw: Vec<(&'static str, f64)>) -> Result<FeatureVector, FeatureError> {
    let values = raw
        .into_iter()
        .map(|(name, v)| {
            let v = if is_log_transformed(name) { (v + LOG_OFFSET).ln() } else { v };
            if v.is_finite() {
                Ok((name, v))
            } else {
                Err(FeatureError::NonFiniteMeasure {
                    id: id.to_string(),
                    measure: name,
                    value: v,
                })
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(FeatureVector {
        curve_id: id.to_string(),
        tag,
        values,
    })
}

/// Concatenates, transforms and checks the measures of `tag`.
pub fn assemble_features(
    lc: &Lightcurve,
    fit: &GpFit,
    groups: &[ObservationGroup],
    tag: FeatureSet,
    norm: GroupNormalization,
) -> Result<FeatureVector, FeatureError> {
    let mut raw = raw_measures(lc, fit, groups, norm);
    raw.truncate(tag.names().len());
    finish(&lc.id, tag, raw)
}

/// Everything needed to turn a validated curve into a feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionConfig {
    pub dataset: DatasetConfig,
    pub hyper: GpHyperparameters,
    pub prior: PriorMeanRule,
    pub grid_size: usize,
    pub tag: FeatureSet,
    pub group_norm: GroupNormalization,
}

impl ExtractionConfig {
    pub fn new(hyper: GpHyperparameters, tag: FeatureSet) -> Self {
        let dataset = DatasetConfig::default();
        Self {
            prior: PriorMeanRule {
                detection_limit: dataset.detection_limit,
                ..PriorMeanRule::default()
            },
            dataset,
            hyper,
            grid_size: crate::gp::DEFAULT_GRID_SIZE,
            tag,
            group_norm: GroupNormalization::default(),
        }
    }

    /// Provenance sidecar: feature set, transforms and model settings.
    pub fn provenance(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "feature_set={}", self.tag);
        let _ = writeln!(out, "log_transform={}", LOG_TRANSFORMED.join(","));
        let _ = writeln!(out, "log_offset={LOG_OFFSET}");
        out.push_str(&self.hyper.to_kv().to_text());
        let _ = writeln!(out, "detection_limit={}", self.prior.detection_limit);
        let _ = writeln!(out, "span_threshold={}", self.prior.span_threshold);
        let _ = writeln!(out, "grid_size={}", self.grid_size);
        let _ = writeln!(out, "grouping_gap={}", self.dataset.grouping_gap);
        let _ = writeln!(
            out,
            "group_normalization={}",
            match self.group_norm {
                GroupNormalization::Observations => "observations",
                GroupNormalization::Groups => "groups",
            }
        );
        out
    }
}

/// Feature vector for one validated curve. The GP is only fitted when the
/// feature set needs it.
pub fn extract_features(lc: &Lightcurve, cfg: &ExtractionConfig) -> Result<FeatureVector, FeatureError> {
    match cfg.tag {
        FeatureSet::Richards => finish(&lc.id, FeatureSet::Richards, richards_measures(lc).named().to_vec()),
        FeatureSet::Full => {
            let fit = fit_posterior(lc, &cfg.hyper, &cfg.prior, cfg.grid_size)?;
            let groups = group_observations(lc, cfg.dataset.grouping_gap);
            assemble_features(lc, &fit, &groups, FeatureSet::Full, cfg.group_norm)
        }
    }
}

/// Extracts features for many curves, in input order. Runs on the rayon
/// pool when the `parallel` feature is enabled.
pub fn extract_batch(curves: &[Lightcurve], cfg: &ExtractionConfig) -> Vec<Result<FeatureVector, FeatureError>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        curves.par_iter().map(|lc| extract_features(lc, cfg)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        curves.iter().map(|lc| extract_features(lc, cfg)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::fit_with_prior;

    fn demo_curve() -> Lightcurve {
        let t = [0.0, 0.007, 0.014, 40.0, 40.007, 120.0, 300.0, 300.01, 500.0];
        let y = [18.0, 18.1, 17.9, 18.6, 18.4, 17.2, 18.0, 18.3, 18.1];
        Lightcurve::from_arrays("demo", &t, &y, &[0.1; 9])
    }

    fn hyper() -> GpHyperparameters {
        GpHyperparameters::new(0.04, 0.01, 140.0).unwrap()
    }

    #[test]
    fn richards_tag_has_sixteen_entries() {
        let cfg = ExtractionConfig::new(hyper(), FeatureSet::Richards);
        let fv = extract_features(&demo_curve(), &cfg).unwrap();
        assert_eq!(fv.len(), 16);
        assert_eq!(fv.names().collect::<Vec<_>>(), RICHARDS_NAMES.to_vec());
    }

    #[test]
    fn full_tag_has_twenty_seven_entries() {
        let cfg = ExtractionConfig::new(hyper(), FeatureSet::Full);
        let fv = extract_features(&demo_curve(), &cfg).unwrap();
        assert_eq!(fv.len(), 27);
        assert_eq!(fv.names().collect::<Vec<_>>(), FeatureSet::Full.names());
    }

    #[test]
    fn zero_amplitude_fit_is_floored() {
        let lc = Lightcurve::from_arrays("flat", &[0.0, 100.0, 200.0, 300.0, 400.0], &[18.0; 5], &[0.1; 5]);
        let fit = fit_with_prior(&lc, &hyper(), 18.0, 300).unwrap();
        let groups = group_observations(&lc, 0.02);
        let fv = assemble_features(&lc, &fit, &groups, FeatureSet::Full, GroupNormalization::Observations).unwrap();
        assert!((fv.get("famp").unwrap() - LOG_OFFSET.ln()).abs() < 1e-9);
    }

    #[test]
    fn non_finite_measure_is_an_error() {
        // Median magnitude 0 makes peramp a division by zero.
        let lc = Lightcurve::from_arrays("z", &[0.0, 1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 0.0, 0.0, 1.0], &[0.1; 5]);
        let cfg = ExtractionConfig::new(hyper(), FeatureSet::Richards);
        let err = extract_features(&lc, &cfg).unwrap_err();
        assert!(matches!(err, FeatureError::NonFiniteMeasure { measure: "peramp", .. }));
    }

    #[test]
    fn feature_set_parses() {
        assert_eq!("full".parse::<FeatureSet>().unwrap(), FeatureSet::Full);
        assert!("all".parse::<FeatureSet>().is_err());
    }

    #[test]
    fn provenance_lists_transforms() {
        let text = ExtractionConfig::new(hyper(), FeatureSet::Full).provenance();
        assert!(text.contains("log_transform=totvar,quadvar"));
        assert!(text.contains("sigma_f2=0.04"));
    }
}
