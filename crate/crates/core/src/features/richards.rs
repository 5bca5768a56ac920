//! The sixteen sample-statistic baseline measures.
//!
//! Percentiles interpolate linearly between order statistics and any 0/0
//! ratio evaluates to 0.

use crate::lightcurve::Lightcurve;
use crate::stats::{mean, median_sorted, percentile_sorted, ratio, sample_variance, sorted};

/// Smallest time step used when computing slopes (days).
pub const MIN_DT: f64 = 1e-6;
/// Number of trailing successive pairs examined by `pairslope`.
pub const PAIRSLOPE_WINDOW: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RichardsMeasures {
    pub skew: f64,
    pub kurtosis: f64,
    pub std: f64,
    pub beyond1std: f64,
    pub amplitude: f64,
    pub maxslope: f64,
    pub mad: f64,
    pub medbuf: f64,
    pub pairslope: f64,
    pub rcorbor: f64,
    pub fpr20: f64,
    pub fpr35: f64,
    pub fpr50: f64,
    pub fpr80: f64,
    pub peramp: f64,
    pub pdfp: f64,
}

impl RichardsMeasures {
    pub fn named(&self) -> [(&'static str, f64); 16] {
        [
            ("skew", self.skew),
            ("kurtosis", self.kurtosis),
            ("std", self.std),
            ("beyond1std", self.beyond1std),
            ("amplitude", self.amplitude),
            ("maxslope", self.maxslope),
            ("mad", self.mad),
            ("medbuf", self.medbuf),
            ("pairslope", self.pairslope),
            ("rcorbor", self.rcorbor),
            ("fpr20", self.fpr20),
            ("fpr35", self.fpr35),
            ("fpr50", self.fpr50),
            ("fpr80", self.fpr80),
            ("peramp", self.peramp),
            ("pdfp", self.pdfp),
        ]
    }
}

pub fn richards_measures(lc: &Lightcurve) -> RichardsMeasures {
    let t = lc.times();
    let y = lc.mags();
    let n = y.len() as f64;
    let s = sorted(&y);
    let mu = mean(&y);
    let med = median_sorted(&s);

    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in &y {
        let d = v - mu;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let std = sample_variance(&y).sqrt();

    let lo = s[0];
    let hi = s[s.len() - 1];
    let amplitude = (hi - lo) / 2.0;

    let maxslope = t
        .windows(2)
        .zip(y.windows(2))
        .map(|(tw, yw)| ((yw[1] - yw[0]) / (tw[1] - tw[0]).max(MIN_DT)).abs())
        .fold(0.0f64, f64::max);

    let abs_dev = sorted(&y.iter().map(|v| (v - med).abs()).collect::<Vec<_>>());
    let mad = median_sorted(&abs_dev);

    let frac = |pred: &dyn Fn(f64) -> bool| y.iter().filter(|&&v| pred(v)).count() as f64 / n;
    let beyond1std = frac(&|v| (v - mu).abs() > std);
    let medbuf = frac(&|v| (v - med).abs() <= 0.1 * amplitude);
    let rcorbor = frac(&|v| v > med + 1.5);

    let first_pair = y.len().saturating_sub(PAIRSLOPE_WINDOW + 1);
    let pairs: Vec<bool> = t[first_pair..]
        .windows(2)
        .zip(y[first_pair..].windows(2))
        .map(|(tw, yw)| (yw[1] - yw[0]) / (tw[1] - tw[0]).max(MIN_DT) > 0.0)
        .collect();
    let pairslope = ratio(pairs.iter().filter(|&&p| p).count() as f64, pairs.len() as f64);

    let p = |q: f64| percentile_sorted(&s, q);
    let mid_range = p(97.5) - p(2.5);
    let fpr = |k: f64| ratio(p(50.0 + k / 2.0) - p(50.0 - k / 2.0), mid_range);

    RichardsMeasures {
        skew: ratio(m3, m2.powf(1.5)),
        kurtosis: ratio(m4 - 3.0 * m2 * m2, m2 * m2),
        std,
        beyond1std,
        amplitude,
        maxslope,
        mad,
        medbuf,
        pairslope,
        rcorbor,
        fpr20: fpr(20.0),
        fpr35: fpr(35.0),
        fpr50: fpr(50.0),
        fpr80: fpr(80.0),
        peramp: ratio(hi - lo, med),
        pdfp: ratio(p(95.0) - p(5.0), med),
    }
}
