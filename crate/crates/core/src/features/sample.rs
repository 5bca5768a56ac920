//! Measures computed directly on the observed magnitudes.

use crate::lightcurve::Lightcurve;
use crate::stats::{median, std_normal_pdf};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleMeasures {
    pub shov: f64,
    pub maxdiff: f64,
    pub dscore: f64,
}

pub fn sample_measures(lc: &Lightcurve) -> SampleMeasures {
    let y = lc.mags();
    let s = lc.errors();
    let n = y.len() as f64;
    let (sum, max) = y.windows(2).map(|w| (w[1] - w[0]).abs()).fold((0.0, 0.0f64), |(s, m), d| (s + d, m.max(d)));
    let med = median(&y);
    let dscore = y
        .iter()
        .zip(&s)
        .map(|(y, s)| std_normal_pdf((y - med) / s))
        .sum::<f64>()
        / n;
    SampleMeasures {
        shov: sum / n,
        maxdiff: max,
        dscore,
    }
}
