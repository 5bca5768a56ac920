//! Labeled synthetic lightcurves with survey-like cadence, reported errors
//! and detection-limit censoring.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::SynthError;
use crate::gp::{Kernel, SquaredExponential};
use crate::lightcurve::{Lightcurve, Observation};

pub const YEAR_DAYS: f64 = 365.25;
/// Ten minutes in days.
pub const TEN_MINUTES: f64 = 10.0 / (24.0 * 60.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnualGap {
    /// Day of year (from the start of each year of the span) where the gap begins.
    pub start_day: f64,
    pub length_days: f64,
}

impl AnnualGap {
    pub fn contains(&self, t: f64) -> bool {
        let doy = t.rem_euclid(YEAR_DAYS);
        doy >= self.start_day && doy <= self.start_day + self.length_days
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CadenceSpec {
    pub n_nights: usize,
    pub exposures_per_night: usize,
    pub intra_night_gap: f64,
    pub annual_gap: Option<AnnualGap>,
    pub total_span: f64,
}

impl Default for CadenceSpec {
    fn default() -> Self {
        Self {
            n_nights: 13,
            exposures_per_night: 4,
            intra_night_gap: TEN_MINUTES,
            annual_gap: None,
            total_span: 2764.0,
        }
    }
}

const MAX_REJECTIONS: usize = 10_000;

/// Observation times: `n_nights` visit starts drawn uniformly over the span
/// (whole visits avoiding the annual gap), each contributing
/// `exposures_per_night` exposures `intra_night_gap` apart. Sorted.
pub fn generate_cadence(spec: &CadenceSpec, seed: u64) -> Result<Vec<f64>, SynthError> {
    let infeasible = |m: &str| Err(SynthError::InfeasibleSpec(m.to_string()));
    if spec.n_nights == 0 {
        return infeasible("n_nights must be positive");
    }
    if !(1..=4).contains(&spec.exposures_per_night) {
        return infeasible("exposures_per_night must be between 1 and 4");
    }
    if !(spec.intra_night_gap > 0.0 && spec.total_span > 0.0) {
        return infeasible("gaps and span must be positive");
    }
    let visit_len = spec.intra_night_gap * (spec.exposures_per_night - 1) as f64;
    if let Some(g) = spec.annual_gap {
        if g.start_day < 0.0 || g.length_days <= 0.0 || g.start_day + g.length_days + visit_len >= YEAR_DAYS {
            return infeasible("annual gap must lie inside the year and leave room for visits");
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times = Vec::with_capacity(spec.n_nights * spec.exposures_per_night);
    for _ in 0..spec.n_nights {
        let start = (0..MAX_REJECTIONS)
            .map(|_| rng.random::<f64>() * spec.total_span)
            .find(|&s| {
                spec.annual_gap.is_none_or(|g| {
                    (0..spec.exposures_per_night).all(|e| !g.contains(s + spec.intra_night_gap * e as f64))
                })
            });
        let Some(start) = start else {
            return infeasible("no admissible visit start found within the span");
        };
        for e in 0..spec.exposures_per_night {
            times.push(start + spec.intra_night_gap * e as f64);
        }
    }
    times.sort_by(f64::total_cmp);
    Ok(times)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Flat,
    Burst,
    Stochastic,
    Periodic,
}

impl CurveKind {
    pub const ALL: [CurveKind; 4] = [CurveKind::Flat, CurveKind::Burst, CurveKind::Stochastic, CurveKind::Periodic];

    /// Survey class used as the label for curves of this kind.
    pub fn label(self) -> &'static str {
        match self {
            CurveKind::Flat => crate::lightcurve::NON_TRANSIENT,
            CurveKind::Burst => "SNe",
            CurveKind::Stochastic => "AGN",
            CurveKind::Periodic => "RR-Lyrae",
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveKind::Flat => "flat",
            CurveKind::Burst => "burst",
            CurveKind::Stochastic => "stochastic",
            CurveKind::Periodic => "periodic",
        })
    }
}

impl FromStr for CurveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "flat" => Ok(CurveKind::Flat),
            "burst" => Ok(CurveKind::Burst),
            "stochastic" => Ok(CurveKind::Stochastic),
            "periodic" => Ok(CurveKind::Periodic),
            other => Err(format!("unknown curve kind {other:?}")),
        }
    }
}

/// Reported errors are drawn log-uniformly in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    pub lo: f64,
    pub hi: f64,
}

impl Default for ErrorModel {
    fn default() -> Self {
        Self { lo: 0.05, hi: 0.3 }
    }
}

impl ErrorModel {
    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (a + (b - a) * rng.random::<f64>()).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub kind: CurveKind,
    /// Flat/stochastic/periodic: variability amplitude (GP standard
    /// deviation for stochastic, sinusoid semi-amplitude for periodic).
    /// Burst: peak brightening.
    pub amplitude: f64,
    /// Burst width (Gaussian sd), GP length-scale, or period, in days.
    pub timescale: f64,
    /// Observation noise as a multiple of the reported error: 1 means the
    /// reported errors are honest, 0 gives noiseless magnitudes.
    pub noise_sd: f64,
    pub detection_limit: f64,
    /// Quiescent magnitude.
    pub baseline: f64,
    pub errors: ErrorModel,
}

impl ClassSpec {
    pub fn new(kind: CurveKind, amplitude: f64, timescale: f64, baseline: f64) -> Self {
        Self {
            kind,
            amplitude,
            timescale,
            noise_sd: 1.0,
            detection_limit: 20.5,
            baseline,
            errors: ErrorModel::default(),
        }
    }

    /// A burst rising out of a quiescent level at the detection limit.
    pub fn burst(amplitude: f64, timescale: f64) -> Self {
        Self::new(CurveKind::Burst, amplitude, timescale, 20.5)
    }

    fn check(&self) -> Result<(), SynthError> {
        if !(self.amplitude >= 0.0 && self.timescale > 0.0 && self.noise_sd >= 0.0) {
            return Err(SynthError::InfeasibleSpec(
                "amplitude and noise must be nonnegative, timescale positive".into(),
            ));
        }
        if !(self.errors.lo > 0.0 && self.errors.hi >= self.errors.lo) {
            return Err(SynthError::InfeasibleSpec("error model bounds must be positive".into()));
        }
        Ok(())
    }
}

/// A generated curve with the noise-free magnitudes it was sampled from.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedCurve {
    pub lc: Lightcurve,
    pub spec: ClassSpec,
    /// True magnitude at every generated time (censored rows included).
    pub truth: Vec<f64>,
    /// Burst peak time or periodic phase, where applicable.
    pub extra: f64,
}

impl GeneratedCurve {
    /// `key=value` pairs separated by `;` for the ground-truth sidecar.
    pub fn true_params(&self) -> String {
        let s = &self.spec;
        let extra = match s.kind {
            CurveKind::Burst => format!(";peak={}", self.extra),
            CurveKind::Periodic => format!(";phase={}", self.extra),
            _ => String::new(),
        };
        format!(
            "amplitude={};timescale={};baseline={};noise_sd={};detection_limit={}{extra}",
            s.amplitude, s.timescale, s.baseline, s.noise_sd, s.detection_limit
        )
    }
}

/// Exact draw of a zero-mean squared-exponential GP at `times`.
pub fn draw_gp<R: Rng>(times: &[f64], variance: f64, length_scale: f64, rng: &mut R) -> Vec<f64> {
    let k = SquaredExponential {
        sigma_f2: variance,
        length_scale,
    };
    let n = times.len();
    let cov = DMatrix::from_fn(n, n, |i, j| k.signal_cov(times[i], times[j]));
    let z = DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)));
    let mut jitter = 1e-10 * variance.max(f64::MIN_POSITIVE);
    loop {
        let mut a = cov.clone();
        for i in 0..n {
            a[(i, i)] += jitter;
        }
        if let Some(ch) = Cholesky::new(a) {
            return (ch.l() * z).as_slice().to_vec();
        }
        jitter *= 100.0;
    }
}

/// Samples one curve of `spec` at `times`. Magnitudes fainter than the
/// detection limit become censored rows carrying the limit.
pub fn generate_curve(id: &str, spec: &ClassSpec, times: &[f64], seed: u64) -> Result<GeneratedCurve, SynthError> {
    if times.len() < 5 {
        return Err(SynthError::TooFewTimes(times.len()));
    }
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (times[0], times[times.len() - 1]);
    let (truth, extra) = match spec.kind {
        CurveKind::Flat => (vec![spec.baseline; times.len()], 0.0),
        CurveKind::Burst => {
            let peak = lo + (hi - lo) * rng.random::<f64>();
            let w2 = 2.0 * spec.timescale * spec.timescale;
            let f = times
                .iter()
                .map(|t| spec.baseline - spec.amplitude * (-(t - peak) * (t - peak) / w2).exp())
                .collect();
            (f, peak)
        }
        CurveKind::Stochastic => {
            let g = draw_gp(times, spec.amplitude * spec.amplitude, spec.timescale, &mut rng);
            (g.into_iter().map(|v| spec.baseline + v).collect(), 0.0)
        }
        CurveKind::Periodic => {
            let phase = std::f64::consts::TAU * rng.random::<f64>();
            let f = times
                .iter()
                .map(|t| spec.baseline + spec.amplitude * (std::f64::consts::TAU * t / spec.timescale + phase).sin())
                .collect();
            (f, phase)
        }
    };
    let obs = times
        .iter()
        .zip(&truth)
        .map(|(&t, &f)| {
            let s = spec.errors.draw(&mut rng);
            let z: f64 = rng.sample(StandardNormal);
            let y = f + spec.noise_sd * s * z;
            if y < spec.detection_limit {
                Observation { t, y, s, censored: false }
            } else {
                Observation {
                    t,
                    y: spec.detection_limit,
                    s,
                    censored: true,
                }
            }
        })
        .collect();
    Ok(GeneratedCurve {
        lc: Lightcurve::new(id, Some(spec.kind.label().to_string()), obs),
        spec: *spec,
        truth,
        extra,
    })
}

/// Ground-truth sidecar: `id,kind,true_params`.
pub fn write_truth(curves: &[GeneratedCurve]) -> String {
    let mut out = String::from("id,kind,true_params\n");
    for c in curves {
        let _ = writeln!(out, "{},{},{}", c.lc.id, c.spec.kind, c.true_params());
    }
    out
}
