//! Lightcurve data model, CSV ingestion, validation and intra-night grouping.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::kv::KvMap;

/// Canonical label of the non-variable class.
pub const NON_TRANSIENT: &str = "non-transient";

/// The eight survey classes, in reporting order.
pub const KNOWN_CLASSES: [&str; 8] = [
    "AGN",
    "Blazar",
    "CV",
    "CV-Downes",
    "Flare",
    "SNe",
    "RR-Lyrae",
    NON_TRANSIENT,
];

/// Maps a free-form label onto the canonical spelling of a known class
/// (case-insensitive). Unknown labels are returned trimmed but otherwise
/// untouched.
pub fn canonical_label(label: &str) -> String {
    let trimmed = label.trim();
    KNOWN_CLASSES
        .iter()
        .find(|c| c.eq_ignore_ascii_case(trimmed))
        .map(|c| c.to_string())
        .unwrap_or_else(|| trimmed.to_string())
}

pub fn is_non_transient(label: &str) -> bool {
    label.trim().eq_ignore_ascii_case(NON_TRANSIENT)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// Days since the dataset zero-point.
    pub t: f64,
    /// Magnitude; smaller is brighter.
    pub y: f64,
    /// Reported measurement error (magnitudes).
    pub s: f64,
    /// Upper-limit row: the object was below the detection limit.
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lightcurve {
    pub id: String,
    pub label: Option<String>,
    obs: Vec<Observation>,
}

impl Lightcurve {
    /// Builds a curve, stably sorting observations by time.
    pub fn new(id: impl Into<String>, label: Option<String>, mut obs: Vec<Observation>) -> Self {
        obs.sort_by(|a, b| a.t.total_cmp(&b.t));
        Self {
            id: id.into(),
            label,
            obs,
        }
    }

    /// Builds a curve of detected observations from parallel arrays.
    pub fn from_arrays(id: impl Into<String>, t: &[f64], y: &[f64], s: &[f64]) -> Self {
        let obs = t
            .iter()
            .zip(y)
            .zip(s)
            .map(|((&t, &y), &s)| Observation {
                t,
                y,
                s,
                censored: false,
            })
            .collect();
        Self::new(id, None, obs)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn observations(&self) -> &[Observation] {
        &self.obs
    }

    /// Non-censored observations, in time order.
    pub fn detected(&self) -> impl Iterator<Item = &Observation> + '_ {
        self.obs.iter().filter(|o| !o.censored)
    }

    /// Count of non-censored observations.
    pub fn n(&self) -> usize {
        self.detected().count()
    }

    pub fn times(&self) -> Vec<f64> {
        self.detected().map(|o| o.t).collect()
    }

    pub fn mags(&self) -> Vec<f64> {
        self.detected().map(|o| o.y).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.detected().map(|o| o.s).collect()
    }

    /// Time between the first and last detected observation.
    pub fn span(&self) -> f64 {
        let mut it = self.detected();
        match it.next() {
            None => 0.0,
            Some(first) => it.last().map_or(0.0, |last| last.t - first.t),
        }
    }

    /// Copy with every magnitude shifted by `c` (censored rows included).
    pub fn shifted_mags(&self, c: f64) -> Self {
        let mut out = self.clone();
        for o in &mut out.obs {
            o.y += c;
        }
        out
    }

    /// Copy with every time shifted by `dt`.
    pub fn shifted_times(&self, dt: f64) -> Self {
        let mut out = self.clone();
        for o in &mut out.obs {
            o.t += dt;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    /// Julian date subtracted from every epoch.
    pub zero_point: f64,
    pub detection_limit: f64,
    /// Largest gap (days) between consecutive observations of one group.
    pub grouping_gap: f64,
    pub min_observations: usize,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            zero_point: 53464.0,
            detection_limit: 20.5,
            grouping_gap: 30.0 / (24.0 * 60.0),
            min_observations: 5,
        }
    }
}

impl DatasetConfig {
    /// Reads the dataset keys from a config map, keeping defaults for
    /// absent keys.
    pub fn from_kv(kv: &KvMap) -> Result<Self, DataError> {
        let mut cfg = Self::default();
        if let Some(v) = kv.get("zero_point")? {
            cfg.zero_point = v;
        }
        if let Some(v) = kv.get("detection_limit")? {
            cfg.detection_limit = v;
        }
        if let Some(v) = kv.get("grouping_gap")? {
            cfg.grouping_gap = v;
        }
        if let Some(v) = kv.get("min_observations")? {
            cfg.min_observations = v;
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), DataError> {
        let bad = |reason: &str| {
            Err(DataError::BadConfig {
                line: 0,
                reason: reason.to_string(),
            })
        };
        if !(self.zero_point.is_finite() && self.zero_point > 0.0) {
            return bad("zero_point must be positive");
        }
        if !(self.detection_limit.is_finite() && self.detection_limit > 0.0) {
            return bad("detection_limit must be positive");
        }
        if !(self.grouping_gap.is_finite() && self.grouping_gap > 0.0) {
            return bad("grouping_gap must be positive");
        }
        if self.min_observations < 2 {
            return bad("min_observations must be at least 2");
        }
        Ok(())
    }
}

pub const INPUT_HEADER: [&str; 5] = ["id", "jd", "mag", "magerr", "censored"];
pub const STORE_HEADER: [&str; 6] = ["id", "label", "jd", "mag", "magerr", "censored"];

/// Parses the ingestion CSV (`id,jd,mag,magerr,censored`) into one
/// lightcurve per distinct id, in order of first appearance. Times are
/// rebased by the configured zero-point and sorted.
pub fn parse_lightcurve_file(text: &str, config: &DatasetConfig) -> Result<Vec<Lightcurve>, DataError> {
    parse_table(text, config, false)
}

/// Parses a packed store (`id,label,jd,mag,magerr,censored`). An empty
/// label means unlabeled.
pub fn parse_store(text: &str, config: &DatasetConfig) -> Result<Vec<Lightcurve>, DataError> {
    parse_table(text, config, true)
}

fn parse_table(text: &str, config: &DatasetConfig, labeled: bool) -> Result<Vec<Lightcurve>, DataError> {
    let expected: &[&str] = if labeled { &STORE_HEADER } else { &INPUT_HEADER };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut records = reader.records();
    let header = match records.next() {
        None => return Err(DataError::EmptyInput),
        Some(r) => r.map_err(|e| malformed(1, e.to_string()))?,
    };
    let names: Vec<&str> = header.iter().collect();
    if names != expected {
        return Err(malformed(
            1,
            format!("header must be {}, got {}", expected.join(","), names.join(",")),
        ));
    }

    let mut order: Vec<String> = Vec::new();
    let mut by_id: HashMap<String, (Option<String>, Vec<Observation>)> = HashMap::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            malformed(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        if rec.len() != expected.len() {
            return Err(malformed(
                line,
                format!("expected {} fields, got {}", expected.len(), rec.len()),
            ));
        }
        let off = usize::from(labeled);
        let id = rec[0].to_string();
        if id.is_empty() {
            return Err(malformed(line, "empty id".into()));
        }
        let label = if labeled && !rec[1].is_empty() {
            Some(canonical_label(&rec[1]))
        } else {
            None
        };
        let censored = match &rec[4 + off] {
            "0" => false,
            "1" => true,
            other => return Err(malformed(line, format!("censored must be 0 or 1, got {other:?}"))),
        };
        let jd = parse_num(&rec[1 + off], "jd", line)?;
        let y = if censored && rec[2 + off].is_empty() {
            config.detection_limit
        } else {
            parse_num(&rec[2 + off], "mag", line)?
        };
        let s = if censored {
            rec[3 + off].parse::<f64>().unwrap_or(0.0)
        } else {
            let s = parse_num(&rec[3 + off], "magerr", line)?;
            if !(s > 0.0) {
                return Err(DataError::NonPositiveError { line, value: s });
            }
            s
        };
        let obs = Observation {
            t: jd - config.zero_point,
            y,
            s,
            censored,
        };
        let entry = by_id.entry(id.clone()).or_insert_with(|| {
            order.push(id.clone());
            (label.clone(), Vec::new())
        });
        if entry.0.is_none() {
            entry.0 = label;
        }
        entry.1.push(obs);
    }
    if order.is_empty() {
        return Err(DataError::EmptyInput);
    }
    Ok(order
        .into_iter()
        .map(|id| {
            let (label, obs) = by_id.remove(&id).expect("id recorded on insert");
            Lightcurve::new(id, label, obs)
        })
        .collect())
}

fn malformed(line: usize, reason: String) -> DataError {
    DataError::MalformedRow { line, reason }
}

fn parse_num(field: &str, name: &str, line: usize) -> Result<f64, DataError> {
    field
        .parse::<f64>()
        .map_err(|_| malformed(line, format!("{name} is not a number: {field:?}")))
}

/// Writes curves in the ingestion schema, re-adding the zero-point.
pub fn write_lightcurve_file(curves: &[Lightcurve], config: &DatasetConfig) -> String {
    let mut out = INPUT_HEADER.join(",");
    out.push('\n');
    for lc in curves {
        for o in &lc.obs {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                lc.id,
                o.t + config.zero_point,
                o.y,
                o.s,
                u8::from(o.censored)
            );
        }
    }
    out
}

/// Writes curves in the labeled store schema.
pub fn write_store(curves: &[Lightcurve], config: &DatasetConfig) -> String {
    let mut out = STORE_HEADER.join(",");
    out.push('\n');
    for lc in curves {
        let label = lc.label.as_deref().unwrap_or("");
        for o in &lc.obs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                lc.id,
                label,
                o.t + config.zero_point,
                o.y,
                o.s,
                u8::from(o.censored)
            );
        }
    }
    out
}

/// Accepts a parsed curve when it is usable for modeling.
pub fn validate(lc: Lightcurve, config: &DatasetConfig) -> Result<Lightcurve, DataError> {
    for o in &lc.obs {
        if !o.t.is_finite() {
            return Err(DataError::NonFiniteValue {
                id: lc.id.clone(),
                field: "time",
            });
        }
        if !o.y.is_finite() {
            return Err(DataError::NonFiniteValue {
                id: lc.id.clone(),
                field: "magnitude",
            });
        }
        if !o.censored && !o.s.is_finite() {
            return Err(DataError::NonFiniteValue {
                id: lc.id.clone(),
                field: "error",
            });
        }
    }
    if lc.obs.windows(2).any(|w| w[1].t < w[0].t) {
        return Err(DataError::UnsortedTimes { id: lc.id.clone() });
    }
    let n = lc.n();
    if n < config.min_observations {
        return Err(DataError::TooFewObservations {
            id: lc.id.clone(),
            n,
            min: config.min_observations,
        });
    }
    Ok(lc)
}

/// A run of observations taken within one visit.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationGroup {
    /// Indices into [`Lightcurve::observations`].
    pub member_indices: Vec<usize>,
    pub group_mean: f64,
    pub group_time: f64,
}

/// Greedy chronological clustering of the detected observations: a new
/// group starts whenever the gap to the previous detection exceeds `gap`.
pub fn group_observations(lc: &Lightcurve, gap: f64) -> Vec<ObservationGroup> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut prev_t: Option<f64> = None;
    for (i, o) in lc.obs.iter().enumerate().filter(|(_, o)| !o.censored) {
        match prev_t {
            Some(p) if o.t - p <= gap => groups.last_mut().expect("open group").push(i),
            _ => groups.push(vec![i]),
        }
        prev_t = Some(o.t);
    }
    groups
        .into_iter()
        .map(|members| {
            let k = members.len() as f64;
            let group_mean = members.iter().map(|&i| lc.obs[i].y).sum::<f64>() / k;
            let group_time = members.iter().map(|&i| lc.obs[i].t).sum::<f64>() / k;
            ObservationGroup {
                member_indices: members,
                group_mean,
                group_time,
            }
        })
        .collect()
}
