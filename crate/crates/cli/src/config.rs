//! Run configuration: defaults, then a `key=value` file, then `LCMODEL_*`
//! environment variables, then command-line flags.

use std::path::PathBuf;

use lcmodel::classify::{ClassifierKind, ForestParams, Scheme, TrainParams, TreeParams, TRAIN_FRACTION};
use lcmodel::features::{ExtractionConfig, FeatureSet, GroupNormalization};
use lcmodel::gp::{GpHyperparameters, PriorMeanRule, DEFAULT_GRID_SIZE, DEFAULT_LENGTH_SCALE};
use lcmodel::kv::KvMap;
use lcmodel::lightcurve::DatasetConfig;
use lcmodel::DataError;

pub const ENV_PREFIX: &str = "LCMODEL_";

pub const KEYS: &[&str] = &[
    "zero_point",
    "detection_limit",
    "grouping_gap",
    "min_observations",
    "sigma_f2",
    "sigma_n2",
    "length_scale",
    "reference",
    "span_threshold",
    "grid_size",
    "group_normalization",
    "feature_set",
    "scheme",
    "classifier",
    "seed",
    "workers",
    "train_fraction",
    "n_trees",
    "mtry",
    "min_leaf",
    "max_depth",
    "tree_min_leaf",
    "tree_max_depth",
    "curves_per_kind",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: DatasetConfig,
    /// Fixed hyperparameters; when absent they are estimated from
    /// `reference` or from the input store.
    pub hyper: Option<GpHyperparameters>,
    pub length_scale: f64,
    pub reference: Option<PathBuf>,
    pub prior: PriorMeanRule,
    pub grid_size: usize,
    pub group_norm: GroupNormalization,
    pub feature_set: FeatureSet,
    pub scheme: Scheme,
    pub classifier: ClassifierKind,
    pub seed: u64,
    pub workers: Option<usize>,
    pub train_fraction: f64,
    pub forest: ForestParams,
    pub tree: TreeParams,
    pub curves_per_kind: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetConfig::default(),
            hyper: None,
            length_scale: DEFAULT_LENGTH_SCALE,
            reference: None,
            prior: PriorMeanRule::default(),
            grid_size: DEFAULT_GRID_SIZE,
            group_norm: GroupNormalization::default(),
            feature_set: FeatureSet::Full,
            scheme: Scheme::All,
            classifier: ClassifierKind::Forest,
            seed: 0,
            workers: None,
            train_fraction: TRAIN_FRACTION,
            forest: ForestParams::default(),
            tree: TreeParams::default(),
            curves_per_kind: lcmodel::benchmark::DEFAULT_CURVES_PER_KIND,
        }
    }
}

fn bad(reason: String) -> DataError {
    DataError::BadConfig { line: 0, reason }
}

fn parse_with<T>(kv: &KvMap, key: &str, f: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, DataError> {
    kv.get_str(key)
        .map(|v| f(v).map_err(|e| bad(format!("{key}: {e}"))))
        .transpose()
}

fn parse_norm(v: &str) -> Result<GroupNormalization, String> {
    match v {
        "observations" => Ok(GroupNormalization::Observations),
        "groups" => Ok(GroupNormalization::Groups),
        other => Err(format!("expected observations or groups, got {other:?}")),
    }
}

impl RunConfig {
    pub fn from_kv(kv: &KvMap) -> Result<Self, DataError> {
        if let Some(k) = kv.keys().find(|k| !KEYS.contains(k)) {
            return Err(bad(format!("unknown key {k:?}")));
        }
        let mut c = Self {
            dataset: DatasetConfig::from_kv(kv)?,
            ..Self::default()
        };
        c.prior.detection_limit = c.dataset.detection_limit;
        if let Some(v) = kv.get("span_threshold")? {
            c.prior.span_threshold = v;
        }
        if let Some(v) = kv.get("length_scale")? {
            c.length_scale = v;
        }
        c.hyper = match (kv.get::<f64>("sigma_f2")?, kv.get::<f64>("sigma_n2")?) {
            (Some(f), Some(n)) => {
                Some(GpHyperparameters::new(f, n, c.length_scale).map_err(|e| bad(e.to_string()))?)
            }
            (None, None) => None,
            _ => return Err(bad("sigma_f2 and sigma_n2 must be given together".into())),
        };
        c.reference = kv.get_str("reference").map(PathBuf::from);
        if let Some(v) = kv.get("grid_size")? {
            c.grid_size = v;
        }
        if let Some(v) = parse_with(kv, "group_normalization", parse_norm)? {
            c.group_norm = v;
        }
        if let Some(v) = parse_with(kv, "feature_set", str::parse)? {
            c.feature_set = v;
        }
        if let Some(v) = parse_with(kv, "scheme", str::parse)? {
            c.scheme = v;
        }
        if let Some(v) = parse_with(kv, "classifier", str::parse)? {
            c.classifier = v;
        }
        if let Some(v) = kv.get("seed")? {
            c.seed = v;
        }
        c.workers = kv.get("workers")?;
        if let Some(v) = kv.get("train_fraction")? {
            c.train_fraction = v;
        }
        if let Some(v) = kv.get("n_trees")? {
            c.forest.n_trees = v;
        }
        if let Some(v) = kv.get::<usize>("mtry")? {
            c.forest.mtry = Some(v);
        }
        if let Some(v) = kv.get("min_leaf")? {
            c.forest.min_leaf = v;
        }
        if let Some(v) = kv.get("max_depth")? {
            c.forest.max_depth = v;
        }
        if let Some(v) = kv.get("tree_min_leaf")? {
            c.tree.min_leaf = v;
        }
        if let Some(v) = kv.get("tree_max_depth")? {
            c.tree.max_depth = v;
        }
        if let Some(v) = kv.get("curves_per_kind")? {
            c.curves_per_kind = v;
        }
        Ok(c)
    }

    /// Serializes every setting; `from_kv(to_kv())` reproduces the config.
    pub fn to_kv(&self) -> KvMap {
        let mut kv = KvMap::default();
        kv.insert("zero_point", self.dataset.zero_point);
        kv.insert("detection_limit", self.dataset.detection_limit);
        kv.insert("grouping_gap", self.dataset.grouping_gap);
        kv.insert("min_observations", self.dataset.min_observations);
        if let Some(h) = &self.hyper {
            kv.insert("sigma_f2", h.sigma_f2);
            kv.insert("sigma_n2", h.sigma_n2);
        }
        kv.insert("length_scale", self.length_scale);
        if let Some(r) = &self.reference {
            kv.insert("reference", r.display());
        }
        kv.insert("span_threshold", self.prior.span_threshold);
        kv.insert("grid_size", self.grid_size);
        kv.insert(
            "group_normalization",
            match self.group_norm {
                GroupNormalization::Observations => "observations",
                GroupNormalization::Groups => "groups",
            },
        );
        kv.insert("feature_set", self.feature_set);
        kv.insert("scheme", self.scheme);
        kv.insert("classifier", self.classifier);
        kv.insert("seed", self.seed);
        if let Some(w) = self.workers {
            kv.insert("workers", w);
        }
        kv.insert("train_fraction", self.train_fraction);
        kv.insert("n_trees", self.forest.n_trees);
        if let Some(m) = self.forest.mtry {
            kv.insert("mtry", m);
        }
        kv.insert("min_leaf", self.forest.min_leaf);
        kv.insert("max_depth", self.forest.max_depth);
        kv.insert("tree_min_leaf", self.tree.min_leaf);
        kv.insert("tree_max_depth", self.tree.max_depth);
        kv.insert("curves_per_kind", self.curves_per_kind);
        kv
    }

    /// Split seed is `seed`, forest seed `seed + 1`, simulator seed `seed + 2`.
    pub fn split_seed(&self) -> u64 {
        self.seed
    }

    pub fn forest_seed(&self) -> u64 {
        self.seed.wrapping_add(1)
    }

    pub fn simulator_seed(&self) -> u64 {
        self.seed.wrapping_add(2)
    }

    pub fn train_params(&self) -> TrainParams {
        TrainParams {
            tree: self.tree,
            forest: self.forest,
            seed: self.forest_seed(),
        }
    }

    pub fn extraction(&self, hyper: GpHyperparameters) -> ExtractionConfig {
        ExtractionConfig {
            dataset: self.dataset.clone(),
            hyper,
            prior: self.prior,
            grid_size: self.grid_size,
            tag: self.feature_set,
            group_norm: self.group_norm,
        }
    }
}

/// Collects `LCMODEL_<KEY>` variables for known keys, lower-casing the key.
pub fn env_overrides(vars: impl IntoIterator<Item = (String, String)>) -> Vec<(String, String)> {
    vars.into_iter()
        .filter_map(|(k, v)| {
            let key = k.strip_prefix(ENV_PREFIX)?.to_ascii_lowercase();
            KEYS.contains(&key.as_str()).then_some((key, v))
        })
        .collect()
}
