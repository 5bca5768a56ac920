//! Batch front end: ingest → fit → features → train/evaluate/select, plus
//! synthetic data generation.

mod config;

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lcmodel::benchmark::Benchmark;
use lcmodel::classify::{
    model_from_json, model_to_json, split_train_test, stepwise_selection, train_scheme, ClassifierKind,
    EvaluationSummary, LabeledDataset, Scheme,
};
use lcmodel::features::{extract_batch, FeatureSet};
use lcmodel::gp::{estimate_hyperparameters, fit_posterior, write_fit_dump, GpHyperparameters};
use lcmodel::kv::KvMap;
use lcmodel::lightcurve::{parse_lightcurve_file, parse_store, validate, write_lightcurve_file, write_store, Lightcurve};
use lcmodel::synth::write_truth;
use rayon::prelude::*;

use config::{env_overrides, RunConfig};

#[derive(Parser)]
#[command(name = "lcmodel", version, about = "Gaussian process lightcurve modeling and classification")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// key=value run configuration file
    #[arg(long, global = true, env = "LCMODEL_CONFIG")]
    config: Option<PathBuf>,
    /// Base seed: split = seed, forest = seed+1, simulator = seed+2
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for per-curve stages and forests
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// richards or full
    #[arg(long, global = true)]
    feature_set: Option<FeatureSet>,
    /// all, binary, transient or hier
    #[arg(long, global = true)]
    scheme: Option<Scheme>,
    /// lda, tree or forest
    #[arg(long, global = true)]
    classifier: Option<ClassifierKind>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate raw lightcurves and write a labeled store
    Ingest {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// CSV with columns id,label
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Write per-curve posterior dumps (t,mean,var) for plotting
    Fit {
        store: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the feature matrix and its provenance sidecar
    Features {
        store: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a scheme on the training split and save the model
    Train {
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score on the test split; prints scheme,kind,accuracy,stderr
    Evaluate {
        features: PathBuf,
        /// Saved model; without one, a model is trained from the config
        #[arg(long)]
        model: Option<PathBuf>,
        /// Confusion matrix destination
        #[arg(long, default_value = "confusion.csv")]
        out: PathBuf,
    },
    /// Stepwise backward elimination trace
    Select {
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate the labeled synthetic benchmark
    Simulate {
        #[arg(long)]
        out: PathBuf,
    },
}

/// Failure reported as one `error: <Code>: <message>` line.
#[derive(Debug)]
struct Failure {
    code: &'static str,
    message: String,
}

impl Failure {
    fn new(code: &'static str, message: impl Display) -> Self {
        Self {
            code,
            message: message.to_string(),
        }
    }
}

macro_rules! failure_from {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::new(e.code(), &e)
            }
        }
    )*};
}

failure_from!(
    lcmodel::Error,
    lcmodel::DataError,
    lcmodel::GpError,
    lcmodel::FeatureError,
    lcmodel::ClassifyError,
    lcmodel::SynthError
);

type Result<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Failure::new("Io", format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    fs::write(path, contents).map_err(|e| Failure::new("Io", format!("cannot write {}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Failure::new("Io", format!("cannot create {}: {e}", dir.display())))
}

fn resolve_config(g: &GlobalArgs) -> Result<RunConfig> {
    let mut kv = match &g.config {
        Some(p) => KvMap::parse(&read(p)?)?,
        None => KvMap::default(),
    };
    for (k, v) in env_overrides(std::env::vars()) {
        kv.insert(&k, v);
    }
    let mut c = RunConfig::from_kv(&kv)?;
    if let Some(s) = g.seed {
        c.seed = s;
    }
    if let Some(w) = g.workers {
        c.workers = Some(w);
    }
    if let Some(f) = g.feature_set {
        c.feature_set = f;
    }
    if let Some(s) = g.scheme {
        c.scheme = s;
    }
    if let Some(k) = g.classifier {
        c.classifier = k;
    }
    Ok(c)
}

fn load_store(path: &Path, cfg: &RunConfig) -> Result<Vec<Lightcurve>> {
    Ok(parse_store(&read(path)?, &cfg.dataset)?)
}

/// Fixed hyperparameters, or estimates from the reference store, or from
/// the curves themselves.
fn hyperparameters(cfg: &RunConfig, curves: &[Lightcurve]) -> Result<GpHyperparameters> {
    if let Some(h) = cfg.hyper {
        return Ok(h);
    }
    match &cfg.reference {
        Some(p) => Ok(estimate_hyperparameters(&load_store(p, cfg)?, cfg.length_scale)?),
        None => Ok(estimate_hyperparameters(curves, cfg.length_scale)?),
    }
}

fn load_features(path: &Path) -> Result<LabeledDataset> {
    Ok(LabeledDataset::from_csv(&read(path)?)?)
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect()
}

fn cmd_ingest(cfg: &RunConfig, input: &Path, out: &Path, labels: Option<&Path>) -> Result<()> {
    let text = read(input)?;
    let mut curves = if text.trim_start().starts_with("id,label") {
        parse_store(&text, &cfg.dataset)?
    } else {
        parse_lightcurve_file(&text, &cfg.dataset)?
    };
    if let Some(p) = labels {
        let table = read(p)?;
        let mut map = BTreeMap::new();
        for (i, line) in table.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let (id, label) = line
                .split_once(',')
                .ok_or_else(|| Failure::new("MalformedRow", format!("{}:{}: expected id,label", p.display(), i + 1)))?;
            map.insert(id.trim().to_string(), label.trim().to_string());
        }
        for lc in &mut curves {
            if let Some(l) = map.get(&lc.id) {
                lc.label = Some(lcmodel::lightcurve::canonical_label(l));
            }
        }
    }

    let mut accepted = Vec::new();
    let mut reasons: BTreeMap<&'static str, usize> = BTreeMap::new();
    for lc in curves {
        let id = lc.id.clone();
        match validate(lc, &cfg.dataset) {
            Ok(lc) => accepted.push(lc),
            Err(e) => {
                eprintln!("rejected {id}: {e}");
                *reasons.entry(e.code()).or_default() += 1;
            }
        }
    }
    let rejected: usize = reasons.values().sum();
    write(out, &write_store(&accepted, &cfg.dataset))?;
    let detail = match reasons.len() {
        0 => String::new(),
        1 => format!(" ({})", reasons.keys().next().unwrap()),
        _ => format!(
            " ({})",
            reasons.iter().map(|(k, v)| format!("{k}: {v}")).collect::<Vec<_>>().join(", ")
        ),
    };
    println!("accepted {}, rejected {rejected}{detail}", accepted.len());
    Ok(())
}

fn cmd_fit(cfg: &RunConfig, store: &Path, out: &Path) -> Result<()> {
    let curves = load_store(store, cfg)?;
    let hyper = hyperparameters(cfg, &curves)?;
    let dumps = curves
        .par_iter()
        .map(|lc| Ok((lc.id.clone(), write_fit_dump(&lc.id, &fit_posterior(lc, &hyper, &cfg.prior, cfg.grid_size)?, &hyper))))
        .collect::<std::result::Result<Vec<_>, lcmodel::GpError>>()?;
    create_dir(out)?;
    for (id, dump) in &dumps {
        write(&out.join(format!("{}.csv", file_stem(id))), dump)?;
    }
    write(&out.join("hyperparameters.txt"), &hyper.to_kv().to_text())?;
    println!("wrote {} fits to {}", dumps.len(), out.display());
    Ok(())
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_features(cfg: &RunConfig, store: &Path, out: &Path) -> Result<()> {
    let curves = load_store(store, cfg)?;
    let hyper = hyperparameters(cfg, &curves)?;
    let ext = cfg.extraction(hyper);
    let rows = extract_batch(&curves, &ext)
        .into_iter()
        .zip(&curves)
        .map(|(fv, lc)| Ok((fv?, lc.label.clone().unwrap_or_default())))
        .collect::<Result<Vec<_>>>()?;
    let ds = LabeledDataset::from_vectors(&rows)?;
    write(out, &ds.to_csv())?;
    write(&sidecar(out, ".provenance"), &ext.provenance())?;
    println!("wrote {} rows x {} features to {}", ds.len(), ds.n_features(), out.display());
    Ok(())
}

fn cmd_train(cfg: &RunConfig, features: &Path, out: &Path) -> Result<()> {
    let ds = load_features(features)?;
    let (train, _) = split_train_test(&ds, cfg.train_fraction, cfg.split_seed())?;
    let model = train_scheme(cfg.scheme, cfg.classifier, &train, &cfg.train_params())?;
    write(out, &model_to_json(&model))?;
    write(&sidecar(out, ".config"), &cfg.to_kv().to_text())?;
    println!(
        "trained {} {} on {} rows, saved to {}",
        cfg.scheme,
        cfg.classifier,
        train.len(),
        out.display()
    );
    Ok(())
}

fn cmd_evaluate(cfg: &RunConfig, features: &Path, model: Option<&Path>, out: &Path) -> Result<()> {
    let ds = load_features(features)?;
    let (train, test) = split_train_test(&ds, cfg.train_fraction, cfg.split_seed())?;
    let model = match model {
        Some(p) => model_from_json(&read(p)?)?,
        None => train_scheme(cfg.scheme, cfg.classifier, &train, &cfg.train_params())?,
    };
    let cm = model.evaluate(&test)?;
    write(out, &cm.to_csv())?;
    println!("{}", EvaluationSummary::HEADER);
    println!("{}", EvaluationSummary::new(model.scheme, model.kind, &cm));
    Ok(())
}

fn cmd_select(cfg: &RunConfig, features: &Path, out: &Path) -> Result<()> {
    let ds = load_features(features)?;
    let trace = stepwise_selection(&ds, &cfg.forest, cfg.seed)?;
    write(out, &trace.to_csv())?;
    println!("wrote {} selection steps to {}", trace.steps.len(), out.display());
    Ok(())
}

fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let bench = Benchmark::generate(cfg.curves_per_kind, cfg.simulator_seed());
    let curves = bench.lightcurves();
    create_dir(out)?;
    write(&out.join("lightcurves.csv"), &write_lightcurve_file(&curves, &cfg.dataset))?;
    let mut labels = String::from("id,label\n");
    for lc in &curves {
        labels.push_str(&format!("{},{}\n", lc.id, lc.label.as_deref().unwrap_or("")));
    }
    write(&out.join("labels.csv"), &labels)?;
    write(&out.join("truth.csv"), &write_truth(&bench.curves))?;
    write(&out.join("hyperparameters.txt"), &bench.hyper.to_kv().to_text())?;
    println!("simulated {} curves into {}", curves.len(), out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = resolve_config(&cli.global)?;
    if let Some(w) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::new("InvalidParameter", e))?;
    }
    match &cli.command {
        Command::Ingest { input, out, labels } => cmd_ingest(&cfg, input, out, labels.as_deref()),
        Command::Fit { store, out } => cmd_fit(&cfg, store, out),
        Command::Features { store, out } => cmd_features(&cfg, store, out),
        Command::Train { features, out } => cmd_train(&cfg, features, out),
        Command::Evaluate { features, model, out } => cmd_evaluate(&cfg, features, model.as_deref(), out),
        Command::Select { features, out } => cmd_select(&cfg, features, out),
        Command::Simulate { out } => cmd_simulate(&cfg, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}: {}", f.code, f.message);
            ExitCode::FAILURE
        }
    }
}
