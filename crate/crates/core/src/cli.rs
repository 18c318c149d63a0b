//! The `texstage` command line: extract, train, classify, sweep, evaluate,
//! trend, synth and serve.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{
    day_density, load_dataset, save_dataset, synth_texture_with_density, write_dataset, LabeledSample, PhotoTriplet,
    SYNTH_DENSITIES,
};
use crate::error::{Error, Result};
use crate::glcm::{FeatureConfig, FeatureVector, FormulaMode, GlcmConfig, Offset};
use crate::imaging::GrayScaling;
use crate::knn::{sweep_k, to_binary, BinaryLabel, Model, Normalization, StageLabel, SweepResult};
use crate::metrics::{self, accuracy, confusion, macro_metrics, percent, weighted_binary_accuracy, ConfusionMatrix, MacroReport};
use crate::dataset::Extracted;
use crate::pipeline::{extract_path, extract_triplet, verdict_for};
use crate::service::DEFAULT_MAX_UPLOAD_BYTES;

pub const CONFIG_ENV: &str = "TEXSTAGE_CONFIG";
pub const DEFAULT_K: usize = 6;

#[derive(Debug, Parser)]
#[command(name = "texstage", version, about = "Classify mask service stage from micro-photo texture")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Number of gray levels M.
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Displacements as `dr,dc` pairs separated by `;`, e.g. `0,1;-1,1`.
    #[arg(long, global = true, value_parser = parse_offset_list, allow_hyphen_values = true)]
    pub offsets: Option<OffsetList>,
    /// Count each pair in both directions.
    #[arg(long, global = true)]
    pub symmetric: Option<bool>,
    /// Texture formulas: `paper` or `standard`.
    #[arg(long, global = true, value_parser = parse_formula)]
    pub formula: Option<FormulaMode>,
    /// Gray-level range: `fixed` (0..=255) or `min-max` (per image).
    #[arg(long, global = true, value_parser = parse_scaling)]
    pub scaling: Option<GrayScaling>,
    /// Feature normalization: `none` or `zscore`.
    #[arg(long, global = true, value_parser = parse_normalize)]
    pub normalize: Option<Normalization>,
    /// Number of neighbors.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Also report the two-way verdict (types I and II merged).
    #[arg(long, global = true)]
    pub binary: bool,
    /// Output format: `text` or `json`.
    #[arg(long, global = true, value_parser = parse_format)]
    pub format: Option<OutputFormat>,
    /// Seed for synthetic generation.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON file with defaults for any of the flags above.
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract texture features from images into a dataset CSV.
    Extract(ExtractArgs),
    /// Store a labeled dataset as a KNN model.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify one image, or three images of one session (left, middle, right).
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(required = true, num_args = 1..=3)]
        images: Vec<PathBuf>,
    },
    /// Accuracy for each k in a range.
    Sweep {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        eval: PathBuf,
        #[arg(long, default_value_t = 4)]
        k_min: usize,
        #[arg(long, default_value_t = 16)]
        k_max: usize,
    },
    /// Confusion matrix and metrics of a model on a labeled dataset.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        eval: PathBuf,
    },
    /// Per-day feature means.
    Trend {
        #[arg(long)]
        dataset: PathBuf,
        /// Also write the table as CSV for plotting.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write synthetic mask textures and a triplet manifest.
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        /// Sessions per stage.
        #[arg(long, default_value_t = 10)]
        per_class: usize,
        /// Grade impurity by day 0..=5 instead of one density per stage.
        #[arg(long)]
        by_day: bool,
    },
    /// Run the HTTP inference service.
    Serve {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = DEFAULT_MAX_UPLOAD_BYTES)]
        max_upload_bytes: usize,
    },
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Images; grouped in threes with `--triplets`.
    pub images: Vec<PathBuf>,
    /// Use day for every image on the command line.
    #[arg(long)]
    pub day: Option<i64>,
    /// Average consecutive groups of three images into one sample.
    #[arg(long)]
    pub triplets: bool,
    /// CSV with columns source_id,day,left,middle,right[,condition].
    #[arg(long, conflicts_with_all = ["images", "day", "triplets"])]
    pub manifest: Option<PathBuf>,
    /// Dataset CSV to write (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

fn pick<T>(s: Option<String>, f: fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Option<T>, String> {
    s.map(|s| f(&s)).transpose()
}

/// Offsets as parsed from `--offsets`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OffsetList(pub Vec<Offset>);

fn parse_offset_list(s: &str) -> std::result::Result<OffsetList, String> {
    parse_offsets(s).map(OffsetList)
}

fn parse_offsets(s: &str) -> std::result::Result<Vec<Offset>, String> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once(',')
                .ok_or_else(|| format!("offset `{pair}` is not `dr,dc`"))?;
            let dr = a.trim().parse().map_err(|_| format!("bad row delta in `{pair}`"))?;
            let dc = b.trim().parse().map_err(|_| format!("bad column delta in `{pair}`"))?;
            Ok(Offset::new(dr, dc))
        })
        .collect()
}

fn parse_formula(s: &str) -> std::result::Result<FormulaMode, String> {
    match s {
        "paper" => Ok(FormulaMode::Paper),
        "standard" => Ok(FormulaMode::Standard),
        _ => Err(format!("unknown formula `{s}` (paper|standard)")),
    }
}

fn parse_scaling(s: &str) -> std::result::Result<GrayScaling, String> {
    match s {
        "fixed" => Ok(GrayScaling::Fixed),
        "min-max" | "minmax" => Ok(GrayScaling::MinMax),
        _ => Err(format!("unknown scaling `{s}` (fixed|min-max)")),
    }
}

fn parse_normalize(s: &str) -> std::result::Result<Normalization, String> {
    match s {
        "none" => Ok(Normalization::None),
        "zscore" => Ok(Normalization::Zscore),
        _ => Err(format!("unknown normalization `{s}` (none|zscore)")),
    }
}

fn parse_format(s: &str) -> std::result::Result<OutputFormat, String> {
    match s {
        "text" => Ok(OutputFormat::Text),
        "json" => Ok(OutputFormat::Json),
        _ => Err(format!("unknown format `{s}` (text|json)")),
    }
}

/// Keys accepted in the JSON file named by `--config` / `TEXSTAGE_CONFIG`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub levels: Option<usize>,
    pub offsets: Option<OffsetsSpec>,
    pub symmetric: Option<bool>,
    pub formula: Option<String>,
    pub scaling: Option<String>,
    pub normalize: Option<String>,
    pub k: Option<usize>,
    pub binary: Option<bool>,
    pub format: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OffsetsSpec {
    Text(String),
    Pairs(Vec<[i32; 2]>),
}

/// Fully resolved settings: flags override the config file, which overrides
/// built-in defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub features: FeatureConfig,
    /// Explicit `k`; training falls back to [`DEFAULT_K`], classification
    /// and evaluation to the model's stored value.
    pub k: Option<usize>,
    pub normalization: Normalization,
    pub binary: bool,
    pub format: OutputFormat,
    pub seed: u64,
}

impl CliConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<CliConfig> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let cfg_err = Error::InvalidConfig;
        let file_offsets = match file.offsets {
            Some(OffsetsSpec::Text(s)) => Some(parse_offsets(&s).map_err(cfg_err)?),
            Some(OffsetsSpec::Pairs(p)) => Some(p.into_iter().map(|[r, c]| Offset::new(r, c)).collect()),
            None => None,
        };

        let defaults = GlcmConfig::default();
        let glcm = GlcmConfig {
            m: args.levels.or(file.levels).unwrap_or(defaults.m),
            offsets: args.offsets.clone().map(|o| o.0).or(file_offsets).unwrap_or(defaults.offsets),
            symmetric: args.symmetric.or(file.symmetric).unwrap_or(defaults.symmetric),
            formula: match args.formula {
                Some(f) => f,
                None => pick(file.formula, parse_formula).map_err(cfg_err)?.unwrap_or_default(),
            },
        };
        let features = FeatureConfig {
            glcm,
            scaling: match args.scaling {
                Some(s) => s,
                None => pick(file.scaling, parse_scaling).map_err(cfg_err)?.unwrap_or_default(),
            },
        };
        features.validate()?;
        let k = args.k.or(file.k);
        if k == Some(0) {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        Ok(CliConfig {
            features,
            k,
            normalization: match args.normalize {
                Some(n) => n,
                None => pick(file.normalize, parse_normalize).map_err(cfg_err)?.unwrap_or_default(),
            },
            binary: args.binary || file.binary.unwrap_or(false),
            format: match args.format {
                Some(f) => f,
                None => pick(file.format, parse_format).map_err(cfg_err)?.unwrap_or_default(),
            },
            seed: args.seed.or(file.seed).unwrap_or(0),
        })
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match run(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = CliConfig::resolve(&cli.global)?;
    match cli.command {
        Command::Extract(a) => cmd_extract(&cfg, &a, out, err),
        Command::Train { dataset, out: path } => {
            let model = cmd_train(&cfg, &dataset)?;
            model.save(&path)?;
            emit(
                &cfg,
                out,
                &serde_json::json!({
                    "model": path,
                    "samples": model.samples().len(),
                    "k": model.k(),
                    "fingerprint": model.fingerprint(),
                }),
                || {
                    format!(
                        "wrote {} ({} samples, k = {}, fingerprint {})\n",
                        path.display(),
                        model.samples().len(),
                        model.k(),
                        model.fingerprint()
                    )
                },
            )?;
            Ok(0)
        }
        Command::Classify { model, images } => {
            let model = Model::load(&model)?;
            let report = cmd_classify(&cfg, &model, &images)?;
            emit(&cfg, out, &report, || report.to_text())?;
            Ok(0)
        }
        Command::Sweep { train, eval, k_min, k_max } => {
            let result = cmd_sweep(&cfg, &train, &eval, k_min, k_max)?;
            emit(&cfg, out, &result, || render_sweep(&result))?;
            Ok(0)
        }
        Command::Evaluate { model, eval } => {
            let model = Model::load(&model)?;
            let report = cmd_evaluate(&cfg, &model, &eval)?;
            emit(&cfg, out, &report, || report.to_text())?;
            Ok(0)
        }
        Command::Trend { dataset, out: csv_path } => {
            let rows = cmd_trend(&load_dataset(&dataset)?)?;
            if let Some(p) = &csv_path {
                write_trend_csv(&rows, p)?;
            }
            emit(&cfg, out, &rows, || render_trend(&rows))?;
            Ok(0)
        }
        Command::Synth { out_dir, per_class, by_day } => {
            let manifest = cmd_synth(&cfg, &out_dir, per_class, by_day)?;
            let _ = writeln!(err, "wrote {}", manifest.display());
            Ok(0)
        }
        Command::Serve { model, port, max_upload_bytes } => {
            let model = Model::load(&model)?;
            model.check_fingerprint(&cfg.features.fingerprint())?;
            let rt = tokio::runtime::Runtime::new().map_err(|e| Error::io("tokio runtime", e))?;
            rt.block_on(crate::service::serve(model, port, max_upload_bytes))
                .map_err(|e| Error::io(format!("port {port}"), e))?;
            Ok(0)
        }
    }
}

fn emit<T: Serialize>(cfg: &CliConfig, out: &mut dyn Write, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    let body = match cfg.format {
        OutputFormat::Json => serde_json::to_string_pretty(value)? + "\n",
        OutputFormat::Text => text(),
    };
    out.write_all(body.as_bytes()).map_err(|e| Error::io("stdout", e))
}

enum Job {
    Image { id: String, day: i64, path: PathBuf },
    Triplet { id: String, triplet: PhotoTriplet },
}

#[derive(Debug, Deserialize)]
struct ManifestRow {
    source_id: String,
    day: i64,
    left: PathBuf,
    middle: PathBuf,
    right: PathBuf,
    #[serde(default)]
    condition: String,
}

fn read_manifest(path: &Path) -> Result<Vec<Job>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let mut jobs = Vec::new();
    for row in r.deserialize::<ManifestRow>() {
        let row = row.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        jobs.push(Job::Triplet {
            id: row.source_id,
            triplet: PhotoTriplet {
                left: resolve(row.left),
                middle: resolve(row.middle),
                right: resolve(row.right),
                day: row.day,
                condition: row.condition,
            },
        });
    }
    Ok(jobs)
}

/// Batch extraction. Failures are reported per input and skipped; the exit
/// code is nonzero if any input failed. Rows keep input order.
pub fn cmd_extract(cfg: &CliConfig, a: &ExtractArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let jobs = if let Some(m) = &a.manifest {
        read_manifest(m)?
    } else {
        if a.images.is_empty() {
            return Err(Error::InvalidInput("no images given".into()));
        }
        let day = a
            .day
            .ok_or_else(|| Error::InvalidInput("--day is required without --manifest".into()))?;
        crate::dataset::stage_of_day(day)?;
        if a.triplets {
            if !a.images.len().is_multiple_of(3) {
                return Err(Error::InvalidInput(format!(
                    "--triplets needs a multiple of three images, got {}",
                    a.images.len()
                )));
            }
            a.images
                .chunks_exact(3)
                .map(|c| Job::Triplet {
                    id: c[0].display().to_string(),
                    triplet: PhotoTriplet {
                        left: c[0].clone(),
                        middle: c[1].clone(),
                        right: c[2].clone(),
                        day,
                        condition: String::new(),
                    },
                })
                .collect()
        } else {
            a.images
                .iter()
                .map(|p| Job::Image {
                    id: p.display().to_string(),
                    day,
                    path: p.clone(),
                })
                .collect()
        }
    };

    let results: Vec<(String, Result<LabeledSample>)> = jobs
        .par_iter()
        .map(|job| match job {
            Job::Image { id, day, path } => (
                id.clone(),
                extract_path(path, &cfg.features).and_then(|x| LabeledSample::new(id.clone(), *day, x.features)),
            ),
            Job::Triplet { id, triplet } => (
                id.clone(),
                extract_triplet(triplet, &cfg.features)
                    .and_then(|x| LabeledSample::new(id.clone(), triplet.day, x.features)),
            ),
        })
        .collect();

    let mut samples = Vec::new();
    let mut failed = 0;
    for (id, r) in results {
        match r {
            Ok(s) => samples.push(s),
            Err(e) => {
                failed += 1;
                let _ = writeln!(err, "skipped {id}: {e}");
            }
        }
    }
    let _ = writeln!(err, "extracted {} samples, {failed} failed", samples.len());
    match &a.out {
        Some(p) => save_dataset(&samples, p)?,
        None => write_dataset(&samples, &mut *out)?,
    }
    Ok(if failed > 0 { 1 } else { 0 })
}

pub fn cmd_train(cfg: &CliConfig, dataset: &Path) -> Result<Model> {
    let samples = load_dataset(dataset)?;
    if samples.is_empty() {
        return Err(Error::InvalidInput(format!("{} has no samples", dataset.display())));
    }
    Model::new(
        samples.iter().map(LabeledSample::to_training).collect(),
        cfg.k.unwrap_or(DEFAULT_K),
        cfg.normalization,
        cfg.features.clone(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub stage: StageLabel,
    pub phrase: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binary: Option<BinaryLabel>,
    pub features: FeatureVector,
    pub neighbors: Vec<crate::knn::Neighbor>,
}

impl ClassifyReport {
    fn to_text(&self) -> String {
        let mut s = format!("stage: {} ({})\n", self.stage, self.stage.phrase());
        if let Some(b) = self.binary {
            s += &format!("binary: {b}\n");
        }
        let f = self.features;
        s += &format!(
            "features: contrast={:.6} correlation={:.6} energy={:.6} homogeneity={:.6}\n",
            f.contrast, f.correlation, f.energy, f.homogeneity
        );
        for n in &self.neighbors {
            s += &format!("  neighbor {} {} d={:.6}\n", n.id, n.label, n.distance);
        }
        s
    }
}

/// One image, or three averaged as a session.
pub fn cmd_classify(cfg: &CliConfig, model: &Model, images: &[PathBuf]) -> Result<ClassifyReport> {
    model.check_fingerprint(&cfg.features.fingerprint())?;
    let x: Extracted = match images {
        [one] => extract_path(one, &cfg.features)?,
        [l, m, r] => extract_triplet(
            &PhotoTriplet {
                left: l.clone(),
                middle: m.clone(),
                right: r.clone(),
                day: 0,
                condition: String::new(),
            },
            &cfg.features,
        )?,
        _ => return Err(Error::InvalidInput("classify takes one image or three".into())),
    };
    let model = match cfg.k {
        Some(k) => model.with_k(k)?,
        None => model.clone(),
    };
    let (v, neighbors) = verdict_for(&model, &x, cfg.binary)?;
    Ok(ClassifyReport {
        stage: v.stage,
        phrase: v.stage.phrase().to_string(),
        binary: v.binary,
        features: v.features,
        neighbors,
    })
}

pub fn cmd_sweep(cfg: &CliConfig, train: &Path, eval: &Path, k_min: usize, k_max: usize) -> Result<SweepResult> {
    if k_min > k_max {
        return Err(Error::InvalidConfig(format!("k_min {k_min} exceeds k_max {k_max}")));
    }
    let train: Vec<_> = load_dataset(train)?.iter().map(LabeledSample::to_training).collect();
    let eval: Vec<_> = load_dataset(eval)?.iter().map(|s| (s.features, s.label)).collect();
    sweep_k(&train, &eval, k_min, k_max, cfg.normalization)
}

pub fn render_sweep(r: &SweepResult) -> String {
    let mut s = format!("{:>4}{:>9}{:>7}{:>10}\n", "k", "correct", "total", "accuracy");
    for row in &r.rows {
        s += &format!("{:>4}{:>9}{:>7}{:>10}\n", row.k, row.correct, row.total, percent(row.accuracy));
    }
    let best = r.best();
    s += &format!("best k = {} ({}/{}, {})\n", best.k, best.correct, best.total, percent(best.accuracy));
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinaryReport {
    pub confusion: ConfusionMatrix<BinaryLabel>,
    pub accuracy: f64,
    /// Group-share weighted accuracy; absent when one group has no samples.
    pub weighted_accuracy: Option<f64>,
    pub metrics: MacroReport<BinaryLabel>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix<StageLabel>,
    pub accuracy: f64,
    pub metrics: MacroReport<StageLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binary: Option<BinaryReport>,
}

impl EvalReport {
    pub fn to_text(&self) -> String {
        let mut s = metrics::render_text(&self.confusion);
        if let Some(b) = &self.binary {
            s += "\nbinary (types I and II merged as normal use)\n";
            s += &metrics::render_text(&b.confusion);
            if let Some(w) = b.weighted_accuracy {
                s += &format!("weighted accuracy {}\n", percent(w));
            }
        }
        s
    }
}

pub fn evaluation_report(truth: &[StageLabel], pred: &[StageLabel], binary: bool) -> Result<EvalReport> {
    let cm = confusion(&StageLabel::ALL, truth, pred)?;
    let binary = if binary {
        let bcm = cm.collapse(BinaryLabel::ALL.to_vec(), to_binary)?;
        let group = |i: usize| (bcm.count(i, i), bcm.rows()[i].iter().sum::<u64>());
        let ((ca, ta), (cb, tb)) = (group(0), group(1));
        Some(BinaryReport {
            accuracy: accuracy(&bcm)?,
            weighted_accuracy: weighted_binary_accuracy(ca, ta, cb, tb).ok(),
            metrics: macro_metrics(&bcm),
            confusion: bcm,
        })
    } else {
        None
    };
    Ok(EvalReport {
        accuracy: accuracy(&cm)?,
        metrics: macro_metrics(&cm),
        confusion: cm,
        binary,
    })
}

pub fn cmd_evaluate(cfg: &CliConfig, model: &Model, eval: &Path) -> Result<EvalReport> {
    model.check_fingerprint(&cfg.features.fingerprint())?;
    let samples = load_dataset(eval)?;
    if samples.is_empty() {
        return Err(Error::InvalidInput(format!("{} has no samples", eval.display())));
    }
    let model = match cfg.k {
        Some(k) => model.with_k(k)?,
        None => model.clone(),
    };
    let truth: Vec<_> = samples.iter().map(|s| s.label).collect();
    let pred = samples
        .iter()
        .map(|s| model.classify(&s.features).map(|p| p.label))
        .collect::<Result<Vec<_>>>()?;
    evaluation_report(&truth, &pred, cfg.binary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub day: i64,
    pub count: usize,
    pub contrast: f64,
    pub correlation: f64,
    pub energy: f64,
    pub homogeneity: f64,
}

/// Mean of each feature per day, ordered by day.
pub fn cmd_trend(samples: &[LabeledSample]) -> Result<Vec<TrendRow>> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("dataset is empty".into()));
    }
    let mut by_day: BTreeMap<i64, Vec<[f64; 4]>> = BTreeMap::new();
    for s in samples {
        by_day.entry(s.day).or_default().push(s.features.to_array());
    }
    Ok(by_day
        .into_iter()
        .map(|(day, rows)| {
            let n = rows.len() as f64;
            let mut mean = [0.0; 4];
            for r in &rows {
                for d in 0..4 {
                    mean[d] += r[d];
                }
            }
            mean.iter_mut().for_each(|m| *m /= n);
            TrendRow {
                day,
                count: rows.len(),
                contrast: mean[0],
                correlation: mean[1],
                energy: mean[2],
                homogeneity: mean[3],
            }
        })
        .collect())
}

pub fn render_trend(rows: &[TrendRow]) -> String {
    let mut s = format!(
        "{:>4}{:>7}{:>14}{:>14}{:>14}{:>14}\n",
        "day", "count", "contrast", "correlation", "energy", "homogeneity"
    );
    for r in rows {
        s += &format!(
            "{:>4}{:>7}{:>14.6}{:>14.6}{:>14.6}{:>14.6}\n",
            r.day, r.count, r.contrast, r.correlation, r.energy, r.homogeneity
        );
    }
    s
}

pub fn write_trend_csv(rows: &[TrendRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Writes PNG triplets and `manifest.csv` into `dir`. Returns the manifest path.
pub fn cmd_synth(cfg: &CliConfig, dir: &Path, per_class: usize, by_day: bool) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut sessions: Vec<(i64, f64)> = Vec::new();
    if by_day {
        for day in 0..=crate::dataset::MAX_DAY {
            sessions.extend(std::iter::repeat_n((day, day_density(day)), per_class));
        }
    } else {
        for (class, density) in SYNTH_DENSITIES.iter().enumerate() {
            sessions.extend(std::iter::repeat_n((2 * class as i64, *density), per_class));
        }
    }
    let manifest = dir.join("manifest.csv");
    let mut w = csv::Writer::from_path(&manifest).map_err(|e| Error::InvalidInput(format!("{e}")))?;
    let csv_err = |e: csv::Error| Error::InvalidInput(format!("{}: {e}", manifest.display()));
    w.write_record(["source_id", "day", "left", "middle", "right", "condition"])
        .map_err(csv_err)?;
    for (i, (day, density)) in sessions.into_iter().enumerate() {
        let id = format!("s{i:03}_d{day}");
        let mut names = Vec::with_capacity(3);
        for (slot, pos) in ["left", "middle", "right"].iter().enumerate() {
            let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add((i * 3 + slot) as u64);
            let name = format!("{id}_{pos}.png");
            let png = synth_texture_with_density(density, seed).to_png()?;
            std::fs::write(dir.join(&name), png).map_err(|e| Error::io(dir.join(&name), e))?;
            names.push(name);
        }
        w.write_record([id.as_str(), &day.to_string(), &names[0], &names[1], &names[2], "synthetic"])
            .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(&manifest, e))?;
    Ok(manifest)
}
