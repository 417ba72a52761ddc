//! `monoaug` command line: augment, eval, stats and preview.
//!
//! Exit status is 0 on success, 1 for runtime or data failures and 2 for
//! configuration or usage errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use monoaug_core::augment::OpKind;
use monoaug_core::eval::{evaluate, frequency_row, ClassThresholds, EvalFrame, Interpolation};
use monoaug_core::{EvalClass, ObjectLabel};

use crate::config::{check_thresholds, ConfigError, RunConfig};
use crate::kitti_io::{
    load_sample, read_label_dir, resolve_label_dir, write_png, DatasetIndex, KittiError,
    SplitManifest,
};
use crate::pipeline::{augment_one, run_pipeline, ScheduleEntry};
use crate::preview::{overlays, render};
use crate::report::{eval_json, eval_table, stats_json, stats_table};

#[derive(Debug, Parser)]
#[command(
    name = "monoaug",
    version,
    about = "Augmentation and evaluation toolkit for KITTI-style monocular 3D detection"
)]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Augment a split and write a new KITTI-layout tree.
    Augment(AugmentArgs),
    /// Score predictions against ground truth.
    Eval(EvalArgs),
    /// Class frequencies and inverse-frequency weights of a split.
    Stats(StatsArgs),
    /// Render one sample before and after an op.
    Preview(PreviewArgs),
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Id list; every image of the input when absent.
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    /// Per-class overrides, e.g. `car=0.5,pedestrian=0.25`.
    #[arg(long)]
    pub iou: Option<String>,
    /// One table per listed threshold, applied to every class.
    #[arg(long, value_delimiter = ',', conflicts_with = "iou")]
    pub iou_all: Option<Vec<f64>>,
    /// `r40` or `r11`.
    #[arg(long)]
    pub interp: Option<String>,
    /// Write the JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub labels: PathBuf,
    /// Id list; every label file when absent.
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PreviewArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub sample: String,
    #[arg(long)]
    pub op: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Data(#[from] KittiError),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Data(_) | CliError::Runtime(_) => 1,
        }
    }
}

type CliResult = Result<u8, CliError>;

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
}

fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    match &cli.config {
        Some(p) => Ok(RunConfig::load(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn seed(cli: &Cli, cfg: &RunConfig) -> u64 {
    cli.seed.or(cfg.seed).unwrap_or(0)
}

fn pick(flag: &Option<PathBuf>, file: &Option<PathBuf>, what: &str) -> Result<PathBuf, CliError> {
    flag.clone()
        .or_else(|| file.clone())
        .ok_or_else(|| CliError::Usage(format!("no {what} given (flag or config file)")))
}

fn split_for(index: &DatasetIndex, path: Option<&Path>) -> Result<SplitManifest, CliError> {
    let split = match path {
        Some(p) => SplitManifest::read(p)?,
        None => SplitManifest::all(index),
    };
    split.validate(index)?;
    Ok(split)
}

fn cmd_augment(cli: &Cli, args: &AugmentArgs) -> CliResult {
    let cfg = load_config(cli)?;
    let input = pick(&args.input, &cfg.input, "input directory")?;
    let output = pick(&args.output, &cfg.output, "output directory")?;
    let split_path = args.split.clone().or_else(|| cfg.split.clone());
    let schedule = cfg.resolve_schedule()?;
    let workers = cli
        .workers
        .or(cfg.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    if let (Ok(a), Ok(b)) = (fs::canonicalize(&input), fs::canonicalize(&output)) {
        if a == b {
            return Err(CliError::Usage(format!(
                "output {} is the input directory",
                output.display()
            )));
        }
    }
    let index = DatasetIndex::scan(&input)?;
    let split = split_for(&index, split_path.as_deref())?;
    let report = run_pipeline(&index, &split, &schedule, seed(cli, &cfg), &output, workers)?;
    print!("{report}");
    Ok(if report.success() { 0 } else { 1 })
}

fn parse_iou(spec: &str, base: &mut ClassThresholds) -> Result<(), CliError> {
    for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--iou entry `{part}` is not class=value")))?;
        let class: EvalClass = name
            .trim()
            .parse()
            .map_err(|e| CliError::Usage(format!("--iou: {e}")))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--iou: `{value}` is not a number")))?;
        base.set(class, v);
    }
    Ok(())
}

fn read_labels(
    dir: &Path,
) -> Result<std::collections::BTreeMap<String, Vec<ObjectLabel>>, CliError> {
    Ok(read_label_dir(&resolve_label_dir(dir))?)
}

fn cmd_eval(cli: &Cli, args: &EvalArgs) -> CliResult {
    let cfg = load_config(cli)?;
    let mut eval = cfg.eval_config()?;
    if let Some(spec) = &args.iou {
        for set in &mut eval.thresholds {
            parse_iou(spec, set)?;
        }
    }
    if let Some(all) = &args.iou_all {
        eval.thresholds = all.iter().map(|&t| ClassThresholds::uniform(t)).collect();
    }
    if eval.thresholds.is_empty() {
        return Err(CliError::Usage("--iou-all: no thresholds".into()));
    }
    for t in &eval.thresholds {
        check_thresholds(t)?;
    }
    if let Some(i) = &args.interp {
        eval.interpolation = i
            .parse::<Interpolation>()
            .map_err(|_| CliError::Usage(format!("--interp: expected r40 or r11, got `{i}`")))?;
    }

    let gt = read_labels(&args.gt)?;
    let mut pred = read_labels(&args.pred)?;
    let gt_ids: BTreeSet<&String> = gt.keys().collect();
    let pred_ids: BTreeSet<&String> = pred.keys().collect();
    if gt_ids != pred_ids {
        let missing: Vec<&str> = gt_ids
            .difference(&pred_ids)
            .take(5)
            .map(|s| s.as_str())
            .collect();
        let extra: Vec<&str> = pred_ids
            .difference(&gt_ids)
            .take(5)
            .map(|s| s.as_str())
            .collect();
        return Err(CliError::Runtime(format!(
            "ground truth and prediction ids differ (no predictions for {missing:?}, no ground truth for {extra:?})"
        )));
    }
    let frames: Vec<EvalFrame> = gt
        .into_iter()
        .map(|(id, ground_truth)| {
            let predictions = pred.remove(&id).unwrap_or_default();
            EvalFrame {
                id,
                ground_truth,
                predictions,
            }
        })
        .collect();
    let report = evaluate(&frames, &eval).map_err(|e| CliError::Runtime(e.to_string()))?;
    print!("{}", eval_table(&report));
    if let Some(path) = &args.report {
        write_json(path, &eval_json(&report))?;
    }
    Ok(0)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| {
        CliError::Data(KittiError::Io {
            path: path.to_owned(),
            source: e,
        })
    })
}

fn cmd_stats(cli: &Cli, args: &StatsArgs) -> CliResult {
    let cfg = load_config(cli)?;
    let rules = cfg.eval_config()?.rules;
    let dir = resolve_label_dir(&args.labels);
    let mut labels = read_label_dir(&dir)?;
    let split = match &args.split {
        Some(p) => SplitManifest::read(p)?,
        None => SplitManifest::new("all", labels.keys().cloned().collect())?,
    };
    if split.ids.is_empty() {
        return Err(CliError::Runtime(format!(
            "split `{}` is empty",
            split.name
        )));
    }
    let mut selected = Vec::new();
    for id in &split.ids {
        match labels.remove(id) {
            Some(l) => selected.extend(l),
            None => {
                return Err(KittiError::MissingFile(dir.join(format!("{id}.txt"))).into());
            }
        }
    }
    let rows: Vec<_> = rules.iter().map(|r| frequency_row(&selected, r)).collect();
    print!("{}", stats_table(&rows));
    if let Some(path) = &args.report {
        write_json(path, &stats_json(&rows))?;
    }
    Ok(if rows.iter().any(|r| r.error.is_some()) {
        1
    } else {
        0
    })
}

fn cmd_preview(cli: &Cli, args: &PreviewArgs) -> CliResult {
    let cfg = load_config(cli)?;
    let op: OpKind = args
        .op
        .parse()
        .map_err(|e| CliError::Usage(format!("{e}")))?;
    let config = cfg.augment_for(op)?;
    let input = pick(&args.input, &cfg.input, "input directory")?;
    let index = DatasetIndex::scan(&input)?;
    let split = split_for(&index, cfg.split.as_deref())?;
    let ordinal = split
        .ids
        .iter()
        .position(|id| *id == args.sample)
        .ok_or_else(|| {
            CliError::Runtime(format!(
                "sample `{}` not in split `{}`",
                args.sample, split.name
            ))
        })?;
    let (original, _) = load_sample(&index, &args.sample)?;
    let schedule = [ScheduleEntry { op, config }];
    let augmented = augment_one(&index, &split, ordinal, &schedule, seed(cli, &cfg))
        .map_err(|e| CliError::Runtime(format!("sample {}: {e}", args.sample)))?;
    let ov = overlays(&original, &augmented, op);
    write_png(&render(&original, &augmented, &ov), &args.out)?;
    println!("wrote {} ({} boxes drawn)", args.out.display(), ov.len());
    Ok(0)
}

pub fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Augment(a) => cmd_augment(cli, a),
        Command::Eval(a) => cmd_eval(cli, a),
        Command::Stats(a) => cmd_stats(cli, a),
        Command::Preview(a) => cmd_preview(cli, a),
    }
}

/// Parse `args` (program name first), run, and return the exit status.
pub fn run_from<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    init_logging(cli.verbose);
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run_from(std::env::args_os()))
}
