//! Command-line interface: feature extraction, synthetic corpus generation,
//! experiment runs and k-sweeps.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
//! `GENREFORGE_THREADS` caps extraction parallelism.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use genreforge::audio_io::{load_manifest, synthesize_corpus};
use genreforge::eval::{
    run_experiment, write_report_files, EvalError, ExperimentConfig, ExperimentMode,
};
use genreforge::features::{
    extract_dataset, read_features_csv, write_features_csv, FeatureConfig, FeatureError,
};
use genreforge::preprocess::PreprocessError;

#[derive(Parser)]
#[command(
    name = "genreforge",
    version,
    about = "Audio genre classification: extract features from WAV corpora, \
             run LDA / feature-selection experiments, reproduce accuracy tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract per-file feature vectors for a manifest into a CSV.
    Extract {
        /// Manifest CSV with header `path,label`.
        #[arg(long)]
        manifest: PathBuf,
        /// Output feature CSV.
        #[arg(long)]
        out: PathBuf,
        /// Short-term window in seconds.
        #[arg(long, default_value_t = 0.050)]
        window: f64,
        /// Short-term step in seconds.
        #[arg(long, default_value_t = 0.025)]
        step: f64,
        /// Mid-term window (and step) in seconds.
        #[arg(long = "mt-window", default_value_t = 1.0)]
        mt_window: f64,
    },
    /// Write the deterministic 20-file synthetic corpus and its manifest.
    SynthCorpus {
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Generator seed.
        #[arg(long)]
        seed: u64,
    },
    /// Run a part1 (LDA) or part2 (feature selection) experiment.
    Run {
        /// Feature CSV produced by `extract`.
        #[arg(long)]
        features: PathBuf,
        /// Experiment mode: part1 or part2.
        #[arg(long)]
        mode: String,
        /// Comma-separated feature names for part2 selection.
        #[arg(long)]
        select: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Train fraction of the stratified split.
        #[arg(long, default_value_t = 0.75)]
        split: f64,
        /// Neighbor count for the KNN table row (default 8 part1 / 7 part2).
        #[arg(long = "knn-k")]
        knn_k: Option<usize>,
        /// Also report accuracy on the held-out rows alone.
        #[arg(long = "holdout-only")]
        holdout_only: bool,
        /// Directory receiving report.{txt,json,csv} and plot data.
        #[arg(long = "report-dir")]
        report_dir: PathBuf,
    },
    /// Sweep KNN neighbor counts and write the (k, accuracy) curve.
    SweepK {
        #[arg(long)]
        features: PathBuf,
        /// Experiment mode: part1 or part2.
        #[arg(long)]
        mode: String,
        #[arg(long = "k-min", default_value_t = 1)]
        k_min: usize,
        #[arg(long = "k-max", default_value_t = 15)]
        k_max: usize,
        /// Output CSV of (x, y, label) rows.
        #[arg(long)]
        out: PathBuf,
    },
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

fn feature_exit(err: &FeatureError) -> u8 {
    match err {
        FeatureError::NonFinite { .. } => EXIT_NUMERICAL,
        _ => EXIT_DATA,
    }
}

fn preprocess_exit(err: &PreprocessError) -> u8 {
    match err {
        PreprocessError::SolveFailed | PreprocessError::IdenticalClassMeans => EXIT_NUMERICAL,
        _ => EXIT_DATA,
    }
}

fn eval_exit(err: &EvalError) -> u8 {
    match err {
        EvalError::Preprocess(p) => preprocess_exit(p),
        EvalError::Feature(f) => feature_exit(f),
        EvalError::BadSplitRatio(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

impl From<genreforge::audio_io::AudioError> for CliError {
    fn from(err: genreforge::audio_io::AudioError) -> Self {
        CliError {
            code: EXIT_DATA,
            message: err.to_string(),
        }
    }
}

impl From<FeatureError> for CliError {
    fn from(err: FeatureError) -> Self {
        CliError {
            code: feature_exit(&err),
            message: err.to_string(),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(err: EvalError) -> Self {
        CliError {
            code: eval_exit(&err),
            message: err.to_string(),
        }
    }
}

fn env_threads() -> usize {
    std::env::var("GENREFORGE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0)
}

fn parse_mode(mode: &str) -> Result<ExperimentMode, CliError> {
    ExperimentMode::parse(mode)
        .ok_or_else(|| CliError::usage(format!("unknown mode `{mode}`; expected part1 or part2")))
}

fn cmd_extract(
    manifest: PathBuf,
    out: PathBuf,
    window: f64,
    step: f64,
    mt_window: f64,
) -> Result<(), CliError> {
    if !(window > 0.0 && step > 0.0 && step <= window && mt_window > 0.0) {
        return Err(CliError::usage(
            "require 0 < step <= window and mt-window > 0",
        ));
    }
    let config = FeatureConfig {
        window_s: window,
        step_s: step,
        mt_window_s: mt_window,
        mt_step_s: mt_window,
        ..FeatureConfig::default()
    };
    let manifest_data = load_manifest(&manifest)?;
    let dataset = extract_dataset(&manifest_data, &manifest, &config, env_threads())?;
    write_features_csv(&out, &dataset)?;
    println!(
        "wrote {} rows x {} features to {}",
        dataset.n_rows(),
        dataset.n_features(),
        out.display()
    );
    Ok(())
}

fn cmd_synth_corpus(out: PathBuf, seed: u64) -> Result<(), CliError> {
    let (manifest, manifest_path) = synthesize_corpus(&out, seed)?;
    println!(
        "wrote {} clips and {}",
        manifest.entries.len(),
        manifest_path.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    features: PathBuf,
    mode: String,
    select: Option<String>,
    seed: u64,
    split: f64,
    knn_k: Option<usize>,
    holdout_only: bool,
    report_dir: PathBuf,
) -> Result<(), CliError> {
    let mode = parse_mode(&mode)?;
    if !(split > 0.0 && split < 1.0) {
        return Err(CliError::usage(format!(
            "--split {split} out of range; need 0 < split < 1"
        )));
    }
    if knn_k == Some(0) {
        return Err(CliError::usage("--knn-k must be at least 1"));
    }
    if select.is_some() && mode != ExperimentMode::Part2Select {
        return Err(CliError::usage("--select is only valid with --mode part2"));
    }
    let mut cfg = ExperimentConfig::new(mode);
    cfg.seed = seed;
    cfg.split_ratio = split;
    cfg.knn_k = knn_k;
    cfg.holdout_only = holdout_only;
    cfg.features_path = features.display().to_string();
    if let Some(list) = select {
        let names: Vec<String> = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect();
        if names.is_empty() {
            return Err(CliError::usage("--select lists no feature names"));
        }
        cfg.selected_features = names;
    }

    let dataset = read_features_csv(&features)?;
    let report = run_experiment(&cfg, &dataset)?;
    let written = write_report_files(&report, &report_dir).map_err(|e| CliError {
        code: eval_exit(&e),
        message: e.to_string(),
    })?;
    print!("{}", genreforge::eval::render_text(&report));
    println!("report files in {}: {}", report_dir.display(), written.join(", "));
    Ok(())
}

fn cmd_sweep_k(
    features: PathBuf,
    mode: String,
    k_min: usize,
    k_max: usize,
    out: PathBuf,
) -> Result<(), CliError> {
    let mode = parse_mode(&mode)?;
    if k_min == 0 || k_max < k_min {
        return Err(CliError::usage(
            "require 1 <= k-min <= k-max for the sweep range",
        ));
    }
    let mut cfg = ExperimentConfig::new(mode);
    cfg.k_min = k_min;
    cfg.k_max = k_max;
    cfg.features_path = features.display().to_string();
    let dataset = read_features_csv(&features)?;
    let report = run_experiment(&cfg, &dataset)?;
    let (csv, _) = genreforge::eval::emit_plot_data(&report, genreforge::eval::PlotSeries::KSweep)?;
    std::fs::write(&out, csv).map_err(|e| CliError {
        code: EXIT_DATA,
        message: e.to_string(),
    })?;
    println!("wrote k sweep ({k_min}..={k_max}) to {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    let result = match cli.command {
        Command::Extract {
            manifest,
            out,
            window,
            step,
            mt_window,
        } => cmd_extract(manifest, out, window, step, mt_window),
        Command::SynthCorpus { out, seed } => cmd_synth_corpus(out, seed),
        Command::Run {
            features,
            mode,
            select,
            seed,
            split,
            knn_k,
            holdout_only,
            report_dir,
        } => cmd_run(
            features,
            mode,
            select,
            seed,
            split,
            knn_k,
            holdout_only,
            report_dir,
        ),
        Command::SweepK {
            features,
            mode,
            k_min,
            k_max,
            out,
        } => cmd_sweep_k(features, mode, k_min, k_max, out),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
