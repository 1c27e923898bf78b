//! The `fvq` command-line tool.
//!
//! Extraction writes a feature CSV so that training and evaluation never
//! re-decode video. Every command that takes `--seed` is byte-reproducible.

pub mod commands;
pub mod config;
pub mod files;

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use crate::evaluation::{ranking_table, Mode};

pub use commands::{SynthOptions, TrainReport};
pub use config::RunConfig;
pub use files::{read_features, FeatureTable};

#[derive(Debug, Parser)]
#[command(
    name = "fvq",
    version,
    about = "Full- and no-reference video quality features and regression"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// TOML run configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// fr (reference,processed pairs) or nr (processed only).
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    /// Seed for every random choice of the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decode every manifest entry and write one feature row per entry.
    ///
    /// Inputs are `.y4m` files or raw planar `.yuv` (geometry from the
    /// config). 10-bit raw samples are 16-bit little-endian words holding
    /// values in the low 10 bits.
    Extract {
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Output feature CSV.
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Train a regressor on a feature CSV against the manifest scores.
    Train {
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Output model JSON.
        #[arg(long)]
        model: PathBuf,
        /// Training summary JSON (defaults to `<model>.report.json`).
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Score a feature CSV with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        /// Scores CSV; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Repeated random train/test splits.
    Evaluate {
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        sims: Option<u64>,
        /// Training fraction of every split.
        #[arg(long)]
        split: Option<f64>,
        /// Report JSON; a text table is written next to it with a `.txt` extension.
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Rank features by correlation with the scores.
    RankFeatures {
        #[arg(long)]
        features: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Ranking CSV.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Keep the N strongest features.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        top: Option<u64>,
        /// Filtered feature CSV for `--top` (defaults to `<features>.top<N>.csv`).
        #[arg(long)]
        top_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Configuration helpers.
    Config {
        #[command(subcommand)]
        action: ConfigAction,
    },
    /// Write a seeded synthetic corpus (clips, distortion ladder, manifest).
    Synth {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long, default_value_t = 4)]
        clips: usize,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long, default_value_t = 8)]
        frames: usize,
        #[arg(long, default_value_t = 64)]
        width: usize,
        #[arg(long, default_value_t = 64)]
        height: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConfigAction {
    /// Write every setting with its default value.
    Init {
        #[arg(long)]
        mode: Option<Mode>,
        /// Destination; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print the configuration after defaults and flags are applied.
    Show {
        #[command(flatten)]
        common: Common,
    },
}

/// Loads the config file (if any) and applies command-line overrides.
pub fn resolve_config(common: &Common) -> anyhow::Result<RunConfig> {
    let mut config = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::for_mode(common.mode.unwrap_or(Mode::Fr)),
    };
    if let Some(m) = common.mode {
        config.mode = m;
    }
    if let Some(s) = common.seed {
        config.seed = s;
    }
    Ok(config)
}

fn required(
    flag: Option<PathBuf>,
    fallback: &Option<PathBuf>,
    name: &str,
) -> anyhow::Result<PathBuf> {
    match flag.or_else(|| fallback.clone()) {
        Some(p) => Ok(p),
        None => bail!("--{name} is required (or set `{name}` in the config)"),
    }
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Extract {
            manifest,
            out,
            common,
        } => {
            let config = resolve_config(&common)?;
            let manifest = required(manifest, &config.manifest, "manifest")?;
            let table = commands::extract(&manifest, &config)?;
            commands::write_feature_csv(&out, &table)?;
            eprintln!(
                "wrote {} rows x {} features to {}",
                table.rows.len(),
                table.names.len(),
                out.display()
            );
        }
        Command::Train {
            features,
            manifest,
            model,
            report,
            common,
        } => {
            let config = resolve_config(&common)?;
            let features = required(features, &config.features, "features")?;
            let manifest = required(manifest, &config.manifest, "manifest")?;
            let (trained, summary) = commands::train(&features, &manifest, &config)?;
            commands::save_model(&trained, &model)?;
            let report = report.unwrap_or_else(|| with_extension(&model, "report.json"));
            files::write_text(&report, &(serde_json::to_string_pretty(&summary)? + "\n"))?;
            eprintln!(
                "trained {} on {} rows: in-sample PCC {:.4} SRCC {:.4}",
                summary.regressor, summary.rows, summary.in_sample_pcc, summary.in_sample_srcc
            );
        }
        Command::Predict {
            model,
            features,
            out,
        } => {
            let model = commands::load_model(&model)?;
            let n = match out {
                Some(p) => commands::predict(&model, &features, files::create(&p)?)?,
                None => commands::predict(&model, &features, std::io::stdout().lock())?,
            };
            eprintln!("scored {n} rows");
        }
        Command::Evaluate {
            features,
            manifest,
            sims,
            split,
            out,
            common,
        } => {
            let mut config = resolve_config(&common)?;
            if let Some(s) = sims {
                config.sims = s as usize;
            }
            if let Some(s) = split {
                config.split_ratio = s;
            }
            let features = required(features, &config.features, "features")?;
            let manifest = required(manifest, &config.manifest, "manifest")?;
            let report = commands::evaluate(&features, &manifest, &config)?;
            files::write_text(&out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            files::write_text(&with_extension(&out, "txt"), &report.to_table())?;
            println!(
                "median PCC {:.4}  median SRCC {:.4}  ({} sims, split {})",
                report.median_pcc, report.median_srcc, report.sim_count, report.split_ratio
            );
        }
        Command::RankFeatures {
            features,
            manifest,
            out,
            top,
            top_out,
            common,
        } => {
            let config = resolve_config(&common)?;
            let features = required(features, &config.features, "features")?;
            let manifest = required(manifest, &config.manifest, "manifest")?;
            let (table, ranking) = commands::rank_features(&features, &manifest, config.mode)?;
            print!("{}", ranking_table(&ranking));
            if let Some(p) = out {
                commands::ranking_csv(&ranking, &p)?;
            }
            if let Some(n) = top {
                let n = n as usize;
                let filtered = commands::select_top(&table, &ranking, n)?;
                let dest =
                    top_out.unwrap_or_else(|| with_extension(&features, &format!("top{n}.csv")));
                commands::write_feature_csv(&dest, &filtered)?;
                eprintln!("wrote top {n} features to {}", dest.display());
            }
        }
        Command::Config { action } => match action {
            ConfigAction::Init { mode, out } => {
                let text = RunConfig::for_mode(mode.unwrap_or(Mode::Fr)).to_toml();
                match out {
                    Some(p) => files::write_text(&p, &text)?,
                    None => print!("{text}"),
                }
            }
            ConfigAction::Show { common } => print!("{}", resolve_config(&common)?.to_toml()),
        },
        Command::Synth {
            dir,
            clips,
            levels,
            frames,
            width,
            height,
            common,
        } => {
            let config = resolve_config(&common)?;
            let opts = SynthOptions {
                clips,
                levels,
                frames,
                width,
                height,
                seed: config.seed,
            };
            let manifest = commands::synth_corpus(&dir, config.mode, &opts)
                .with_context(|| format!("writing synthetic corpus to {}", dir.display()))?;
            eprintln!("wrote {}", manifest.display());
        }
    }
    std::io::stdout().flush().ok();
    Ok(())
}
