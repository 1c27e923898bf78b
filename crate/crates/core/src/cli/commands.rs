use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{
    feature_correlation_report, pcc, run_splits, srcc, DatasetManifest, EvaluationReport,
    FeatureCorrelation, Mode,
};
use crate::fr_features::extract_fr;
use crate::nr_features::extract_nr;
use crate::par;
use crate::regression::{
    fit, model_load, model_save, GridSearchResult, ModelPayload, TrainedModel,
};
use crate::synth;
use crate::video_io::{write_y4m, Chroma};

use super::config::RunConfig;
use super::files::{self, load_video, read_features, write_features, FeatureReader, FeatureTable};

fn at_entry(path: &Path, line: usize, e: Error) -> Error {
    Error::at(format!("{}: manifest line {line}", path.display()), e)
}

/// One feature row per manifest entry, in manifest order.
pub fn extract(manifest_path: &Path, config: &RunConfig) -> Result<FeatureTable> {
    config.validate()?;
    let manifest = DatasetManifest::load(manifest_path, config.mode)?;
    let rows = par::map_indexed(manifest.len(), |i| {
        let entry = &manifest.entries[i];
        let decode = |p: &Path| load_video(p, config).map_err(|e| Error::at(p.display(), e));
        let features = || -> Result<Vec<f64>> {
            let processed = decode(&entry.processed)?;
            match (&entry.reference, config.mode) {
                (Some(r), Mode::Fr) => {
                    Ok(extract_fr(&decode(r)?, &processed, &config.fr_config())?.to_vec())
                }
                _ => Ok(extract_nr(&processed, &config.nr_config())?.to_vec()),
            }
        };
        features().map_err(|e| at_entry(manifest_path, entry.line, e))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(FeatureTable {
        names: config.feature_names(),
        rows,
    })
}

fn aligned(
    features: &FeatureTable,
    manifest: &DatasetManifest,
    features_path: &Path,
) -> Result<()> {
    if features.rows.len() != manifest.len() {
        return Err(Error::Config(format!(
            "{}: {} feature rows but the manifest lists {} entries",
            features_path.display(),
            features.rows.len(),
            manifest.len()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub regressor: String,
    pub rows: usize,
    pub feature_names: Vec<String>,
    pub seed: u64,
    pub search: Option<GridSearchResult>,
    pub model_params: serde_json::Value,
    pub in_sample_pcc: f64,
    pub in_sample_srcc: f64,
    pub in_sample_predictions: Vec<f64>,
}

fn model_params(model: &TrainedModel) -> serde_json::Value {
    match &model.payload {
        ModelPayload::Svr(m) => serde_json::json!({
            "c": m.c,
            "gamma": m.gamma,
            "epsilon": m.epsilon,
            "support_vectors": m.support_vectors.len(),
        }),
        ModelPayload::Nn(m) => serde_json::json!({ "layer_sizes": m.layer_sizes }),
    }
}

fn correlation_or_zero(r: Result<f64>) -> Result<f64> {
    match r {
        Err(Error::ZeroVariance) => Ok(0.0),
        other => other,
    }
}

/// Fits the configured regressor on every row.
pub fn train(
    features_path: &Path,
    manifest_path: &Path,
    config: &RunConfig,
) -> Result<(TrainedModel, TrainReport)> {
    config.validate()?;
    let table = read_features(features_path)?;
    let manifest = DatasetManifest::load(manifest_path, config.mode)?;
    aligned(&table, &manifest, features_path)?;
    let mos = manifest.mos();
    let regressor = config.train_regressor();
    let outcome = fit(&table.rows, &mos, &table.names, &regressor, config.seed)?;
    let preds = table
        .rows
        .iter()
        .map(|r| outcome.model.predict(r))
        .collect::<Result<Vec<_>>>()?;
    let report = TrainReport {
        regressor: regressor.kind().into(),
        rows: table.rows.len(),
        feature_names: table.names.clone(),
        seed: config.seed,
        search: outcome.search,
        model_params: model_params(&outcome.model),
        in_sample_pcc: correlation_or_zero(pcc(&preds, &mos))?,
        in_sample_srcc: correlation_or_zero(srcc(&preds, &mos))?,
        in_sample_predictions: preds,
    };
    Ok((outcome.model, report))
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    model_load(std::io::BufReader::new(files::open(path)?))
        .map_err(|e| Error::at(path.display(), e))
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    let mut w = files::create(path)?;
    model_save(model, &mut w)?;
    w.flush().map_err(|cause| Error::Io {
        path: path.display().to_string(),
        cause,
    })
}

/// Scores a feature CSV row by row; returns the number of rows scored.
pub fn predict(model: &TrainedModel, features_path: &Path, out: impl Write) -> Result<usize> {
    let reader = FeatureReader::open(features_path)?;
    if reader.names() != model.feature_names.as_slice() {
        return Err(Error::at(
            format!("{}:1", features_path.display()),
            Error::FeatureNameMismatch {
                expected: model.feature_names.join(","),
                found: reader.names().join(","),
            },
        ));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["score"])?;
    let mut n = 0;
    for row in reader {
        w.write_record([model.predict(&row?)?.to_string()])?;
        n += 1;
    }
    w.flush().map_err(|cause| Error::Io {
        path: "<scores>".into(),
        cause,
    })?;
    Ok(n)
}

pub fn evaluate(
    features_path: &Path,
    manifest_path: &Path,
    config: &RunConfig,
) -> Result<EvaluationReport> {
    config.validate()?;
    let table = read_features(features_path)?;
    let manifest = DatasetManifest::load(manifest_path, config.mode)?;
    aligned(&table, &manifest, features_path)?;
    run_splits(
        &manifest,
        &table.rows,
        &config.evaluate_regressor(),
        config.split_ratio,
        config.sims,
        config.seed,
    )
}

pub fn rank_features(
    features_path: &Path,
    manifest_path: &Path,
    mode: Mode,
) -> Result<(FeatureTable, Vec<FeatureCorrelation>)> {
    let table = read_features(features_path)?;
    let manifest = DatasetManifest::load(manifest_path, mode)?;
    aligned(&table, &manifest, features_path)?;
    let ranking = feature_correlation_report(&table.rows, &manifest.mos(), &table.names)?;
    Ok((table, ranking))
}

/// The `top` strongest columns, in ranking order.
pub fn select_top(
    table: &FeatureTable,
    ranking: &[FeatureCorrelation],
    top: usize,
) -> Result<FeatureTable> {
    if top == 0 || top > table.names.len() {
        return Err(Error::InvalidParameter(format!(
            "--top must be between 1 and {}, got {top}",
            table.names.len()
        )));
    }
    let keep: Vec<usize> = ranking.iter().take(top).map(|f| f.index).collect();
    Ok(FeatureTable {
        names: keep.iter().map(|&j| table.names[j].clone()).collect(),
        rows: table
            .rows
            .iter()
            .map(|r| keep.iter().map(|&j| r[j]).collect())
            .collect(),
    })
}

pub fn ranking_csv(ranking: &[FeatureCorrelation], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(files::create(path)?);
    w.write_record([
        "rank",
        "feature",
        "pcc",
        "srcc",
        "mean_abs",
        "zero_variance",
    ])?;
    for (i, f) in ranking.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            f.name.clone(),
            f.pcc.to_string(),
            f.srcc.to_string(),
            f.mean_abs.to_string(),
            f.zero_variance.to_string(),
        ])?;
    }
    w.flush().map_err(|cause| Error::Io {
        path: path.display().to_string(),
        cause,
    })
}

/// Options of the synthetic corpus generator.
#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub clips: usize,
    pub levels: usize,
    pub frames: usize,
    pub width: usize,
    pub height: usize,
    pub seed: u64,
}

/// Writes source clips, distorted versions and a manifest with synthetic
/// scores; returns the manifest path.
pub fn synth_corpus(dir: &Path, mode: Mode, opts: &SynthOptions) -> Result<PathBuf> {
    let mut lines = String::from("reference,processed,mos\n");
    for c in 0..opts.clips {
        let clip = synth::source_clip(
            crate::rng::derive_seed(opts.seed, c as u64),
            opts.width,
            opts.height,
            opts.frames,
        )?;
        let src_name = format!("src{c:02}.y4m");
        if mode == Mode::Fr {
            files::write_bytes(&dir.join(&src_name), &write_y4m(&clip, 8, Chroma::Yuv420)?)?;
        }
        for level in 1..=opts.levels {
            let (blur, noise) = synth::ladder_level(level);
            let seed = crate::rng::derive_seed(opts.seed ^ 0x5eed, (c * 100 + level) as u64);
            let d = synth::distort(&clip, blur, noise, seed)?;
            let name = format!("src{c:02}_l{level}.y4m");
            files::write_bytes(&dir.join(&name), &write_y4m(&d, 8, Chroma::Yuv420)?)?;
            let reference = if mode == Mode::Fr {
                src_name.as_str()
            } else {
                ""
            };
            lines.push_str(&format!(
                "{reference},{name},{}\n",
                synth::ladder_mos(level)
            ));
        }
    }
    let manifest = dir.join("manifest.csv");
    files::write_text(&manifest, &lines)?;
    Ok(manifest)
}

pub fn write_feature_csv(path: &Path, table: &FeatureTable) -> Result<()> {
    write_features(path, table)
}
