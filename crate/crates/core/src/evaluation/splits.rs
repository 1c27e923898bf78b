//! Repeated random train/test split simulations.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::correlation::{pcc, srcc};
use crate::evaluation::manifest::DatasetManifest;
use crate::par;
use crate::regression::{fit, RegressorConfig};
use crate::rng;

/// Test-set correlations of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    pub sim: usize,
    pub seed: u64,
    pub n_train: usize,
    pub n_test: usize,
    pub pcc: f64,
    pub srcc: f64,
    /// True when predictions were constant and the correlations were set to 0.
    pub degenerate: bool,
    pub prediction_min: f64,
    pub prediction_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub regressor: String,
    pub sim_count: usize,
    pub split_ratio: f64,
    pub seed: u64,
    pub median_pcc: f64,
    pub median_srcc: f64,
    pub mean_pcc: f64,
    pub mean_srcc: f64,
    /// Observed range of test predictions over all simulations (scores are not clipped).
    pub prediction_min: f64,
    pub prediction_max: f64,
    pub splits: Vec<SplitResult>,
}

/// Training rows for a data set of `n` entries.
pub fn train_size(n: usize, split_ratio: f64) -> usize {
    (n as f64 * split_ratio).round() as usize
}

fn check_split(n: usize, split_ratio: f64) -> Result<usize> {
    if !(split_ratio > 0.0 && split_ratio < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "split ratio {split_ratio} outside (0, 1)"
        )));
    }
    let n_train = train_size(n, split_ratio);
    if n - n_train.min(n) < 3 {
        return Err(Error::TooFewEntries(format!(
            "{n} entries at split {split_ratio} leave fewer than 3 test rows"
        )));
    }
    if n_train < 4 {
        return Err(Error::TooFewEntries(format!(
            "{n} entries at split {split_ratio} leave fewer than 4 training rows"
        )));
    }
    Ok(n_train)
}

fn correlation_or_zero(v: Result<f64>) -> Result<(f64, bool)> {
    match v {
        Ok(c) => Ok((c, false)),
        Err(Error::ZeroVariance) => Ok((0.0, true)),
        Err(e) => Err(e),
    }
}

fn feature_names(dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("f{i}")).collect()
}

/// One simulation driven entirely by `sim_seed`.
pub fn run_single_split(
    features: &[Vec<f64>],
    mos: &[f64],
    regressor: &RegressorConfig,
    split_ratio: f64,
    sim_seed: u64,
) -> Result<SplitResult> {
    if features.len() != mos.len() {
        return Err(Error::LengthMismatch(features.len(), mos.len()));
    }
    let n = features.len();
    let n_train = check_split(n, split_ratio)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(sim_seed));
    let (train, test) = order.split_at(n_train);

    let xs: Vec<Vec<f64>> = train.iter().map(|&i| features[i].clone()).collect();
    let ys: Vec<f64> = train.iter().map(|&i| mos[i]).collect();
    let names = feature_names(features.first().map_or(0, Vec::len));
    let fitted = fit(&xs, &ys, &names, regressor, rng::derive_seed(sim_seed, 1))?;

    let preds = test
        .iter()
        .map(|&i| fitted.model.predict(&features[i]))
        .collect::<Result<Vec<_>>>()?;
    let truth: Vec<f64> = test.iter().map(|&i| mos[i]).collect();
    let (p, dp) = correlation_or_zero(pcc(&preds, &truth))?;
    let (s, ds) = correlation_or_zero(srcc(&preds, &truth))?;
    Ok(SplitResult {
        sim: 0,
        seed: sim_seed,
        n_train,
        n_test: test.len(),
        pcc: p,
        srcc: s,
        degenerate: dp || ds,
        prediction_min: preds.iter().cloned().fold(f64::INFINITY, f64::min),
        prediction_max: preds.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// `sims` independent split simulations; simulation `i` uses the stream
/// `derive_seed(seed, i)`, so results do not depend on scheduling.
pub fn run_splits_on(
    features: &[Vec<f64>],
    mos: &[f64],
    regressor: &RegressorConfig,
    split_ratio: f64,
    sims: usize,
    seed: u64,
) -> Result<EvaluationReport> {
    if sims == 0 {
        return Err(Error::InvalidParameter("sims must be at least 1".into()));
    }
    if features.len() != mos.len() {
        return Err(Error::LengthMismatch(features.len(), mos.len()));
    }
    check_split(features.len(), split_ratio)?;
    regressor.check_input_dim(features.first().map_or(0, Vec::len))?;

    let splits = par::map_indexed(sims, |i| {
        run_single_split(
            features,
            mos,
            regressor,
            split_ratio,
            rng::derive_seed(seed, i as u64),
        )
        .map(|mut r| {
            r.sim = i;
            r
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let pccs: Vec<f64> = splits.iter().map(|s| s.pcc).collect();
    let srccs: Vec<f64> = splits.iter().map(|s| s.srcc).collect();
    Ok(EvaluationReport {
        regressor: regressor.kind().into(),
        sim_count: sims,
        split_ratio,
        seed,
        median_pcc: median(&pccs),
        median_srcc: median(&srccs),
        mean_pcc: mean(&pccs),
        mean_srcc: mean(&srccs),
        prediction_min: splits
            .iter()
            .map(|s| s.prediction_min)
            .fold(f64::INFINITY, f64::min),
        prediction_max: splits
            .iter()
            .map(|s| s.prediction_max)
            .fold(f64::NEG_INFINITY, f64::max),
        splits,
    })
}

/// [`run_splits_on`] with scores taken from a manifest.
pub fn run_splits(
    manifest: &DatasetManifest,
    features: &[Vec<f64>],
    regressor: &RegressorConfig,
    split_ratio: f64,
    sims: usize,
    seed: u64,
) -> Result<EvaluationReport> {
    if features.len() != manifest.len() {
        return Err(Error::LengthMismatch(features.len(), manifest.len()));
    }
    if manifest.len() < 10 {
        return Err(Error::TooFewEntries(format!(
            "split protocols need at least 10 entries, manifest has {}",
            manifest.len()
        )));
    }
    run_splits_on(
        features,
        &manifest.mos(),
        regressor,
        split_ratio,
        sims,
        seed,
    )
}

impl EvaluationReport {
    /// Plain-text summary with one line per simulation.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "regressor {}  sims {}  split {}  seed {}\n\
             median PCC {:.4}  median SRCC {:.4}  mean PCC {:.4}  mean SRCC {:.4}\n\
             prediction range [{:.4}, {:.4}]\n\n{:>6} {:>8} {:>8} {:>7} {:>6}\n",
            self.regressor,
            self.sim_count,
            self.split_ratio,
            self.seed,
            self.median_pcc,
            self.median_srcc,
            self.mean_pcc,
            self.mean_srcc,
            self.prediction_min,
            self.prediction_max,
            "sim",
            "pcc",
            "srcc",
            "train",
            "test"
        );
        for s in &self.splits {
            out.push_str(&format!(
                "{:>6} {:>8.4} {:>8.4} {:>7} {:>6}{}\n",
                s.sim,
                s.pcc,
                s.srcc,
                s.n_train,
                s.n_test,
                if s.degenerate {
                    "  (constant predictions)"
                } else {
                    ""
                }
            ));
        }
        out
    }
}
