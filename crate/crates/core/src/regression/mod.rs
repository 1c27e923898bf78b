//! Regressors mapping feature vectors to quality scores.

pub mod grid;
pub mod model;
pub mod nn;
pub mod normalize;
pub mod svr;

pub use grid::{svr_grid_search, GridSearchResult, SvrGrid};
pub use model::{model_load, model_save, ModelPayload, TrainedModel, MODEL_VERSION};
pub use nn::{nn_predict, nn_train, nn_train_with_history, NnHyper, NnModel};
pub use normalize::{normalize_apply, normalize_fit, NormalizationStats};
pub use svr::{solve_svr_dual, svr_predict, svr_train, SvrModel, SvrParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Grid search settings used when an SVR is fitted with search enabled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub grid: SvrGrid,
    pub folds: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid: SvrGrid::default(),
            folds: 5,
        }
    }
}

/// Which regressor to fit, and how.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RegressorConfig {
    Svr {
        params: SvrParams,
        /// When set, `params` is replaced by the cross-validated best grid point.
        search: Option<SearchConfig>,
    },
    Nn {
        arch: Vec<usize>,
        lr: f64,
        batch: usize,
        epochs: usize,
    },
}

impl RegressorConfig {
    pub fn svr_default() -> Self {
        RegressorConfig::Svr {
            params: SvrParams::default(),
            search: None,
        }
    }

    pub fn nn_default() -> Self {
        RegressorConfig::Nn {
            arch: vec![13, 120, 64, 16, 1],
            lr: 1e-3,
            batch: 16,
            epochs: 2000,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RegressorConfig::Svr { .. } => "svr",
            RegressorConfig::Nn { .. } => "nn",
        }
    }

    /// Rejects configurations that cannot work with `dim` input features.
    pub fn check_input_dim(&self, dim: usize) -> Result<()> {
        if let RegressorConfig::Nn { arch, .. } = self {
            if arch.first() != Some(&dim) {
                return Err(Error::DimensionMismatch(format!(
                    "network input layer {:?} does not match {dim} features",
                    arch.first()
                )));
            }
        }
        Ok(())
    }
}

/// A fitted model and, for searched SVRs, the search outcome.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub model: TrainedModel,
    pub search: Option<GridSearchResult>,
}

/// Fits normalization and the configured regressor on raw feature rows.
///
/// `seed` drives fold assignment and network initialization.
pub fn fit(
    raw_rows: &[Vec<f64>],
    targets: &[f64],
    feature_names: &[String],
    config: &RegressorConfig,
    seed: u64,
) -> Result<FitOutcome> {
    let dim = feature_names.len();
    if let Some(r) = raw_rows.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "row has {} features, {dim} names given",
            r.len()
        )));
    }
    config.check_input_dim(dim)?;
    let normalization = normalize_fit(raw_rows)?;
    let rows = normalization.apply_all(raw_rows)?;
    let (payload, search) = match config {
        RegressorConfig::Svr { params, search } => {
            let (params, result) = match search {
                Some(s) => {
                    let r = svr_grid_search(
                        &rows,
                        targets,
                        &s.grid,
                        s.folds,
                        rng::derive_seed(seed, 0),
                    )?;
                    (r.params, Some(r))
                }
                None => (*params, None),
            };
            (
                ModelPayload::Svr(svr_train(&rows, targets, &params)?),
                result,
            )
        }
        RegressorConfig::Nn {
            arch,
            lr,
            batch,
            epochs,
        } => {
            let hyper = NnHyper {
                lr: *lr,
                batch: *batch,
                epochs: *epochs,
                seed: rng::derive_seed(seed, 1),
            };
            (
                ModelPayload::Nn(nn_train(&rows, targets, arch, &hyper)?),
                None,
            )
        }
    };
    Ok(FitOutcome {
        model: TrainedModel::new(feature_names.to_vec(), normalization, payload)?,
        search,
    })
}
