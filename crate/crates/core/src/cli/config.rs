use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::Mode;
use crate::fr_features::{self, FrConfig};
use crate::nr_features::{self, NrConfig};
use crate::regression::{RegressorConfig, SearchConfig, SvrGrid, SvrParams};
use crate::video_io::Chroma;

/// Everything a run depends on, as one flat TOML document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,

    pub dm_l1: bool,
    pub dm_l2: bool,
    pub nr_sigma: f64,
    pub mscn_sigma: f64,

    /// Geometry of `.yuv` inputs; Y4M files carry their own.
    pub raw_width: usize,
    pub raw_height: usize,
    /// 8, or 10 for 16-bit little-endian words holding 10-bit values.
    pub raw_bit_depth: u8,
    pub raw_chroma: String,
    pub raw_fps: f64,

    /// `svr` or `nn`.
    pub regressor: String,
    pub svr_c: f64,
    pub svr_gamma: f64,
    pub svr_epsilon: f64,
    /// Cross-validated grid search when training a final model.
    pub svr_grid_search: bool,
    /// Grid search inside every evaluation split (slow).
    pub evaluate_grid_search: bool,
    pub svr_grid_c: Vec<f64>,
    pub svr_grid_gamma: Vec<f64>,
    pub svr_grid_epsilon: Vec<f64>,
    pub cv_folds: usize,

    /// Layer widths including input and the single output.
    pub nn_arch: Vec<usize>,
    pub nn_lr: f64,
    pub nn_batch: usize,
    pub nn_epochs: usize,

    pub split_ratio: f64,
    pub sims: usize,
    pub seed: u64,

    pub manifest: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub model: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let grid = SvrGrid::default();
        let svr = SvrParams::default();
        RunConfig {
            mode: Mode::Fr,
            dm_l1: true,
            dm_l2: true,
            nr_sigma: NrConfig::default().sigma,
            mscn_sigma: NrConfig::default().mscn_sigma,
            raw_width: 0,
            raw_height: 0,
            raw_bit_depth: 8,
            raw_chroma: "420".into(),
            raw_fps: 25.0,
            regressor: "svr".into(),
            svr_c: svr.c,
            svr_gamma: svr.gamma,
            svr_epsilon: svr.epsilon,
            svr_grid_search: true,
            evaluate_grid_search: false,
            svr_grid_c: grid.c,
            svr_grid_gamma: grid.gamma,
            svr_grid_epsilon: grid.epsilon,
            cv_folds: 5,
            nn_arch: vec![13, 120, 64, 16, 1],
            nn_lr: 1e-3,
            nn_batch: 16,
            nn_epochs: 2000,
            split_ratio: 0.8,
            sims: 1000,
            seed: 0,
            manifest: None,
            features: None,
            model: None,
        }
    }
}

fn bad(msg: String) -> Error {
    Error::Config(msg)
}

impl RunConfig {
    /// Defaults with the network input width matching `mode`.
    pub fn for_mode(mode: Mode) -> Self {
        let mut c = RunConfig {
            mode,
            ..RunConfig::default()
        };
        c.nn_arch[0] = c.feature_count();
        c
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|cause| Error::Io {
            path: path.display().to_string(),
            cause,
        })?;
        let config: RunConfig =
            toml::from_str(&text).map_err(|e| Error::at(path.display(), bad(e.to_string())))?;
        config
            .validate()
            .map_err(|e| Error::at(path.display(), e))?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nr_sigma > 0.0 && self.nr_sigma.is_finite()) {
            return Err(bad(format!("nr_sigma must be > 0, got {}", self.nr_sigma)));
        }
        if !(self.mscn_sigma > 0.0 && self.mscn_sigma.is_finite()) {
            return Err(bad(format!(
                "mscn_sigma must be > 0, got {}",
                self.mscn_sigma
            )));
        }
        if !matches!(self.raw_bit_depth, 8 | 10) {
            return Err(bad(format!(
                "raw_bit_depth must be 8 or 10, got {}",
                self.raw_bit_depth
            )));
        }
        self.raw_chroma.parse::<Chroma>()?;
        if !(self.raw_fps > 0.0) {
            return Err(bad(format!("raw_fps must be > 0, got {}", self.raw_fps)));
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            return Err(bad(format!(
                "split_ratio must lie in (0, 1), got {}",
                self.split_ratio
            )));
        }
        if self.sims == 0 {
            return Err(bad("sims must be at least 1".into()));
        }
        if self.cv_folds < 2 {
            return Err(bad(format!(
                "cv_folds must be at least 2, got {}",
                self.cv_folds
            )));
        }
        if self.svr_grid_c.is_empty()
            || self.svr_grid_gamma.is_empty()
            || self.svr_grid_epsilon.is_empty()
        {
            return Err(bad("svr grid axes must be non-empty".into()));
        }
        if !(self.nn_lr > 0.0) || self.nn_batch == 0 || self.nn_epochs == 0 {
            return Err(bad("nn_lr, nn_batch and nn_epochs must be positive".into()));
        }
        match self.regressor.as_str() {
            "svr" | "nn" => Ok(()),
            other => Err(bad(format!(
                "regressor must be 'svr' or 'nn', got '{other}'"
            ))),
        }
    }

    pub fn fr_config(&self) -> FrConfig {
        FrConfig {
            dm_l1: self.dm_l1,
            dm_l2: self.dm_l2,
        }
    }

    pub fn nr_config(&self) -> NrConfig {
        NrConfig {
            sigma: self.nr_sigma,
            mscn_sigma: self.mscn_sigma,
        }
    }

    /// Column names an extraction under this config produces.
    pub fn feature_names(&self) -> Vec<String> {
        match self.mode {
            Mode::Fr => fr_features::feature_names(&self.fr_config()),
            Mode::Nr => nr_features::FEATURE_NAMES
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }

    pub fn feature_count(&self) -> usize {
        self.feature_names().len()
    }

    pub fn chroma(&self) -> Result<Chroma> {
        self.raw_chroma.parse()
    }

    fn svr_params(&self) -> SvrParams {
        SvrParams {
            c: self.svr_c,
            gamma: self.svr_gamma,
            epsilon: self.svr_epsilon,
        }
    }

    fn search(&self) -> SearchConfig {
        SearchConfig {
            grid: SvrGrid {
                c: self.svr_grid_c.clone(),
                gamma: self.svr_grid_gamma.clone(),
                epsilon: self.svr_grid_epsilon.clone(),
            },
            folds: self.cv_folds,
        }
    }

    fn regressor_with(&self, search: bool) -> RegressorConfig {
        match self.regressor.as_str() {
            "nn" => RegressorConfig::Nn {
                arch: self.nn_arch.clone(),
                lr: self.nn_lr,
                batch: self.nn_batch,
                epochs: self.nn_epochs,
            },
            _ => RegressorConfig::Svr {
                params: self.svr_params(),
                search: search.then(|| self.search()),
            },
        }
    }

    /// Regressor for `train`.
    pub fn train_regressor(&self) -> RegressorConfig {
        self.regressor_with(self.svr_grid_search)
    }

    /// Regressor fitted inside every evaluation split.
    pub fn evaluate_regressor(&self) -> RegressorConfig {
        self.regressor_with(self.evaluate_grid_search)
    }
}
