//! Correlation metrics, split simulations and feature ranking.

pub mod correlation;
pub mod manifest;
pub mod ranking;
pub mod splits;

pub use correlation::{pcc, rank, srcc};
pub use manifest::{DatasetManifest, ManifestEntry, Mode};
pub use ranking::{feature_correlation_report, ranking_table, FeatureCorrelation};
pub use splits::{
    run_single_split, run_splits, run_splits_on, train_size, EvaluationReport, SplitResult,
};
