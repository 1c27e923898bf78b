//! Full-reference feature vector: VIF at 4 scales, DLM at 4 scales plus the
//! level-pooled DLM, two reference-motion variants, and differential motion.

pub mod dlm;
pub mod motion;
pub mod vif;

use serde::{Deserialize, Serialize};

pub use dlm::{dlm_frame, DlmScores};
pub use motion::{dm_feature, motion_features, sad, DmNorm};
pub use vif::vif_frame;

use crate::error::Result;
use crate::par;
use crate::video_io::VideoSequence;

/// Which differential-motion norms to append after the 11 base features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrConfig {
    pub dm_l1: bool,
    pub dm_l2: bool,
}

impl Default for FrConfig {
    fn default() -> Self {
        FrConfig {
            dm_l1: true,
            dm_l2: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrFeatureVector {
    pub vif: [f64; 4],
    pub dlm: [f64; 4],
    /// DLM pooled over all four levels.
    pub dlm_combined: f64,
    pub motion_plain: f64,
    pub motion_min: f64,
    pub dm_l1: Option<f64>,
    pub dm_l2: Option<f64>,
}

pub const BASE_NAMES: [&str; 11] = [
    "vif0",
    "vif1",
    "vif2",
    "vif3",
    "dlm0",
    "dlm1",
    "dlm2",
    "dlm3",
    "dlm",
    "motion",
    "motion_min",
];

/// Column names for the given configuration, in emission order.
pub fn feature_names(config: &FrConfig) -> Vec<String> {
    let mut names: Vec<String> = BASE_NAMES.iter().map(|s| s.to_string()).collect();
    if config.dm_l1 {
        names.push("dm_l1".into());
    }
    if config.dm_l2 {
        names.push("dm_l2".into());
    }
    names
}

impl FrFeatureVector {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(13);
        v.extend_from_slice(&self.vif);
        v.extend_from_slice(&self.dlm);
        v.push(self.dlm_combined);
        v.push(self.motion_plain);
        v.push(self.motion_min);
        v.extend(self.dm_l1);
        v.extend(self.dm_l2);
        v
    }

    pub fn len(&self) -> usize {
        11 + usize::from(self.dm_l1.is_some()) + usize::from(self.dm_l2.is_some())
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Averages per-frame vectors in frame order.
pub(crate) fn mean_columns(per_frame: &[Vec<f64>], width: usize) -> Vec<f64> {
    let mut acc = vec![0.0; width];
    for row in per_frame {
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
    }
    acc.iter().map(|a| a / per_frame.len() as f64).collect()
}

/// Per-scale VIF averaged over frames.
pub fn vif_scales(original: &VideoSequence, processed: &VideoSequence) -> Result<[f64; 4]> {
    original.check_aligned(processed)?;
    let (f, g) = (original.frames(), processed.frames());
    let per_frame = par::map_indexed(f.len(), |k| vif_frame(&f[k], &g[k], vif::SCALES))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let m = mean_columns(&per_frame, vif::SCALES);
    Ok([m[0], m[1], m[2], m[3]])
}

/// Per-level DLM averaged over frames.
pub fn dlm_scales(original: &VideoSequence, processed: &VideoSequence) -> Result<[f64; 4]> {
    let (levels, _) = dlm_with_combined(original, processed)?;
    Ok(levels)
}

/// Per-level DLM and the level-pooled DLM, each averaged over frames.
pub fn dlm_with_combined(
    original: &VideoSequence,
    processed: &VideoSequence,
) -> Result<([f64; 4], f64)> {
    original.check_aligned(processed)?;
    let (f, g) = (original.frames(), processed.frames());
    let per_frame = par::map_indexed(f.len(), |k| {
        dlm_frame(&f[k], &g[k], dlm::LEVELS).map(|s| {
            let mut row = s.levels;
            row.push(s.combined);
            row
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let m = mean_columns(&per_frame, dlm::LEVELS + 1);
    Ok(([m[0], m[1], m[2], m[3]], m[4]))
}

/// Assembles the full-reference feature vector for one aligned pair.
pub fn extract_fr(
    original: &VideoSequence,
    processed: &VideoSequence,
    config: &FrConfig,
) -> Result<FrFeatureVector> {
    original.check_aligned(processed)?;
    let vif = vif_scales(original, processed)?;
    let (dlm, dlm_combined) = dlm_with_combined(original, processed)?;
    let (motion_plain, motion_min) = motion_features(original)?;
    let dm_l1 = if config.dm_l1 {
        Some(dm_feature(original, processed, DmNorm::L1)?)
    } else {
        None
    };
    let dm_l2 = if config.dm_l2 {
        Some(dm_feature(original, processed, DmNorm::L2)?)
    } else {
        None
    };
    Ok(FrFeatureVector {
        vif,
        dlm,
        dlm_combined,
        motion_plain,
        motion_min,
        dm_l1,
        dm_l2,
    })
}
