//! No-reference features.
//!
//! The processed video is compared against a Gaussian-blurred copy of
//! itself and described by natural scene statistics of its MSCN
//! coefficients, both spatially (per frame) and temporally (on frame
//! differences). The ten outputs, in order:
//!
//! | column        | meaning                                           |
//! |---------------|---------------------------------------------------|
//! | `ggd_s_shape` | mean GGD shape of per-frame MSCN coefficients     |
//! | `ggd_s_scale` | mean GGD scale of per-frame MSCN coefficients     |
//! | `ggd_t_shape` | mean GGD shape of MSCN of frame differences       |
//! | `ggd_t_scale` | mean GGD scale of MSCN of frame differences       |
//! | `selfsim_vif` | scale-0 VIF, blurred copy as reference            |
//! | `selfsim_dlm` | level-0 DLM, blurred copy as reference            |
//! | `mscn_var`    | mean variance of per-frame MSCN coefficients      |
//! | `fdiff_energy`| mean squared frame difference per pixel           |
//! | `blur_dvif`   | `1 - selfsim_vif`                                 |
//! | `blur_ddlm`   | `1 - selfsim_dlm`                                 |
//!
//! Flat content (zero-variance MSCN maps) does not fail the extraction; the
//! affected fit falls back to shape 2, scale 0.

pub mod ggd;
pub mod mscn;

use serde::{Deserialize, Serialize};

pub use ggd::{fit_ggd, GgdFit};
pub use mscn::mscn_transform;

use crate::error::{Error, Result};
use crate::fr_features::{dlm_frame, mean_columns, vif_frame};
use crate::par;
use crate::video_io::{frame_diff, gaussian_blur, Frame, VideoSequence};

pub const FEATURE_NAMES: [&str; 10] = [
    "ggd_s_shape",
    "ggd_s_scale",
    "ggd_t_shape",
    "ggd_t_scale",
    "selfsim_vif",
    "selfsim_dlm",
    "mscn_var",
    "fdiff_energy",
    "blur_dvif",
    "blur_ddlm",
];

/// Fit reported for flat content.
pub const SENTINEL_FIT: GgdFit = GgdFit {
    shape: 2.0,
    scale: 0.0,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NrConfig {
    /// Blur of the self-reference, in pixels.
    pub sigma: f64,
    /// Gaussian window of the MSCN statistics, in pixels.
    pub mscn_sigma: f64,
}

impl Default for NrConfig {
    fn default() -> Self {
        NrConfig {
            sigma: 1.0,
            mscn_sigma: mscn::DEFAULT_WINDOW_SIGMA,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NrFeatureVector {
    pub spatial_ggd_shape_mean: f64,
    pub spatial_ggd_scale_mean: f64,
    pub temporal_ggd_shape_mean: f64,
    pub temporal_ggd_scale_mean: f64,
    pub self_ref_spatial_sim: f64,
    pub self_ref_temporal_sim: f64,
    pub mscn_var_mean: f64,
    pub frame_diff_energy: f64,
    pub blur_delta_vif: f64,
    pub blur_delta_dlm: f64,
}

impl NrFeatureVector {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.spatial_ggd_shape_mean,
            self.spatial_ggd_scale_mean,
            self.temporal_ggd_shape_mean,
            self.temporal_ggd_scale_mean,
            self.self_ref_spatial_sim,
            self.self_ref_temporal_sim,
            self.mscn_var_mean,
            self.frame_diff_energy,
            self.blur_delta_vif,
            self.blur_delta_dlm,
        ]
    }
}

/// Blurs every frame; the result is the NR comparator.
pub fn self_reference(processed: &VideoSequence, sigma: f64) -> Result<VideoSequence> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::NonPositiveSigma(sigma));
    }
    processed.try_map_frames(|f| gaussian_blur(f, sigma))
}

/// GGD fit of a plane, mapping flat content to [`SENTINEL_FIT`].
fn fit_or_sentinel(coeffs: &Frame) -> Result<GgdFit> {
    match fit_ggd(coeffs.samples()) {
        Ok(fit) => Ok(fit),
        Err(Error::DegenerateSamples(_)) => Ok(SENTINEL_FIT),
        Err(e) => Err(e),
    }
}

fn variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Mean variance of per-frame MSCN coefficients.
pub fn mscn_var_mean(video: &VideoSequence, mscn_sigma: f64) -> Result<f64> {
    let frames = video.frames();
    let per_frame = par::map_indexed(frames.len(), |k| {
        mscn_transform(&frames[k], mscn_sigma).map(|m| vec![variance(m.samples())])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(mean_columns(&per_frame, 1)[0])
}

/// Computes the 10-dimensional no-reference vector of a processed video.
pub fn extract_nr(processed: &VideoSequence, config: &NrConfig) -> Result<NrFeatureVector> {
    let blurred = self_reference(processed, config.sigma)?;
    let frames = processed.frames();
    let refs = blurred.frames();

    // spatial: [shape, scale, mscn variance, selfsim vif, selfsim dlm]
    let spatial = par::map_indexed(frames.len(), |k| -> Result<Vec<f64>> {
        let m = mscn_transform(&frames[k], config.mscn_sigma)?;
        let fit = fit_or_sentinel(&m)?;
        let vif = vif_frame(&refs[k], &frames[k], 1)?[0];
        let dlm = dlm_frame(&refs[k], &frames[k], 1)?.levels[0];
        Ok(vec![fit.shape, fit.scale, variance(m.samples()), vif, dlm])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let s = mean_columns(&spatial, 5);

    // temporal: [shape, scale, energy]
    let temporal = par::map_indexed(frames.len() - 1, |k| -> Result<Vec<f64>> {
        let d = frame_diff(&frames[k + 1], &frames[k])?;
        let m = mscn_transform(&d, config.mscn_sigma)?;
        let fit = fit_or_sentinel(&m)?;
        let energy = d.samples().iter().map(|v| v * v).sum::<f64>() / d.len() as f64;
        Ok(vec![fit.shape, fit.scale, energy])
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let t = mean_columns(&temporal, 3);

    Ok(NrFeatureVector {
        spatial_ggd_shape_mean: s[0],
        spatial_ggd_scale_mean: s[1],
        temporal_ggd_shape_mean: t[0],
        temporal_ggd_scale_mean: t[1],
        self_ref_spatial_sim: s[3],
        self_ref_temporal_sim: s[4],
        mscn_var_mean: s[2],
        frame_diff_energy: t[2],
        blur_delta_vif: 1.0 - s[3],
        blur_delta_dlm: 1.0 - s[4],
    })
}
