//! Block SAD, reference motion (SAFD) and differential motion (DM).
//!
//! All frame norms are divided by the pixel count before averaging over
//! time so the values do not depend on resolution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::video_io::{Frame, VideoSequence};

/// Sum of absolute differences between two equally sized blocks.
pub fn sad(block_ref: &Frame, block_coded: &Frame) -> Result<f64> {
    if !block_ref.same_dims(block_coded) {
        return Err(Error::DimensionMismatch(format!(
            "blocks {}x{} vs {}x{}",
            block_ref.width(),
            block_ref.height(),
            block_coded.width(),
            block_coded.height()
        )));
    }
    Ok(block_ref
        .samples()
        .iter()
        .zip(block_coded.samples())
        .map(|(a, b)| (a - b).abs())
        .sum())
}

/// Per-pixel mean absolute difference between consecutive frames,
/// one entry per frame pair (`K - 1` entries).
fn frame_motion(seq: &VideoSequence) -> Vec<f64> {
    let frames = seq.frames();
    let pixels = frames[0].len() as f64;
    par::map_indexed(frames.len() - 1, |k| {
        let (prev, cur) = (&frames[k], &frames[k + 1]);
        prev.samples()
            .iter()
            .zip(cur.samples())
            .map(|(a, b)| (b - a).abs())
            .sum::<f64>()
            / pixels
    })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Motion of the original sequence: the plain mean of frame-difference
/// norms and the variant taking the min of each pair of adjacent norms.
///
/// `motion_min` needs `F(k+1)`, so it requires at least three frames.
pub fn motion_features(original: &VideoSequence) -> Result<(f64, f64)> {
    if original.frame_count() < 3 {
        return Err(Error::TooFewFrames {
            needed: 3,
            got: original.frame_count(),
        });
    }
    let d = frame_motion(original);
    let mins: Vec<f64> = d.windows(2).map(|w| w[0].min(w[1])).collect();
    Ok((mean(&d), mean(&mins)))
}

/// Plain motion only; valid for two-frame sequences.
pub fn motion_plain(original: &VideoSequence) -> f64 {
    mean(&frame_motion(original))
}

/// Norm applied to the difference of frame differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DmNorm {
    /// Mean absolute value per pixel.
    L1,
    /// Root mean square per pixel.
    L2,
}

/// Differential motion: how much the processed video's frame-to-frame
/// change departs from the original's.
pub fn dm_feature(
    original: &VideoSequence,
    processed: &VideoSequence,
    norm: DmNorm,
) -> Result<f64> {
    original.check_aligned(processed)?;
    let (f, g) = (original.frames(), processed.frames());
    let pixels = f[0].len() as f64;
    let per_frame = par::map_indexed(f.len() - 1, |k| {
        let terms = f[k + 1]
            .samples()
            .iter()
            .zip(f[k].samples())
            .zip(g[k + 1].samples().iter().zip(g[k].samples()))
            .map(|((f1, f0), (g1, g0))| (f1 - f0) - (g1 - g0));
        match norm {
            DmNorm::L1 => terms.map(f64::abs).sum::<f64>() / pixels,
            DmNorm::L2 => (terms.map(|t| t * t).sum::<f64>() / pixels).sqrt(),
        }
    });
    Ok(mean(&per_frame))
}
