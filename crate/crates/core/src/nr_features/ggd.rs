//! Generalized Gaussian fits by moment matching.
//!
//! For a zero-mean GGD with shape `b` the ratio `E[x^2] / E[|x|]^2` equals
//! `G(1/b) G(3/b) / G(2/b)^2` (`G` = gamma function), which decreases
//! monotonically in `b`. The shape is read off a precomputed table by
//! binary search; the scale then follows from the second moment.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

pub const MIN_SHAPE: f64 = 0.05;
pub const MAX_SHAPE: f64 = 10.0;
pub const MIN_SAMPLES: usize = 64;
const STEP: f64 = 0.001;

/// Fitted GGD parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GgdFit {
    /// Exponent; 2 is Gaussian, 1 is Laplacian.
    pub shape: f64,
    /// Spread.
    pub scale: f64,
}

impl GgdFit {
    /// Probability density at `x`; zero scale has no density.
    pub fn density(&self, x: f64) -> f64 {
        if !(self.scale > 0.0) {
            return 0.0;
        }
        let b = self.shape;
        let a = self.scale;
        (b.ln() - (2.0 * a).ln() - ln_gamma(1.0 / b) - (x.abs() / a).powf(b)).exp()
    }
}

/// Moment ratio of a GGD with the given shape.
pub fn moment_ratio(shape: f64) -> f64 {
    (ln_gamma(1.0 / shape) + ln_gamma(3.0 / shape) - 2.0 * ln_gamma(2.0 / shape)).exp()
}

fn table() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = ((MAX_SHAPE - MIN_SHAPE) / STEP).round() as usize;
        (0..=n)
            .map(|i| {
                let shape = MIN_SHAPE + i as f64 * STEP;
                (shape, moment_ratio(shape))
            })
            .collect()
    })
}

/// Shape whose moment ratio equals `rho`, linearly interpolated between
/// table entries and clamped to `[MIN_SHAPE, MAX_SHAPE]`.
fn shape_for_ratio(rho: f64) -> f64 {
    let t = table();
    // ratios decrease with shape
    if rho >= t[0].1 {
        return MIN_SHAPE;
    }
    if rho <= t[t.len() - 1].1 {
        return MAX_SHAPE;
    }
    // first index with ratio <= rho
    let hi = t.partition_point(|&(_, r)| r > rho);
    let (s0, r0) = t[hi - 1];
    let (s1, r1) = t[hi];
    s0 + (s1 - s0) * (r0 - rho) / (r0 - r1)
}

/// Fits a zero-mean GGD to `samples`.
pub fn fit_ggd(samples: &[f64]) -> Result<GgdFit> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::DegenerateSamples(format!(
            "{} samples, need at least {MIN_SAMPLES}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    if !(var > 0.0) {
        return Err(Error::DegenerateSamples("zero variance".into()));
    }
    let second = samples.iter().map(|x| x * x).sum::<f64>() / n;
    let abs_mean = samples.iter().map(|x| x.abs()).sum::<f64>() / n;
    let shape = shape_for_ratio(second / (abs_mean * abs_mean));
    let scale = (second * (ln_gamma(1.0 / shape) - ln_gamma(3.0 / shape)).exp()).sqrt();
    Ok(GgdFit { shape, scale })
}
