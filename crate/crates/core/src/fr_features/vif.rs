//! Pixel-domain Visual Information Fidelity over a 4-level pyramid.
//!
//! Each scale compares local Gaussian-weighted statistics of the reference
//! and distorted planes under a Gaussian scale mixture model. The window at
//! scale `s` has `2^(4-s) + 1` taps with standard deviation `taps / 5`.
//! The pyramid itself is built with [`downsample_2x`].
//!
//! The per-pixel gain is capped at 1, so a distorted frame can never score
//! above the reference. Identical inputs score exactly 1.

use crate::error::{Error, Result};
use crate::video_io::{convolve_separable, downsample_2x, gaussian_kernel, Frame};

pub const SCALES: usize = 4;

/// Minimum frame side at scale 0.
pub const MIN_SIDE: usize = 32;

/// Additive HVS noise variance: 2.0 on the 8-bit scale, rescaled to `[0, 1]`.
pub const SIGMA_NSQ: f64 = 2.0 / (255.0 * 255.0);

const EPS: f64 = 1e-10 / (255.0 * 255.0);
const GAIN_LIMIT: f64 = 1.0;

pub(crate) fn check_size(f: &Frame) -> Result<()> {
    if f.width() < MIN_SIDE || f.height() < MIN_SIDE {
        return Err(Error::FrameTooSmall(format!(
            "{}x{} (need at least {MIN_SIDE}x{MIN_SIDE})",
            f.width(),
            f.height()
        )));
    }
    Ok(())
}

fn window(scale: usize) -> Vec<f64> {
    let taps = (1usize << (4 - scale)) + 1;
    gaussian_kernel(taps as f64 / 5.0, taps / 2)
}

/// Information ratio `num / den` of one scale.
fn scale_ratio(reference: &Frame, distorted: &Frame, scale: usize) -> f64 {
    let w = window(scale);
    let mu1 = convolve_separable(reference, &w);
    let mu2 = convolve_separable(distorted, &w);
    let rr = convolve_separable(&reference.map(|v| v * v), &w);
    let dd = convolve_separable(&distorted.map(|v| v * v), &w);
    let rd = convolve_separable(
        &reference
            .zip_map(distorted, |a, b| a * b)
            .expect("same dims"),
        &w,
    );

    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..reference.len() {
        let (m1, m2) = (mu1.samples()[i], mu2.samples()[i]);
        let mut s1 = (rr.samples()[i] - m1 * m1).max(0.0);
        let s2 = (dd.samples()[i] - m2 * m2).max(0.0);
        let s12 = rd.samples()[i] - m1 * m2;

        let mut g;
        let mut sv;
        if s1 < EPS {
            g = 0.0;
            sv = s2;
            s1 = 0.0;
        } else {
            g = s12 / s1;
            sv = s2 - g * s12;
        }
        if s2 < EPS {
            g = 0.0;
            sv = 0.0;
        }
        if g < 0.0 {
            sv = s2;
            g = 0.0;
        }
        let sv = sv.max(0.0);
        let g = g.min(GAIN_LIMIT);

        num += (1.0 + g * g * s1 / (sv + SIGMA_NSQ)).log2();
        den += (1.0 + s1 / SIGMA_NSQ).log2();
    }
    if den <= 0.0 {
        1.0
    } else {
        (num / den).clamp(0.0, 1.0)
    }
}

/// VIF of one frame pair at scales `0..n_scales`.
pub fn vif_frame(reference: &Frame, distorted: &Frame, n_scales: usize) -> Result<Vec<f64>> {
    if !reference.same_dims(distorted) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            reference.width(),
            reference.height(),
            distorted.width(),
            distorted.height()
        )));
    }
    check_size(reference)?;
    let mut r = reference.clone();
    let mut d = distorted.clone();
    let mut out = Vec::with_capacity(n_scales);
    for scale in 0..n_scales.min(SCALES) {
        if scale > 0 {
            r = downsample_2x(&r)?;
            d = downsample_2x(&d)?;
        }
        out.push(scale_ratio(&r, &d, scale));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::video_io::gaussian_blur;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn textured(seed: u64) -> Frame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Frame::from_fn(48, 40, |_, _| rng.gen::<f64>());
        let smooth = gaussian_blur(&noise, 1.5).unwrap();
        smooth.zip_map(&noise, |s, n| 0.6 * s + 0.2 * n).unwrap()
    }

    #[test]
    fn identical_is_one() {
        let f = textured(1);
        for v in vif_frame(&f, &f, 4).unwrap() {
            assert!((v - 1.0).abs() < 1e-12, "{v}");
        }
        let flat = Frame::filled(32, 32, 0.5);
        assert_eq!(vif_frame(&flat, &flat, 4).unwrap(), vec![1.0; 4]);
    }

    #[test]
    fn blur_lowers_every_scale() {
        let f = textured(2);
        let b = gaussian_blur(&f, 2.0).unwrap();
        for v in vif_frame(&f, &b, 4).unwrap() {
            assert!((0.0..1.0).contains(&v), "{v}");
        }
    }

    #[test]
    fn too_small_and_mismatch() {
        let f = Frame::filled(31, 40, 0.1);
        assert!(matches!(vif_frame(&f, &f, 4), Err(Error::FrameTooSmall(_))));
        let g = Frame::filled(40, 40, 0.1);
        assert!(matches!(
            vif_frame(&g, &f, 4),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
