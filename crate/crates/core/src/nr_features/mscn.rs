//! Mean-subtracted contrast-normalized (MSCN) coefficients.

use crate::error::{Error, Result};
use crate::video_io::{convolve_separable, gaussian_kernel, Frame};

/// Stabilizer added to the local deviation (one 8-bit code value).
pub const STABILIZER: f64 = 1.0 / 255.0;

/// Default Gaussian window: sigma 7/6, radius 3.
pub const DEFAULT_WINDOW_SIGMA: f64 = 7.0 / 6.0;

/// Window radius used for a given sigma: `floor(3 sigma)`, at least 1.
pub fn window_radius(sigma: f64) -> usize {
    ((3.0 * sigma).floor() as usize).max(1)
}

pub(crate) fn mscn_with_stabilizer(f: &Frame, window_sigma: f64, c: f64) -> Result<Frame> {
    if !(window_sigma > 0.0) || !window_sigma.is_finite() {
        return Err(Error::NonPositiveSigma(window_sigma));
    }
    let k = gaussian_kernel(window_sigma, window_radius(window_sigma));
    let mu = convolve_separable(f, &k);
    let sq = convolve_separable(&f.map(|v| v * v), &k);
    let out = f
        .samples()
        .iter()
        .zip(mu.samples())
        .zip(sq.samples())
        .map(|((&x, &m), &s)| (x - m) / ((s - m * m).abs().sqrt() + c))
        .collect();
    Ok(Frame::from_parts(f.width(), f.height(), out))
}

/// `(f - mu) / (sigma + C)` with Gaussian-weighted local mean and deviation.
pub fn mscn_transform(f: &Frame, window_sigma: f64) -> Result<Frame> {
    mscn_with_stabilizer(f, window_sigma, STABILIZER)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::video_io::reflect;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn constant_is_zero() {
        let out = mscn_transform(&Frame::filled(12, 9, 0.6), DEFAULT_WINDOW_SIGMA).unwrap();
        assert!(out.samples().iter().all(|&v| v.abs() < 1e-9));
        assert!(matches!(
            mscn_transform(&Frame::filled(4, 4, 0.0), 0.0),
            Err(Error::NonPositiveSigma(_))
        ));
    }

    #[test]
    fn noise_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let normal = Normal::new(0.5, 0.1).unwrap();
        let f = Frame::from_fn(256, 256, |_, _| normal.sample(&mut rng));
        let out = mscn_transform(&f, DEFAULT_WINDOW_SIGMA).unwrap();
        let n = out.len() as f64;
        let mean = out.samples().iter().sum::<f64>() / n;
        let var = out
            .samples()
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / n;
        assert!(mean.abs() < 0.05, "{mean}");
        assert!(var > 0.6 && var < 1.1, "{var}");
    }

    #[test]
    fn matches_direct_window_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let f = Frame::from_fn(5, 5, |_, _| rng.gen::<f64>());
        let out = mscn_transform(&f, DEFAULT_WINDOW_SIGMA).unwrap();
        let s = DEFAULT_WINDOW_SIGMA;
        let w = |d: i32| (-(d * d) as f64 / (2.0 * s * s)).exp();
        for y in 0..5i32 {
            for x in 0..5i32 {
                let (mut sw, mut m1, mut m2) = (0.0, 0.0, 0.0);
                for dy in -3..=3 {
                    for dx in -3..=3 {
                        let v = f.get(reflect((x + dx) as isize, 5), reflect((y + dy) as isize, 5));
                        let wt = w(dx) * w(dy);
                        sw += wt;
                        m1 += wt * v;
                        m2 += wt * v * v;
                    }
                }
                let (mu, ex2) = (m1 / sw, m2 / sw);
                let expected = (f.get(x as usize, y as usize) - mu)
                    / ((ex2 - mu * mu).abs().sqrt() + STABILIZER);
                assert!((out.get(x as usize, y as usize) - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn affine_invariant_up_to_stabilizer() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = Frame::from_fn(24, 24, |_, _| rng.gen::<f64>() * 0.5);
        for a in [0.5, 0.8, 1.3, 2.0] {
            let g = f.map(|v| a * v + 0.1);
            let lhs = mscn_transform(&g, DEFAULT_WINDOW_SIGMA).unwrap();
            let rhs = mscn_with_stabilizer(&f, DEFAULT_WINDOW_SIGMA, STABILIZER / a).unwrap();
            for (l, r) in lhs.samples().iter().zip(rhs.samples()) {
                assert!((l - r).abs() < 1e-3, "a={a}: {l} vs {r}");
            }
        }
    }
}
