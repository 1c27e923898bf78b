//! Seeded synthetic clips and distortions for tests, demos and the
//! `fvq synth` command.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Result;
use crate::rng;
use crate::video_io::{gaussian_blur, Frame, VideoSequence};

/// Moving textured content: band-limited noise over a linear gradient,
/// translating by a per-clip integer velocity.
pub fn source_clip(seed: u64, width: usize, height: usize, frames: usize) -> Result<VideoSequence> {
    let mut r = rng::stream(seed);
    let vx: usize = r.gen_range(0..=2);
    let vy: usize = r.gen_range(0..=1);
    let cw = width + vx * frames + 1;
    let ch = height + vy * frames + 1;

    let fine = Frame::from_fn(cw, ch, |_, _| r.gen::<f64>() - 0.5);
    let coarse = gaussian_blur(&Frame::from_fn(cw, ch, |_, _| r.gen::<f64>() - 0.5), 4.0)?;
    let fine = gaussian_blur(&fine, 0.8)?;
    let angle: f64 = r.gen_range(0.0..std::f64::consts::TAU);
    let (gx, gy) = (angle.cos(), angle.sin());
    let contrast: f64 = r.gen_range(0.6..1.4);
    let span = (cw + ch) as f64;
    let canvas = Frame::from_fn(cw, ch, |x, y| {
        let i = y * cw + x;
        let gradient = 0.5 + 0.3 * ((x as f64 * gx + y as f64 * gy) / span);
        (gradient + contrast * (0.35 * fine.samples()[i] + 1.2 * coarse.samples()[i]))
            .clamp(0.0, 1.0)
    });

    let out = (0..frames)
        .map(|k| Frame::from_fn(width, height, |x, y| canvas.get(x + k * vx, y + k * vy)))
        .collect();
    VideoSequence::new(out, 25.0, 8)
}

/// Blur then additive Gaussian noise, clamped to `[0, 1]`. Zero disables a stage.
pub fn distort(
    clip: &VideoSequence,
    blur_sigma: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<VideoSequence> {
    let mut r = rng::stream(seed);
    let noise = Normal::new(0.0, noise_sigma.max(f64::MIN_POSITIVE)).expect("valid sigma");
    let frames = clip
        .frames()
        .iter()
        .map(|f| {
            let base = if blur_sigma > 0.0 {
                gaussian_blur(f, blur_sigma)?
            } else {
                f.clone()
            };
            Ok(if noise_sigma > 0.0 {
                Frame::from_fn(base.width(), base.height(), |x, y| {
                    (base.get(x, y) + noise.sample(&mut r)).clamp(0.0, 1.0)
                })
            } else {
                base
            })
        })
        .collect::<Result<Vec<_>>>()?;
    VideoSequence::new(frames, clip.frame_rate(), clip.bit_depth())
}

/// Blur and noise strengths of ladder level `1..=5`.
pub fn ladder_level(level: usize) -> (f64, f64) {
    let l = level as f64;
    (0.45 * l, 0.012 * l)
}

/// Synthetic opinion score of a ladder level: 5 at level 0 falling
/// monotonically towards 1.
pub fn ladder_mos(level: usize) -> f64 {
    1.0 + 4.0 / (1.0 + 0.5 * level as f64)
}
