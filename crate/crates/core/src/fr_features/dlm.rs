//! Detail Loss Metric over a 4-level biorthogonal (LeGall 5/3) wavelet
//! decomposition.
//!
//! At every level the distorted detail coefficients are split into a
//! restored part (the reference coefficient scaled by a gain clamped to
//! `[0, 1]`) and an additive impairment. Coefficients are weighted by a
//! Watson contrast sensitivity model; the restored energy is then reduced
//! by a contrast-masking threshold computed from the impairment in a 3x3
//! neighbourhood across all three orientations. The level score is the
//! ratio of masked restored energy to reference energy (cube-root pooled).

use crate::error::{Error, Result};
use crate::fr_features::vif::check_size;
use crate::video_io::{reflect, Frame};

pub const LEVELS: usize = 4;

const LOW: [f64; 5] = [-1.0 / 8.0, 2.0 / 8.0, 6.0 / 8.0, 2.0 / 8.0, -1.0 / 8.0];
const HIGH: [f64; 3] = [-0.5, 1.0, -0.5];

/// Fraction of each subband side excluded from pooling.
const BORDER_FACTOR: f64 = 0.1;

/// Row-major plane of wavelet coefficients.
#[derive(Debug, Clone)]
struct Plane {
    w: usize,
    h: usize,
    data: Vec<f64>,
}

impl Plane {
    fn from_frame(f: &Frame) -> Self {
        Plane {
            w: f.width(),
            h: f.height(),
            data: f.samples().to_vec(),
        }
    }

    #[inline]
    fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.w + x]
    }
}

/// One analysis step along rows: returns (low, high), each `floor(w/2)` wide.
fn analyze_rows(p: &Plane) -> (Plane, Plane) {
    let w2 = p.w / 2;
    let mut lo = vec![0.0; w2 * p.h];
    let mut hi = vec![0.0; w2 * p.h];
    for y in 0..p.h {
        let row = &p.data[y * p.w..(y + 1) * p.w];
        for n in 0..w2 {
            let c = 2 * n as isize;
            lo[y * w2 + n] = LOW
                .iter()
                .enumerate()
                .map(|(k, t)| t * row[reflect(c + k as isize - 2, p.w)])
                .sum();
            hi[y * w2 + n] = HIGH
                .iter()
                .enumerate()
                .map(|(k, t)| t * row[reflect(c + k as isize, p.w)])
                .sum();
        }
    }
    (
        Plane {
            w: w2,
            h: p.h,
            data: lo,
        },
        Plane {
            w: w2,
            h: p.h,
            data: hi,
        },
    )
}

fn transpose(p: &Plane) -> Plane {
    let mut data = vec![0.0; p.w * p.h];
    for y in 0..p.h {
        for x in 0..p.w {
            data[x * p.h + y] = p.at(x, y);
        }
    }
    Plane {
        w: p.h,
        h: p.w,
        data,
    }
}

fn analyze_cols(p: &Plane) -> (Plane, Plane) {
    let (lo, hi) = analyze_rows(&transpose(p));
    (transpose(&lo), transpose(&hi))
}

/// Detail subbands of one level plus the approximation feeding the next.
struct Level {
    approx: Plane,
    /// high vertically, low horizontally (horizontal edges)
    h: Plane,
    /// high horizontally, low vertically (vertical edges)
    v: Plane,
    d: Plane,
}

fn decompose(p: &Plane) -> Level {
    let (l, hx) = analyze_rows(p);
    let (ll, lh) = analyze_cols(&l);
    let (hl, hh) = analyze_cols(&hx);
    Level {
        approx: ll,
        h: lh,
        v: hl,
        d: hh,
    }
}

/// Watson model weight `1 / Q` for a level (1-based) and orientation
/// (0 = horizontal/vertical, 1 = diagonal), viewing distance of three
/// picture heights on a 1080-line display.
fn csf_weight(level: usize, diagonal: bool) -> f64 {
    const A: f64 = 0.495;
    const K: f64 = 0.466;
    const F0: f64 = 0.401;
    let g = if diagonal { 0.534 } else { 1.0 };
    let r = 3.0 * 1080.0 * std::f64::consts::PI / 180.0;
    let t = ((1u64 << level) as f64 * F0 * g / r).log10();
    let y = A * 10f64.powf(K * t * t);
    1.0 / (2.0 * y)
}

/// Masked restored detail and reference detail of one level (cube-root pooled).
fn level_terms(reference: &Level, distorted: &Level, level: usize) -> (f64, f64) {
    let (w, h) = (reference.h.w, reference.h.h);
    let n = w * h;
    let bands = [
        (&reference.h, &distorted.h, csf_weight(level, false)),
        (&reference.v, &distorted.v, csf_weight(level, false)),
        (&reference.d, &distorted.d, csf_weight(level, true)),
    ];

    // restored / artifact split, then CSF weighting
    let mut csf_r = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut csf_o = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut artifact = vec![0.0; n];
    for (b, (o, t, weight)) in bands.iter().enumerate() {
        for i in 0..n {
            let (oc, tc) = (o.data[i], t.data[i]);
            let gain = if oc == 0.0 {
                0.0
            } else {
                (tc / oc).clamp(0.0, 1.0)
            };
            let r = gain * oc;
            csf_r[b][i] = (r * weight).abs();
            csf_o[b][i] = (oc * weight).abs();
            artifact[i] += ((tc - r) * weight).abs();
        }
    }

    let bx = (w as f64 * BORDER_FACTOR).floor() as usize;
    let by = (h as f64 * BORDER_FACTOR).floor() as usize;
    let mut num = [0.0; 3];
    let mut den = [0.0; 3];
    for y in by..h - by {
        for x in bx..w - bx {
            let mut thr = 0.0;
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let sx = reflect(x as isize + dx, w);
                    let sy = reflect(y as isize + dy, h);
                    let mw = if dx == 0 && dy == 0 {
                        1.0 / 15.0
                    } else {
                        1.0 / 30.0
                    };
                    thr += mw * artifact[sy * w + sx];
                }
            }
            let i = y * w + x;
            for b in 0..3 {
                let masked = (csf_r[b][i] - thr).max(0.0);
                num[b] += masked * masked * masked;
                den[b] += csf_o[b][i] * csf_o[b][i] * csf_o[b][i];
            }
        }
    }
    let num: f64 = num.iter().map(|v| v.cbrt()).sum();
    let den: f64 = den.iter().map(|v| v.cbrt()).sum();
    (num, den)
}

fn ratio(num: f64, den: f64) -> f64 {
    if den <= 0.0 {
        1.0
    } else {
        (num / den).clamp(0.0, 1.0)
    }
}

/// DLM of one frame pair.
#[derive(Debug, Clone, PartialEq)]
pub struct DlmScores {
    /// One ratio per level, finest first.
    pub levels: Vec<f64>,
    /// Pooled over levels: summed numerators over summed denominators.
    pub combined: f64,
}

/// DLM of one frame pair for levels `0..n_levels`.
pub fn dlm_frame(reference: &Frame, distorted: &Frame, n_levels: usize) -> Result<DlmScores> {
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
    let mut r = Plane::from_frame(reference);
    let mut d = Plane::from_frame(distorted);
    let mut levels = Vec::with_capacity(n_levels);
    let (mut num_total, mut den_total) = (0.0, 0.0);
    for level in 0..n_levels.min(LEVELS) {
        let lr = decompose(&r);
        let ld = decompose(&d);
        let (num, den) = level_terms(&lr, &ld, level + 1);
        levels.push(ratio(num, den));
        num_total += num;
        den_total += den;
        r = lr.approx;
        d = ld.approx;
    }
    Ok(DlmScores {
        levels,
        combined: ratio(num_total, den_total),
    })
}
