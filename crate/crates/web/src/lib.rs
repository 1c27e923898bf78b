//! Browser bindings: explore how the quality features react to blur and
//! noise on a seeded synthetic clip.
//!
//! Every function takes a `seed` for the source content and returns plain
//! data (JSON text or RGBA bytes) so the page needs no glue beyond
//! `JSON.parse` and `ImageData`.

use fvq_core::fr_features::{extract_fr, FrConfig};
use fvq_core::nr_features::{extract_nr, fit_ggd, mscn_transform, NrConfig, SENTINEL_FIT};
use fvq_core::synth::{distort, source_clip};
use fvq_core::{Frame, VideoSequence};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const SIDE: usize = 64;
const FRAMES: usize = 3;

fn js_err(e: fvq_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn clip(seed: u32) -> Result<VideoSequence, JsError> {
    source_clip(u64::from(seed), SIDE, SIDE, FRAMES).map_err(js_err)
}

#[derive(Debug, Serialize)]
pub struct CurvePoint {
    pub blur: f64,
    pub vif: [f64; 4],
    pub dlm: [f64; 4],
    pub dm: f64,
    pub blur_dvif: f64,
}

/// Feature values along a blur ladder `0..=max_blur` at fixed noise.
pub fn curve(
    seed: u32,
    noise: f64,
    max_blur: f64,
    steps: usize,
) -> fvq_core::Result<Vec<CurvePoint>> {
    let src = source_clip(u64::from(seed), SIDE, SIDE, FRAMES)?;
    let steps = steps.clamp(2, 64);
    (0..steps)
        .map(|i| {
            let blur = max_blur * i as f64 / (steps - 1) as f64;
            let d = distort(&src, blur, noise, u64::from(seed) + 1)?;
            let fr = extract_fr(&src, &d, &FrConfig::default())?;
            let nr = extract_nr(&d, &NrConfig::default())?;
            Ok(CurvePoint {
                blur,
                vif: fr.vif,
                dlm: fr.dlm,
                dm: fr.dm_l1.unwrap_or(0.0),
                blur_dvif: nr.blur_delta_vif,
            })
        })
        .collect()
}

/// JSON array of `{blur, vif[4], dlm[4], dm, blur_dvif}` along a blur ladder.
#[wasm_bindgen]
pub fn distortion_curve(
    seed: u32,
    noise: f64,
    max_blur: f64,
    steps: usize,
) -> Result<String, JsError> {
    let points = curve(seed, noise, max_blur, steps).map_err(js_err)?;
    Ok(serde_json::to_string(&points).expect("plain data serializes"))
}

#[derive(Debug, Serialize)]
pub struct Histogram {
    pub centers: Vec<f64>,
    pub density: Vec<f64>,
    pub fit_density: Vec<f64>,
    pub shape: f64,
    pub scale: f64,
}

/// Normalized histogram of first-frame MSCN coefficients with the fitted GGD.
pub fn histogram(seed: u32, blur: f64, noise: f64, bins: usize) -> fvq_core::Result<Histogram> {
    let d = distort(
        &source_clip(u64::from(seed), SIDE, SIDE, FRAMES)?,
        blur,
        noise,
        u64::from(seed) + 1,
    )?;
    let m = mscn_transform(&d.frames()[0], NrConfig::default().mscn_sigma)?;
    let fit = fit_ggd(m.samples()).unwrap_or(SENTINEL_FIT);
    let bins = bins.clamp(8, 256);
    let (lo, hi) = (-3.0, 3.0);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in m.samples() {
        if (lo..hi).contains(&v) {
            counts[((v - lo) / width) as usize] += 1;
        }
    }
    let total = m.len() as f64 * width;
    let centers: Vec<f64> = (0..bins).map(|i| lo + (i as f64 + 0.5) * width).collect();
    Ok(Histogram {
        density: counts.iter().map(|&c| c as f64 / total).collect(),
        fit_density: centers.iter().map(|&x| fit.density(x)).collect(),
        centers,
        shape: fit.shape,
        scale: fit.scale,
    })
}

/// JSON `{centers, density, fit_density, shape, scale}`.
#[wasm_bindgen]
pub fn mscn_histogram(seed: u32, blur: f64, noise: f64, bins: usize) -> Result<String, JsError> {
    let h = histogram(seed, blur, noise, bins).map_err(js_err)?;
    Ok(serde_json::to_string(&h).expect("plain data serializes"))
}

fn gray_rgba(frames: &[&Frame]) -> Vec<u8> {
    let h = frames[0].height();
    let mut out = Vec::with_capacity(4 * h * frames.iter().map(|f| f.width()).sum::<usize>());
    for y in 0..h {
        for f in frames {
            for x in 0..f.width() {
                let v = (f.get(x, y).clamp(0.0, 1.0) * 255.0).round() as u8;
                out.extend_from_slice(&[v, v, v, 255]);
            }
        }
    }
    out
}

/// RGBA bytes of the first source frame and its distorted version side by
/// side: `128 x 64` pixels.
#[wasm_bindgen]
pub fn render_pair(seed: u32, blur: f64, noise: f64) -> Result<Vec<u8>, JsError> {
    let src = clip(seed)?;
    let d = distort(&src, blur, noise, u64::from(seed) + 1).map_err(js_err)?;
    Ok(gray_rgba(&[&src.frames()[0], &d.frames()[0]]))
}

#[wasm_bindgen]
pub fn frame_side() -> usize {
    SIDE
}
