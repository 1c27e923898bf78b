use fvq_core::nr_features::{
    extract_nr, fit_ggd, mscn_var_mean, self_reference, NrConfig, FEATURE_NAMES,
};
use fvq_core::synth::{distort, source_clip};
use fvq_core::video_io::gaussian_blur;
use fvq_core::{Frame, VideoSequence};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn noise_video(seed: u64, w: usize, h: usize, k: usize) -> VideoSequence {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let frames = (0..k)
        .map(|_| Frame::from_fn(w, h, |_, _| r.gen::<f64>()))
        .collect();
    VideoSequence::new(frames, 25.0, 8).unwrap()
}

#[test]
fn noise_is_far_from_its_blur() {
    let v = extract_nr(&noise_video(1, 64, 64, 4), &NrConfig::default()).unwrap();
    assert!(v.blur_delta_vif > 0.3, "{}", v.blur_delta_vif);
}

#[test]
fn heavy_blur_is_close_to_its_blur() {
    let blurred = distort(&source_clip(2, 64, 64, 4).unwrap(), 4.0, 0.0, 0).unwrap();
    let v = extract_nr(&blurred, &NrConfig::default()).unwrap();
    assert!(v.blur_delta_vif < 0.15, "{}", v.blur_delta_vif);
}

#[test]
fn self_reference_is_framewise_blur() {
    let v = noise_video(3, 20, 12, 3);
    let s = self_reference(&v, 1.3).unwrap();
    for (a, b) in v.frames().iter().zip(s.frames()) {
        assert_eq!(&gaussian_blur(a, 1.3).unwrap(), b);
    }
    let flat = VideoSequence::new(vec![Frame::filled(9, 9, 0.4); 2], 25.0, 8).unwrap();
    let sf = self_reference(&flat, 1.0).unwrap();
    assert!(sf
        .frames()
        .iter()
        .all(|f| f.samples().iter().all(|x| (x - 0.4).abs() < 1e-9)));
    assert!(self_reference(&flat, 0.0).is_err());
}

#[test]
fn mscn_variance_falls_along_sigma_ladder() {
    let noisy = distort(&source_clip(4, 48, 48, 3).unwrap(), 0.0, 0.05, 5).unwrap();
    let mut last = f64::INFINITY;
    for sigma in [0.5, 1.0, 2.0] {
        let var = mscn_var_mean(
            &self_reference(&noisy, sigma).unwrap(),
            NrConfig::default().mscn_sigma,
        )
        .unwrap();
        assert!(var < last, "sigma {sigma}: {var} after {last}");
        last = var;
    }
}

#[test]
fn flat_inputs_give_finite_features() {
    for level in [0.0, 1.0, 0.5] {
        let flat = VideoSequence::new(vec![Frame::filled(32, 32, level); 3], 25.0, 8).unwrap();
        let v = extract_nr(&flat, &NrConfig::default()).unwrap();
        assert!(v.to_vec().iter().all(|x| x.is_finite()), "{v:?}");
        assert_eq!(v.to_vec().len(), FEATURE_NAMES.len());
    }
}

#[test]
fn ggd_recovers_known_shapes() {
    let mut r = ChaCha8Rng::seed_from_u64(2024);
    let n = 100_000;
    let gauss: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
    let laplace: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = r.gen_range(-0.5..0.5);
            -u.signum() * (1.0 - 2.0 * u.abs()).ln()
        })
        .collect();
    let uniform: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
    assert!((fit_ggd(&gauss).unwrap().shape - 2.0).abs() <= 0.1);
    assert!((fit_ggd(&laplace).unwrap().shape - 1.0).abs() <= 0.1);
    assert!(fit_ggd(&uniform).unwrap().shape > 4.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn deterministic_and_finite(seed in any::<u64>(), blur in 0.0f64..3.0, noise in 0.0f64..0.1) {
        let v = distort(&source_clip(seed, 32, 32, 3).unwrap(), blur, noise, seed).unwrap();
        let a = extract_nr(&v, &NrConfig::default()).unwrap();
        let b = extract_nr(&v, &NrConfig::default()).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.to_vec().iter().all(|x| x.is_finite()));
        prop_assert!((a.blur_delta_vif + a.self_ref_spatial_sim - 1.0).abs() < 1e-12);
    }
}
