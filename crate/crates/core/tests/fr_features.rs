mod common;

use common::{oracle_dm, oracle_motion, oracle_sad};
use fvq_core::fr_features::{
    dlm_scales, dm_feature, extract_fr, feature_names, motion_features, sad, vif_scales, DmNorm,
    FrConfig,
};
use fvq_core::synth::{distort, source_clip};
use fvq_core::{Frame, VideoSequence};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_video(r: &mut ChaCha8Rng, w: usize, h: usize, k: usize) -> VideoSequence {
    let frames = (0..k)
        .map(|_| Frame::from_fn(w, h, |_, _| r.gen::<f64>()))
        .collect();
    VideoSequence::new(frames, 25.0, 8).unwrap()
}

#[test]
fn sad_matches_double_loop() {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let a = Frame::from_fn(8, 8, |_, _| r.gen_range(0.0..255.0));
        let b = Frame::from_fn(8, 8, |_, _| r.gen_range(0.0..255.0));
        assert!((sad(&a, &b).unwrap() - oracle_sad(&a, &b)).abs() < 1e-9);
    }
}

#[test]
fn motion_and_dm_match_direct_sums() {
    let mut r = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let (w, h) = (r.gen_range(1..12), r.gen_range(1..12));
        let a = random_video(&mut r, w, h, 5);
        let b = random_video(&mut r, w, h, 5);
        let (plain, min) = motion_features(&a).unwrap();
        let (op, om) = oracle_motion(&a);
        assert!((plain - op).abs() < 1e-12 && (min - om).abs() < 1e-12);
        assert!((dm_feature(&a, &b, DmNorm::L1).unwrap() - oracle_dm(&a, &b, false)).abs() < 1e-12);
        assert!((dm_feature(&a, &b, DmNorm::L2).unwrap() - oracle_dm(&a, &b, true)).abs() < 1e-12);
    }
}

#[test]
fn blur_lowers_every_scale() {
    let clip = source_clip(5, 64, 64, 3).unwrap();
    let blurred = distort(&clip, 2.0, 0.0, 0).unwrap();
    let v = vif_scales(&clip, &blurred).unwrap();
    let d = dlm_scales(&clip, &blurred).unwrap();
    assert!(v.iter().chain(&d).all(|&s| s < 1.0), "{v:?} {d:?}");
}

#[test]
fn noise_ladder_is_monotone() {
    let clip = source_clip(8, 64, 64, 3).unwrap();
    let mut last_vif = f64::INFINITY;
    let mut last_dlm = [f64::INFINITY; 4];
    for sigma in [0.01, 0.02, 0.04] {
        let noisy = distort(&clip, 0.0, sigma, 77).unwrap();
        let v = vif_scales(&clip, &noisy).unwrap();
        let d = dlm_scales(&clip, &noisy).unwrap();
        assert!(v[0] < last_vif, "vif0 {} after {}", v[0], last_vif);
        for s in 0..4 {
            assert!(
                d[s] <= last_dlm[s] + 1e-3,
                "dlm{s} {} after {}",
                d[s],
                last_dlm[s]
            );
        }
        last_vif = v[0];
        last_dlm = d;
    }
}

#[test]
fn dimensionality_follows_config() {
    let clip = source_clip(1, 32, 32, 3).unwrap();
    let noisy = distort(&clip, 0.5, 0.01, 2).unwrap();
    for (l1, l2, n) in [(true, true, 13), (true, false, 12), (false, false, 11)] {
        let config = FrConfig {
            dm_l1: l1,
            dm_l2: l2,
        };
        let v = extract_fr(&clip, &noisy, &config).unwrap();
        assert_eq!(v.to_vec().len(), n);
        assert_eq!(feature_names(&config).len(), n);
    }
}

#[test]
fn identical_across_thread_counts() {
    let clip = source_clip(3, 48, 48, 4).unwrap();
    let noisy = distort(&clip, 1.0, 0.02, 4).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                extract_fr(&clip, &noisy, &FrConfig::default())
                    .unwrap()
                    .to_vec()
            })
    };
    let one = run(1);
    assert_eq!(one, run(4));
    assert_eq!(one, run(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn identity_and_offset_invariance(seed in any::<u64>(), offset in -0.3f64..0.3, blur in 0.0f64..1.5) {
        let clip = distort(&source_clip(seed, 32, 32, 3).unwrap(), blur, 0.0, 0).unwrap();
        let v = extract_fr(&clip, &clip, &FrConfig::default()).unwrap();
        for s in v.vif.iter().chain(&v.dlm) {
            prop_assert!((s - 1.0).abs() <= 1e-9, "{s}");
        }
        prop_assert_eq!(v.dm_l1, Some(0.0));
        prop_assert_eq!(v.dm_l2, Some(0.0));
        prop_assert_eq!((v.motion_plain, v.motion_min), motion_features(&clip).unwrap());

        let shifted = clip.try_map_frames(|f| Ok(f.map(|x| x + offset))).unwrap();
        prop_assert!(dm_feature(&clip, &shifted, DmNorm::L1).unwrap() <= 1e-9);
        prop_assert!(dm_feature(&clip, &shifted, DmNorm::L2).unwrap() <= 1e-9);
    }

    #[test]
    fn features_are_bounded(seed in any::<u64>(), blur in 0.0f64..2.5, noise in 0.0f64..0.08) {
        let clip = source_clip(seed, 32, 32, 3).unwrap();
        let proc_ = distort(&clip, blur, noise, seed ^ 1).unwrap();
        let v = extract_fr(&clip, &proc_, &FrConfig::default()).unwrap();
        for s in v.vif.iter().chain(&v.dlm).chain([&v.dlm_combined]) {
            prop_assert!(s.is_finite() && *s >= 0.0 && *s <= 1.0 + 1e-6, "{s}");
        }
        prop_assert!(v.to_vec().iter().all(|x| x.is_finite() && *x >= 0.0));
    }
}
