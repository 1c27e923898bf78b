//! Unified full-reference and no-reference video quality assessment.
//!
//! Two videos go in (original + processed, or processed + a blurred copy of
//! itself), fixed-function features come out, and a trained regressor maps
//! the features to a quality score.
//!
//! * [`video_io`] decodes Y4M / raw planar YUV into normalized luma frames.
//! * [`fr_features`] computes VIF, DLM, motion and differential-motion features.
//! * [`nr_features`] builds the blurred self-reference and NSS statistics.
//! * [`regression`] trains epsilon-SVR and feedforward NN regressors.
//! * [`evaluation`] holds correlation metrics and the split-simulation harness.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evaluation;
pub mod fr_features;
pub mod nr_features;
mod par;
pub mod regression;
pub mod rng;
pub mod synth;
pub mod video_io;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
pub use video_io::{Frame, VideoSequence};
