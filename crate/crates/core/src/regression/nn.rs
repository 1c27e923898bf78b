//! Fully connected feedforward regressor: ReLU hidden layers, identity
//! output, mean squared error, mini-batch RMSProp.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

pub const RMSPROP_DECAY: f64 = 0.9;
pub const RMSPROP_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NnModel {
    pub layer_sizes: Vec<usize>,
    /// `weights[l]` is row-major `layer_sizes[l+1] x layer_sizes[l]`.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NnHyper {
    pub lr: f64,
    pub batch: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl NnHyper {
    pub fn with_seed(seed: u64) -> Self {
        NnHyper {
            lr: 1e-3,
            batch: 16,
            epochs: 2000,
            seed,
        }
    }
}

/// Gradients laid out like the model parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

fn check_arch(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
        return Err(Error::InvalidParameter(format!(
            "bad architecture {layer_sizes:?}"
        )));
    }
    if *layer_sizes.last().expect("non-empty") != 1 {
        return Err(Error::InvalidParameter(format!(
            "architecture {layer_sizes:?} must end in a single output"
        )));
    }
    Ok(())
}

impl NnModel {
    /// All parameters zero.
    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        check_arch(layer_sizes)?;
        Ok(NnModel {
            layer_sizes: layer_sizes.to_vec(),
            weights: layer_sizes
                .windows(2)
                .map(|w| vec![0.0; w[0] * w[1]])
                .collect(),
            biases: layer_sizes[1..].iter().map(|&n| vec![0.0; n]).collect(),
        })
    }

    /// He-normal weights, zero biases.
    pub fn he_init(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        let mut model = Self::zeros(layer_sizes)?;
        let mut r = rng::stream(seed);
        for (l, w) in model.weights.iter_mut().enumerate() {
            let std = (2.0 / layer_sizes[l] as f64).sqrt();
            let normal = Normal::new(0.0, std).expect("positive std");
            for v in w.iter_mut() {
                *v = normal.sample(&mut r);
            }
        }
        Ok(model)
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    /// Structural and numeric consistency.
    pub fn validate(&self) -> Result<()> {
        check_arch(&self.layer_sizes)?;
        let layers = self.layer_sizes.len() - 1;
        if self.weights.len() != layers || self.biases.len() != layers {
            return Err(Error::CorruptModel("layer count mismatch".into()));
        }
        for l in 0..layers {
            let (fan_in, fan_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            if self.weights[l].len() != fan_in * fan_out || self.biases[l].len() != fan_out {
                return Err(Error::CorruptModel(format!(
                    "layer {l} has inconsistent shape"
                )));
            }
        }
        if self
            .weights
            .iter()
            .chain(&self.biases)
            .flatten()
            .any(|v| !v.is_finite())
        {
            return Err(Error::CorruptModel("non-finite parameter".into()));
        }
        Ok(())
    }

    fn check_row(&self, row: &[f64]) -> Result<()> {
        if row.len() != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "row has {} features, network expects {}",
                row.len(),
                self.input_dim()
            )));
        }
        Ok(())
    }

    /// Activations of every layer, input first. Hidden layers are post-ReLU.
    fn forward_all(&self, row: &[f64]) -> Vec<Vec<f64>> {
        let layers = self.weights.len();
        let mut acts = Vec::with_capacity(layers + 1);
        acts.push(row.to_vec());
        for l in 0..layers {
            let (fan_in, fan_out) = (self.layer_sizes[l], self.layer_sizes[l + 1]);
            let input = &acts[l];
            let w = &self.weights[l];
            let mut out: Vec<f64> = (0..fan_out)
                .map(|o| {
                    let wr = &w[o * fan_in..(o + 1) * fan_in];
                    wr.iter().zip(input).map(|(a, b)| a * b).sum::<f64>() + self.biases[l][o]
                })
                .collect();
            if l + 1 < layers {
                for v in &mut out {
                    *v = v.max(0.0);
                }
            }
            acts.push(out);
        }
        acts
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        self.check_row(row)?;
        Ok(self.forward_all(row).last().expect("output layer")[0])
    }

    /// Mean squared error over a data set.
    pub fn mse(&self, rows: &[Vec<f64>], targets: &[f64]) -> Result<f64> {
        let mut acc = 0.0;
        for (r, t) in rows.iter().zip(targets) {
            let e = self.predict(r)? - t;
            acc += e * e;
        }
        Ok(acc / rows.len() as f64)
    }

    /// MSE and its gradient over the given rows, by backpropagation.
    pub fn loss_and_gradient(&self, rows: &[&[f64]], targets: &[f64]) -> (f64, Gradients) {
        let layers = self.weights.len();
        let mut gw: Vec<Vec<f64>> = self.weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let mut gb: Vec<Vec<f64>> = self.biases.iter().map(|b| vec![0.0; b.len()]).collect();
        let scale = 1.0 / rows.len() as f64;
        let mut loss = 0.0;

        for (row, &target) in rows.iter().zip(targets) {
            let acts = self.forward_all(row);
            let err = acts[layers][0] - target;
            loss += err * err * scale;
            // dL/d(pre-activation) of the current layer
            let mut delta = vec![2.0 * err * scale];
            for l in (0..layers).rev() {
                let fan_in = self.layer_sizes[l];
                let input = &acts[l];
                for (o, &d) in delta.iter().enumerate() {
                    gb[l][o] += d;
                    let g = &mut gw[l][o * fan_in..(o + 1) * fan_in];
                    for (gi, &x) in g.iter_mut().zip(input) {
                        *gi += d * x;
                    }
                }
                if l > 0 {
                    let w = &self.weights[l];
                    let mut prev = vec![0.0; fan_in];
                    for (o, &d) in delta.iter().enumerate() {
                        for (p, &wv) in prev.iter_mut().zip(&w[o * fan_in..(o + 1) * fan_in]) {
                            *p += d * wv;
                        }
                    }
                    // ReLU derivative, taken as 0 at the kink
                    for (p, &a) in prev.iter_mut().zip(input) {
                        if a <= 0.0 {
                            *p = 0.0;
                        }
                    }
                    delta = prev;
                }
            }
        }
        (
            loss,
            Gradients {
                weights: gw,
                biases: gb,
            },
        )
    }
}

pub fn nn_predict(model: &NnModel, row: &[f64]) -> Result<f64> {
    model.predict(row)
}

/// Trained network with the full-data loss recorded before each epoch and
/// once after the last.
#[derive(Debug, Clone)]
pub struct NnTraining {
    pub model: NnModel,
    pub loss_history: Vec<f64>,
}

fn rmsprop_step(params: &mut [f64], grads: &[f64], cache: &mut [f64], lr: f64) {
    for ((p, &g), c) in params.iter_mut().zip(grads).zip(cache.iter_mut()) {
        *c = RMSPROP_DECAY * *c + (1.0 - RMSPROP_DECAY) * g * g;
        *p -= lr * g / (c.sqrt() + RMSPROP_EPS);
    }
}

/// Trains from a given starting point.
pub fn nn_train_from(
    mut model: NnModel,
    rows: &[Vec<f64>],
    targets: &[f64],
    hyper: &NnHyper,
) -> Result<NnTraining> {
    if rows.len() != targets.len() {
        return Err(Error::LengthMismatch(rows.len(), targets.len()));
    }
    if rows.is_empty() {
        return Err(Error::TooFewRows { needed: 1, got: 0 });
    }
    if let Some(r) = rows.iter().find(|r| r.len() != model.input_dim()) {
        return Err(Error::DimensionMismatch(format!(
            "rows have {} features, network input is {}",
            r.len(),
            model.input_dim()
        )));
    }
    if hyper.batch == 0 || !(hyper.lr > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bad hyperparameters {hyper:?}"
        )));
    }

    let mut r = rng::stream(rng::derive_seed(hyper.seed, 1));
    let mut cache_w: Vec<Vec<f64>> = model.weights.iter().map(|w| vec![0.0; w.len()]).collect();
    let mut cache_b: Vec<Vec<f64>> = model.biases.iter().map(|b| vec![0.0; b.len()]).collect();
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut history = Vec::with_capacity(hyper.epochs + 1);

    for epoch in 0..=hyper.epochs {
        let loss = model.mse(rows, targets)?;
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, loss });
        }
        history.push(loss);
        if epoch == hyper.epochs {
            break;
        }
        order.shuffle(&mut r);
        for chunk in order.chunks(hyper.batch) {
            let xs: Vec<&[f64]> = chunk.iter().map(|&i| rows[i].as_slice()).collect();
            let ts: Vec<f64> = chunk.iter().map(|&i| targets[i]).collect();
            let (_, g) = model.loss_and_gradient(&xs, &ts);
            for l in 0..model.weights.len() {
                rmsprop_step(
                    &mut model.weights[l],
                    &g.weights[l],
                    &mut cache_w[l],
                    hyper.lr,
                );
                rmsprop_step(
                    &mut model.biases[l],
                    &g.biases[l],
                    &mut cache_b[l],
                    hyper.lr,
                );
            }
        }
    }
    Ok(NnTraining {
        model,
        loss_history: history,
    })
}

/// He-initialized training run; returns the model and its loss history.
pub fn nn_train_with_history(
    rows: &[Vec<f64>],
    targets: &[f64],
    arch: &[usize],
    hyper: &NnHyper,
) -> Result<NnTraining> {
    let model = NnModel::he_init(arch, hyper.seed)?;
    nn_train_from(model, rows, targets, hyper)
}

pub fn nn_train(
    rows: &[Vec<f64>],
    targets: &[f64],
    arch: &[usize],
    hyper: &NnHyper,
) -> Result<NnModel> {
    nn_train_with_history(rows, targets, arch, hyper).map(|t| t.model)
}
