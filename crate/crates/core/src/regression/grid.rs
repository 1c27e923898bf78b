//! Cross-validated grid search over SVR hyperparameters.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::srcc;
use crate::par;
use crate::regression::svr::{svr_train, SvrParams};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrGrid {
    pub c: Vec<f64>,
    pub gamma: Vec<f64>,
    pub epsilon: Vec<f64>,
}

impl Default for SvrGrid {
    fn default() -> Self {
        SvrGrid {
            c: vec![1.0, 10.0, 100.0],
            gamma: vec![0.01, 0.1, 1.0],
            epsilon: vec![0.1],
        }
    }
}

impl SvrGrid {
    /// Every combination, C outermost.
    pub fn points(&self) -> Vec<SvrParams> {
        let mut out = Vec::new();
        for &c in &self.c {
            for &gamma in &self.gamma {
                for &epsilon in &self.epsilon {
                    out.push(SvrParams { c, gamma, epsilon });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPointScore {
    pub params: SvrParams,
    pub cv_srcc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub params: SvrParams,
    pub cv_srcc: f64,
    pub scores: Vec<GridPointScore>,
}

/// Assigns each row to a fold after a seeded shuffle.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::stream(seed));
    let mut fold = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        fold[i] = pos % folds;
    }
    fold
}

/// SRCC of pooled out-of-fold predictions; a constant predictor scores 0.
fn cv_score(
    rows: &[Vec<f64>],
    targets: &[f64],
    fold: &[usize],
    folds: usize,
    params: &SvrParams,
) -> Result<f64> {
    let mut predictions = vec![0.0; rows.len()];
    for f in 0..folds {
        let (mut xs, mut ts) = (Vec::new(), Vec::new());
        for i in (0..rows.len()).filter(|&i| fold[i] != f) {
            xs.push(rows[i].clone());
            ts.push(targets[i]);
        }
        let model = svr_train(&xs, &ts, params)?;
        for i in (0..rows.len()).filter(|&i| fold[i] == f) {
            predictions[i] = model.predict(&rows[i])?;
        }
    }
    match srcc(&predictions, targets) {
        Ok(v) => Ok(v),
        Err(Error::ZeroVariance) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Higher CV score wins; ties go to smaller C, then smaller gamma, then smaller epsilon.
fn better(a: &GridPointScore, b: &GridPointScore) -> bool {
    let ord = b
        .cv_srcc
        .total_cmp(&a.cv_srcc)
        .then(a.params.c.total_cmp(&b.params.c))
        .then(a.params.gamma.total_cmp(&b.params.gamma))
        .then(a.params.epsilon.total_cmp(&b.params.epsilon));
    ord == Ordering::Less
}

pub fn svr_grid_search(
    rows: &[Vec<f64>],
    targets: &[f64],
    grid: &SvrGrid,
    folds: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    let points = grid.points();
    if points.is_empty() {
        return Err(Error::InvalidParameter("empty SVR grid".into()));
    }
    if folds < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 folds, got {folds}"
        )));
    }
    if rows.len() != targets.len() {
        return Err(Error::LengthMismatch(rows.len(), targets.len()));
    }
    // every training fold must hold at least 4 rows
    if rows.len() < folds || rows.len() - rows.len().div_ceil(folds) < 4 {
        return Err(Error::TooFewRows {
            needed: folds.max(4 + 4_usize.div_ceil(folds - 1)),
            got: rows.len(),
        });
    }
    let fold = fold_assignment(rows.len(), folds, seed);
    let scores = par::map_indexed(points.len(), |k| {
        cv_score(rows, targets, &fold, folds, &points[k]).map(|cv_srcc| GridPointScore {
            params: points[k],
            cv_srcc,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut best = &scores[0];
    for s in &scores[1..] {
        if better(s, best) {
            best = s;
        }
    }
    Ok(GridSearchResult {
        params: best.params,
        cv_srcc: best.cv_srcc,
        scores: scores.clone(),
    })
}
