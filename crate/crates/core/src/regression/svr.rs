//! Epsilon-SVR with an RBF kernel, trained by SMO.
//!
//! The dual is written over `2n` variables `b = [a; a*]` with labels
//! `+1` for the first half and `-1` for the second:
//!
//! ```text
//! min  1/2 b'Qb + p'b    s.t.  y'b = 0,  0 <= b <= C
//! Q_st = y_s y_t K(x_s, x_t),   p = [eps - t; eps + t]
//! ```
//!
//! Each iteration picks the maximal violating pair (first-order working
//! set selection, lowest index on ties) and solves the two-variable
//! subproblem analytically. Training rows are put in a canonical order
//! first, so the model does not depend on how the caller ordered them.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stopping tolerance on the maximal KKT violation.
pub const KKT_TOLERANCE: f64 = 1e-3;
const MAX_ITER: usize = 10_000_000;
const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvrParams {
    pub c: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            c: 10.0,
            gamma: 0.1,
            epsilon: 0.1,
        }
    }
}

impl SvrParams {
    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.gamma > 0.0 && self.epsilon >= 0.0)
            || !(self.c.is_finite() && self.gamma.is_finite() && self.epsilon.is_finite())
        {
            return Err(Error::InvalidParameter(format!(
                "SVR needs C > 0, gamma > 0, epsilon >= 0; got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvrModel {
    pub support_vectors: Vec<Vec<f64>>,
    /// `a_i - a*_i` for each support vector.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
    pub epsilon: f64,
}

/// Full solver output, including coefficients for every training row.
#[derive(Debug, Clone)]
pub struct SvrSolution {
    pub model: SvrModel,
    /// `a_i - a*_i` in the caller's row order (zero for non-support rows).
    pub coefs: Vec<f64>,
    /// Dual objective at the solution.
    pub objective: f64,
    pub iterations: usize,
}

#[inline]
pub(crate) fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Lazily computed rows of the kernel matrix.
struct KernelCache<'a> {
    rows: &'a [&'a [f64]],
    gamma: f64,
    cache: Vec<Option<Vec<f64>>>,
}

impl<'a> KernelCache<'a> {
    fn new(rows: &'a [&'a [f64]], gamma: f64) -> Self {
        KernelCache {
            rows,
            gamma,
            cache: vec![None; rows.len()],
        }
    }

    fn ensure(&mut self, i: usize) {
        if self.cache[i].is_none() {
            let xi = self.rows[i];
            self.cache[i] = Some(self.rows.iter().map(|xj| rbf(xi, xj, self.gamma)).collect());
        }
    }

    fn get(&self, i: usize) -> &[f64] {
        self.cache[i].as_deref().expect("row computed by ensure")
    }
}

fn check_inputs(rows: &[Vec<f64>], targets: &[f64]) -> Result<()> {
    if rows.len() != targets.len() {
        return Err(Error::LengthMismatch(rows.len(), targets.len()));
    }
    if rows.len() < 4 {
        return Err(Error::TooFewRows {
            needed: 4,
            got: rows.len(),
        });
    }
    let dim = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "row {i} has {} features, expected {dim}",
            rows[i].len()
        )));
    }
    if rows.iter().flatten().chain(targets).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite training value".into()));
    }
    Ok(())
}

/// Solves the epsilon-SVR dual and returns the model plus diagnostics.
///
/// When every target is identical the problem is degenerate and the
/// result is a bias-only model predicting that value.
pub fn solve_svr_dual(
    rows: &[Vec<f64>],
    targets: &[f64],
    params: &SvrParams,
) -> Result<SvrSolution> {
    check_inputs(rows, targets)?;
    params.validate()?;
    let n = rows.len();

    if targets.iter().all(|&t| t == targets[0]) {
        return Ok(SvrSolution {
            model: SvrModel {
                support_vectors: Vec::new(),
                dual_coefs: Vec::new(),
                bias: targets[0],
                gamma: params.gamma,
                c: params.c,
                epsilon: params.epsilon,
            },
            coefs: vec![0.0; n],
            objective: 0.0,
            iterations: 0,
        });
    }

    // canonical order: by feature vector, then target
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        lexicographic(&rows[a], &rows[b]).then(targets[a].total_cmp(&targets[b]))
    });
    let xs: Vec<&[f64]> = order.iter().map(|&i| rows[i].as_slice()).collect();
    let ts: Vec<f64> = order.iter().map(|&i| targets[i]).collect();

    let l = 2 * n;
    let c = params.c;
    let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
    let p: Vec<f64> = (0..l)
        .map(|t| {
            if t < n {
                params.epsilon - ts[t]
            } else {
                params.epsilon + ts[t - n]
            }
        })
        .collect();
    let mut alpha = vec![0.0; l];
    let mut grad = p.clone();
    let mut kernel = KernelCache::new(&xs, params.gamma);

    let in_up = |a: f64, y: f64| if y > 0.0 { a < c } else { a > 0.0 };
    let in_low = |a: f64, y: f64| if y > 0.0 { a > 0.0 } else { a < c };

    let mut iterations = 0;
    while iterations < MAX_ITER {
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let (mut i, mut j) = (usize::MAX, usize::MAX);
        for t in 0..l {
            let y = sign(t);
            let v = -y * grad[t];
            if in_up(alpha[t], y) && v > gmax {
                gmax = v;
                i = t;
            }
            if in_low(alpha[t], y) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < KKT_TOLERANCE {
            break;
        }
        iterations += 1;

        let (yi, yj) = (sign(i), sign(j));
        let (ri, rj) = (i % n, j % n);
        kernel.ensure(ri);
        kernel.ensure(rj);
        let kij = kernel.get(ri)[rj];
        let qij = yi * yj * kij;
        // RBF diagonal is 1
        let (qii, qjj) = (1.0, 1.0);
        let (old_i, old_j) = (alpha[i], alpha[j]);

        if yi != yj {
            let quad = (qii + qjj + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (qii + qjj - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        let (ki, kj) = (kernel.get(ri), kernel.get(rj));
        for (t, g) in grad.iter_mut().enumerate() {
            let (yt, rt) = (sign(t), t % n);
            *g += yt * (yi * ki[rt] * di + yj * kj[rt] * dj);
        }
    }

    // bias from free variables, or the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut nr_free) = (0.0, 0usize);
    for t in 0..l {
        let y = sign(t);
        let yg = y * grad[t];
        if alpha[t] >= c {
            if y < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            nr_free += 1;
            sum_free += yg;
        }
    }
    let rho = if nr_free > 0 {
        sum_free / nr_free as f64
    } else {
        (ub + lb) / 2.0
    };

    let objective = 0.5 * (0..l).map(|t| alpha[t] * (grad[t] + p[t])).sum::<f64>();

    let mut coefs = vec![0.0; n];
    let mut support_vectors = Vec::new();
    let mut dual_coefs = Vec::new();
    for k in 0..n {
        let d = alpha[k] - alpha[k + n];
        coefs[order[k]] = d;
        if d != 0.0 {
            support_vectors.push(xs[k].to_vec());
            dual_coefs.push(d);
        }
    }

    Ok(SvrSolution {
        model: SvrModel {
            support_vectors,
            dual_coefs,
            bias: -rho,
            gamma: params.gamma,
            c: params.c,
            epsilon: params.epsilon,
        },
        coefs,
        objective,
        iterations,
    })
}

/// Trains an epsilon-SVR on normalized rows.
pub fn svr_train(rows: &[Vec<f64>], targets: &[f64], params: &SvrParams) -> Result<SvrModel> {
    solve_svr_dual(rows, targets, params).map(|s| s.model)
}

impl SvrModel {
    pub fn dim(&self) -> Option<usize> {
        self.support_vectors.first().map(Vec::len)
    }

    pub fn predict(&self, row: &[f64]) -> Result<f64> {
        if let Some(d) = self.dim() {
            if d != row.len() {
                return Err(Error::DimensionMismatch(format!(
                    "row has {} features, model expects {d}",
                    row.len()
                )));
            }
        }
        Ok(self
            .support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .map(|(sv, &a)| a * rbf(row, sv, self.gamma))
            .sum::<f64>()
            + self.bias)
    }

    pub fn predict_batch(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }
}

pub fn svr_predict(model: &SvrModel, row: &[f64]) -> Result<f64> {
    model.predict(row)
}
