//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use fvq_core::{Frame, VideoSequence};

/// Two-pass Pearson correlation.
pub fn oracle_pcc(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Average ranks by counting, no sorting.
pub fn oracle_rank(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&a| {
            let less = v.iter().filter(|&&b| b < a).count() as f64;
            let equal = v.iter().filter(|&&b| b == a).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn oracle_srcc(x: &[f64], y: &[f64]) -> f64 {
    oracle_pcc(&oracle_rank(x), &oracle_rank(y))
}

/// Per-pixel mean of `|F(k) - F(k-1)|` for k = 1..K-1, by explicit loops.
pub fn oracle_frame_norms(seq: &VideoSequence) -> Vec<f64> {
    let f = seq.frames();
    let (w, h) = (seq.width(), seq.height());
    (1..f.len())
        .map(|k| {
            let mut s = 0.0;
            for y in 0..h {
                for x in 0..w {
                    s += (f[k].get(x, y) - f[k - 1].get(x, y)).abs();
                }
            }
            s / (w * h) as f64
        })
        .collect()
}

pub fn oracle_motion(seq: &VideoSequence) -> (f64, f64) {
    let d = oracle_frame_norms(seq);
    let plain = d.iter().sum::<f64>() / d.len() as f64;
    let mut min_sum = 0.0;
    for k in 0..d.len() - 1 {
        min_sum += d[k].min(d[k + 1]);
    }
    (plain, min_sum / (d.len() - 1) as f64)
}

/// Differential motion with `l2 = false` for mean |.| and `true` for RMS.
pub fn oracle_dm(orig: &VideoSequence, proc_: &VideoSequence, l2: bool) -> f64 {
    let (f, g) = (orig.frames(), proc_.frames());
    let (w, h) = (orig.width(), orig.height());
    let mut total = 0.0;
    for k in 1..f.len() {
        let mut s = 0.0;
        for y in 0..h {
            for x in 0..w {
                let e =
                    (f[k].get(x, y) - f[k - 1].get(x, y)) - (g[k].get(x, y) - g[k - 1].get(x, y));
                s += if l2 { e * e } else { e.abs() };
            }
        }
        let per_pixel = s / (w * h) as f64;
        total += if l2 { per_pixel.sqrt() } else { per_pixel };
    }
    total / (f.len() - 1) as f64
}

pub fn oracle_sad(a: &Frame, b: &Frame) -> f64 {
    let mut s = 0.0;
    for y in 0..a.height() {
        for x in 0..a.width() {
            s += (a.get(x, y) - b.get(x, y)).abs();
        }
    }
    s
}

/// Dense epsilon-SVR dual solved by accelerated projected gradient.
///
/// Minimizes `0.5 b'Kb + eps * sum(a + a*) - y'b` with `b = a - a*`,
/// `0 <= a, a* <= C` and `sum(b) = 0`. Returns the optimal objective.
pub fn qp_oracle(rows: &[Vec<f64>], y: &[f64], c: f64, gamma: f64, eps: f64) -> f64 {
    let n = rows.len();
    let k: Vec<Vec<f64>> = rows
        .iter()
        .map(|a| {
            rows.iter()
                .map(|b| {
                    (-gamma * a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>()).exp()
                })
                .collect()
        })
        .collect();
    let objective = |a: &[f64], s: &[f64]| {
        let b: Vec<f64> = (0..n).map(|i| a[i] - s[i]).collect();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                q += b[i] * k[i][j] * b[j];
            }
        }
        0.5 * q + eps * (0..n).map(|i| a[i] + s[i]).sum::<f64>()
            - (0..n).map(|i| y[i] * b[i]).sum::<f64>()
    };
    // Euclidean projection onto the box intersected with sum(a) = sum(a*).
    let project = |za: &[f64], zs: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let at = |lam: f64| -> (Vec<f64>, Vec<f64>) {
            (
                za.iter().map(|v| (v - lam).clamp(0.0, c)).collect(),
                zs.iter().map(|v| (v + lam).clamp(0.0, c)).collect(),
            )
        };
        let excess = |lam: f64| {
            let (a, s) = at(lam);
            a.iter().sum::<f64>() - s.iter().sum::<f64>()
        };
        let (mut lo, mut hi) = (-2.0 * c - 1e3, 2.0 * c + 1e3);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if excess(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        at(0.5 * (lo + hi))
    };
    // Lipschitz bound: the 2n Hessian has norm 2 * ||K|| <= 2n.
    let step = 1.0 / (2.0 * n as f64);
    let (mut a, mut s) = (vec![0.0; n], vec![0.0; n]);
    let (mut pa, mut ps) = (a.clone(), s.clone());
    let mut t = 1.0f64;
    for _ in 0..200_000 {
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let m = (t - 1.0) / t_next;
        let va: Vec<f64> = (0..n).map(|i| a[i] + m * (a[i] - pa[i])).collect();
        let vs: Vec<f64> = (0..n).map(|i| s[i] + m * (s[i] - ps[i])).collect();
        let kb: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| k[i][j] * (va[j] - vs[j])).sum())
            .collect();
        let za: Vec<f64> = (0..n)
            .map(|i| va[i] - step * (kb[i] + eps - y[i]))
            .collect();
        let zs: Vec<f64> = (0..n)
            .map(|i| vs[i] - step * (-kb[i] + eps + y[i]))
            .collect();
        let (na, ns) = project(&za, &zs);
        let change: f64 = (0..n)
            .map(|i| (na[i] - a[i]).abs() + (ns[i] - s[i]).abs())
            .sum();
        pa = std::mem::replace(&mut a, na);
        ps = std::mem::replace(&mut s, ns);
        t = t_next;
        if change < 1e-13 {
            break;
        }
    }
    objective(&a, &s)
}

/// Objective recomputed from the combined coefficients `b = a - a*`
/// (at an optimum `a * a* = 0`, so `sum(a + a*) = sum |b|`).
pub fn dual_objective(rows: &[Vec<f64>], y: &[f64], coefs: &[f64], gamma: f64, eps: f64) -> f64 {
    let n = rows.len();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d2: f64 = rows[i]
                .iter()
                .zip(&rows[j])
                .map(|(u, v)| (u - v) * (u - v))
                .sum();
            q += coefs[i] * coefs[j] * (-gamma * d2).exp();
        }
    }
    0.5 * q + eps * coefs.iter().map(|b| b.abs()).sum::<f64>()
        - y.iter().zip(coefs).map(|(a, b)| a * b).sum::<f64>()
}

/// Seeded small SVR problem: `n` rows of `dim` features in [0, 1].
pub fn random_svr_problem(seed: u64, n: usize, dim: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    use rand::{Rng, SeedableRng};
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| r.gen::<f64>()).collect())
        .collect();
    let y = rows
        .iter()
        .map(|x| x.iter().sum::<f64>().sin() * 2.0 + r.gen_range(-0.3..0.3))
        .collect();
    (rows, y)
}

/// Column-major central finite-difference gradient of `f` at `theta`.
pub fn finite_difference(theta: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut p = theta.to_vec();
    (0..theta.len())
        .map(|i| {
            let orig = p[i];
            p[i] = orig + h;
            let up = f(&p);
            p[i] = orig - h;
            let down = f(&p);
            p[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Largest relative error between backprop and central differences over
/// `points` random parameter draws of a network with `arch`.
pub fn nn_gradient_check(arch: &[usize], points: usize, seed: u64) -> f64 {
    use fvq_core::regression::NnModel;
    use rand::{Rng, SeedableRng};
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for p in 0..points {
        let mut model = NnModel::he_init(arch, seed.wrapping_add(p as u64)).unwrap();
        for b in model.biases.iter_mut().flatten() {
            *b = r.gen_range(-0.5..0.5);
        }
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..arch[0]).map(|_| r.gen::<f64>()).collect())
            .collect();
        let targets: Vec<f64> = (0..4).map(|_| r.gen_range(-1.0..1.0)).collect();
        let xs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        let (_, grad) = model.loss_and_gradient(&xs, &targets);

        let flat = |m: &NnModel| -> Vec<f64> {
            m.weights
                .iter()
                .chain(&m.biases)
                .flatten()
                .copied()
                .collect()
        };
        let analytic: Vec<f64> = grad
            .weights
            .iter()
            .chain(&grad.biases)
            .flatten()
            .copied()
            .collect();
        let theta = flat(&model);
        let shapes: Vec<usize> = model
            .weights
            .iter()
            .chain(&model.biases)
            .map(Vec::len)
            .collect();
        let numeric = finite_difference(&theta, 1e-6, |t| {
            let mut m = model.clone();
            let mut it = t.iter();
            for (dst, &len) in m.weights.iter_mut().chain(m.biases.iter_mut()).zip(&shapes) {
                for d in dst.iter_mut().take(len) {
                    *d = *it.next().unwrap();
                }
            }
            m.loss_and_gradient(&xs, &targets).0
        });
        for (a, n) in analytic.iter().zip(&numeric) {
            // absolute floor keeps near-zero components from dominating
            let rel = (a - n).abs() / a.abs().max(n.abs()).max(1e-4);
            worst = worst.max(rel);
        }
    }
    worst
}
