//! Pearson and Spearman correlation.

use crate::error::{Error, Result};

fn check(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::TooFewRows {
            needed: 3,
            got: x.len(),
        });
    }
    Ok(())
}

/// Sample Pearson linear correlation.
pub fn pcc(x: &[f64], y: &[f64]) -> Result<f64> {
    check(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the average of their positions.
pub fn rank(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && x[idx[end]] == x[idx[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation: Pearson correlation of the rank vectors.
pub fn srcc(x: &[f64], y: &[f64]) -> Result<f64> {
    check(x, y)?;
    pcc(&rank(x), &rank(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_correlations() {
        let x = [1.0, 2.0, 4.0, 7.0];
        let up: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let down: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pcc(&x, &up).unwrap() - 1.0).abs() < 1e-12);
        assert!((pcc(&x, &down).unwrap() + 1.0).abs() < 1e-12);
        let ex: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        assert_eq!(srcc(&x, &ex).unwrap(), 1.0);
        let rev: Vec<f64> = x.iter().rev().cloned().collect();
        assert_eq!(srcc(&x, &rev).unwrap(), -1.0);
    }

    #[test]
    fn ranks() {
        assert_eq!(rank(&[10.0, 30.0, 20.0]), vec![1.0, 3.0, 2.0]);
        assert_eq!(rank(&[5.0, 5.0]), vec![1.5, 1.5]);
        assert_eq!(rank(&[2.0, 1.0, 2.0, 2.0]), vec![3.0, 1.0, 3.0, 3.0]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            pcc(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::TooFewRows { .. })
        ));
        assert!(matches!(
            pcc(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch(3, 2))
        ));
        assert!(matches!(
            pcc(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::ZeroVariance)
        ));
        assert!(matches!(
            srcc(&[1.0, 2.0, 3.0], &[4.0, 4.0, 4.0]),
            Err(Error::ZeroVariance)
        ));
    }
}
