use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-feature min/max learned on a training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// Normalized values are clipped to this range for out-of-range test rows.
pub const CLIP: (f64, f64) = (-0.5, 1.5);

pub fn normalize_fit(rows: &[Vec<f64>]) -> Result<NormalizationStats> {
    if rows.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: rows.len(),
        });
    }
    let dim = rows[0].len();
    let mut min = rows[0].clone();
    let mut max = rows[0].clone();
    for (i, row) in rows.iter().enumerate().skip(1) {
        if row.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} features, expected {dim}",
                row.len()
            )));
        }
        for (j, &v) in row.iter().enumerate() {
            min[j] = min[j].min(v);
            max[j] = max[j].max(v);
        }
    }
    Ok(NormalizationStats { min, max })
}

impl NormalizationStats {
    pub fn dim(&self) -> usize {
        self.min.len()
    }

    /// Maps a raw row to `[0, 1]` (clipped to [`CLIP`]); constant features map to 0.
    pub fn apply(&self, row: &[f64]) -> Result<Vec<f64>> {
        if row.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "row has {} features, normalization expects {}",
                row.len(),
                self.dim()
            )));
        }
        Ok(row
            .iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&x, (&lo, &hi))| {
                if hi > lo {
                    ((x - lo) / (hi - lo)).clamp(CLIP.0, CLIP.1)
                } else {
                    0.0
                }
            })
            .collect())
    }

    pub fn apply_all(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        rows.iter().map(|r| self.apply(r)).collect()
    }
}

pub fn normalize_apply(stats: &NormalizationStats, row: &[f64]) -> Result<Vec<f64>> {
    stats.apply(row)
}
