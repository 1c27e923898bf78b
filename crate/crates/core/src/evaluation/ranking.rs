//! Per-feature correlation against subjective scores, for downselection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::correlation::{pcc, srcc};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCorrelation {
    pub name: String,
    /// Column index in the input matrix.
    pub index: usize,
    pub pcc: f64,
    pub srcc: f64,
    /// Mean of `|pcc|` and `|srcc|`; the sort key.
    pub mean_abs: f64,
    /// Constant column: correlations reported as 0.
    pub zero_variance: bool,
}

/// Ranks features by the mean of their absolute PCC and SRCC against `mos`,
/// strongest first. Equal scores keep column order.
pub fn feature_correlation_report(
    features: &[Vec<f64>],
    mos: &[f64],
    names: &[String],
) -> Result<Vec<FeatureCorrelation>> {
    if features.len() != mos.len() {
        return Err(Error::LengthMismatch(features.len(), mos.len()));
    }
    if features.len() < 3 {
        return Err(Error::TooFewRows {
            needed: 3,
            got: features.len(),
        });
    }
    if let Some(r) = features.iter().find(|r| r.len() != names.len()) {
        return Err(Error::DimensionMismatch(format!(
            "row has {} features, {} names given",
            r.len(),
            names.len()
        )));
    }
    let mut out = Vec::with_capacity(names.len());
    for (j, name) in names.iter().enumerate() {
        let column: Vec<f64> = features.iter().map(|r| r[j]).collect();
        let (p, s, zero_variance) = match (pcc(&column, mos), srcc(&column, mos)) {
            (Ok(p), Ok(s)) => (p, s, false),
            (Err(Error::ZeroVariance), _) | (_, Err(Error::ZeroVariance)) => (0.0, 0.0, true),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        out.push(FeatureCorrelation {
            name: name.clone(),
            index: j,
            pcc: p,
            srcc: s,
            mean_abs: (p.abs() + s.abs()) / 2.0,
            zero_variance,
        });
    }
    out.sort_by(|a, b| b.mean_abs.total_cmp(&a.mean_abs));
    Ok(out)
}

/// Text table of a ranking.
pub fn ranking_table(ranking: &[FeatureCorrelation]) -> String {
    let mut out = format!(
        "{:>4}  {:<16} {:>8} {:>8} {:>8}\n",
        "rank", "feature", "pcc", "srcc", "mean"
    );
    for (i, f) in ranking.iter().enumerate() {
        out.push_str(&format!(
            "{:>4}  {:<16} {:>8.4} {:>8.4} {:>8.4}{}\n",
            i + 1,
            f.name,
            f.pcc,
            f.srcc,
            f.mean_abs,
            if f.zero_variance {
                "  (zero variance)"
            } else {
                ""
            }
        ));
    }
    out
}
