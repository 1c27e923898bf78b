//! Versioned JSON model files.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regression::nn::NnModel;
use crate::regression::normalize::NormalizationStats;
use crate::regression::svr::SvrModel;

pub const MODEL_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "lowercase")]
pub enum ModelPayload {
    Svr(SvrModel),
    Nn(NnModel),
}

impl ModelPayload {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelPayload::Svr(_) => "svr",
            ModelPayload::Nn(_) => "nn",
        }
    }
}

/// A regressor together with everything needed to apply it to raw features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub version: u64,
    pub feature_names: Vec<String>,
    pub normalization: NormalizationStats,
    #[serde(flatten)]
    pub payload: ModelPayload,
}

impl TrainedModel {
    pub fn new(
        feature_names: Vec<String>,
        normalization: NormalizationStats,
        payload: ModelPayload,
    ) -> Result<Self> {
        let m = TrainedModel {
            version: MODEL_VERSION,
            feature_names,
            normalization,
            payload,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let dim = self.feature_names.len();
        if self.normalization.min.len() != dim || self.normalization.max.len() != dim {
            return Err(Error::CorruptModel(format!(
                "normalization has {} features, names list {dim}",
                self.normalization.min.len()
            )));
        }
        if self
            .normalization
            .min
            .iter()
            .zip(&self.normalization.max)
            .any(|(a, b)| !(a <= b))
        {
            return Err(Error::CorruptModel("normalization min exceeds max".into()));
        }
        match &self.payload {
            ModelPayload::Svr(svr) => {
                if svr.support_vectors.len() != svr.dual_coefs.len() {
                    return Err(Error::CorruptModel(
                        "support vector / coefficient count mismatch".into(),
                    ));
                }
                if svr.support_vectors.iter().any(|sv| sv.len() != dim) {
                    return Err(Error::CorruptModel(
                        "support vector dimension mismatch".into(),
                    ));
                }
                let finite = svr
                    .support_vectors
                    .iter()
                    .flatten()
                    .chain(&svr.dual_coefs)
                    .all(|v| v.is_finite())
                    && svr.bias.is_finite()
                    && svr.gamma.is_finite();
                if !finite {
                    return Err(Error::CorruptModel("non-finite SVR parameter".into()));
                }
            }
            ModelPayload::Nn(nn) => {
                nn.validate()
                    .map_err(|e| Error::CorruptModel(e.to_string()))?;
                if nn.input_dim() != dim {
                    return Err(Error::CorruptModel(format!(
                        "network input {} does not match {dim} feature names",
                        nn.input_dim()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &'static str {
        self.payload.kind()
    }

    /// Normalizes a raw feature row and predicts its score.
    pub fn predict(&self, raw: &[f64]) -> Result<f64> {
        let row = self.normalization.apply(raw)?;
        match &self.payload {
            ModelPayload::Svr(m) => m.predict(&row),
            ModelPayload::Nn(m) => m.predict(&row),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::CorruptModel(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::CorruptModel(e.to_string()))?;
        let version = value
            .get("version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::CorruptModel("missing version".into()))?;
        if version != MODEL_VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                supported: MODEL_VERSION,
            });
        }
        let model: TrainedModel =
            serde_json::from_value(value).map_err(|e| Error::CorruptModel(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }
}

pub fn model_save(model: &TrainedModel, mut sink: impl Write) -> Result<()> {
    let text = model.to_json()?;
    sink.write_all(text.as_bytes())
        .and_then(|_| sink.write_all(b"\n"))
        .map_err(|cause| Error::Io {
            path: "<model sink>".into(),
            cause,
        })
}

pub fn model_load(mut source: impl Read) -> Result<TrainedModel> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| Error::CorruptModel(e.to_string()))?;
    TrainedModel::from_json(&text)
}
