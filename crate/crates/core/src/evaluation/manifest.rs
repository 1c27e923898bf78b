//! Dataset manifests: `reference,processed,mos` CSV files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fr,
    Nr,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fr" => Ok(Mode::Fr),
            "nr" => Ok(Mode::Nr),
            other => Err(Error::Config(format!(
                "unknown mode '{other}' (expected fr or nr)"
            ))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Fr => "fr",
            Mode::Nr => "nr",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub reference: Option<PathBuf>,
    pub processed: PathBuf,
    pub mos: f64,
    /// 1-based line in the source file (the header is line 1).
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub mode: Mode,
    pub entries: Vec<ManifestEntry>,
}

#[derive(Debug, Deserialize)]
struct Row {
    reference: Option<String>,
    processed: String,
    mos: f64,
}

impl DatasetManifest {
    pub fn new(mode: Mode, entries: Vec<ManifestEntry>) -> Result<Self> {
        for e in &entries {
            if !e.mos.is_finite() {
                return Err(Error::Config(format!("line {}: non-finite mos", e.line)));
            }
            match (mode, &e.reference) {
                (Mode::Fr, None) => {
                    return Err(Error::Config(format!(
                        "line {}: fr mode requires a reference path",
                        e.line
                    )))
                }
                (Mode::Nr, Some(_)) => {
                    return Err(Error::Config(format!(
                        "line {}: nr mode forbids a reference path (mode mismatch)",
                        e.line
                    )))
                }
                _ => {}
            }
        }
        Ok(DatasetManifest { mode, entries })
    }

    /// Parses manifest CSV text. Relative paths are resolved against `base`.
    pub fn parse(text: &str, mode: Mode, base: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["reference", "processed", "mos"] {
            return Err(Error::Config(format!(
                "manifest header must be 'reference,processed,mos', found '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for (i, rec) in reader.deserialize::<Row>().enumerate() {
            let line = i + 2;
            let row = rec.map_err(|e| Error::Config(format!("line {line}: {e}")))?;
            let resolve = |p: &str| {
                let p = PathBuf::from(p);
                if p.is_absolute() {
                    p
                } else {
                    base.join(p)
                }
            };
            entries.push(ManifestEntry {
                reference: row.reference.filter(|r| !r.is_empty()).map(|r| resolve(&r)),
                processed: resolve(&row.processed),
                mos: row.mos,
                line,
            });
        }
        DatasetManifest::new(mode, entries)
    }

    pub fn load(path: &Path, mode: Mode) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|cause| Error::Io {
            path: path.display().to_string(),
            cause,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, mode, base).map_err(|e| Error::at(path.display(), e))
    }

    pub fn mos(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.mos).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
