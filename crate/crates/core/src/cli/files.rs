use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::video_io::{read_raw_yuv, read_y4m, VideoSequence};

use super::config::RunConfig;

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|cause| Error::Io {
        path: path.display().to_string(),
        cause,
    })
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|cause| Error::Io {
            path: dir.display().to_string(),
            cause,
        })?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|cause| Error::Io {
            path: path.display().to_string(),
            cause,
        })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    write_bytes(path, text.as_bytes())
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(bytes)
        .and_then(|_| w.flush())
        .map_err(|cause| Error::Io {
            path: path.display().to_string(),
            cause,
        })
}

/// Decodes a video by extension: `.y4m`, or raw planar `.yuv` using the
/// geometry in `config`.
pub fn load_video(path: &Path, config: &RunConfig) -> Result<VideoSequence> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let reader = BufReader::new(open(path)?);
    match ext.as_deref() {
        Some("y4m") => read_y4m(reader),
        Some("yuv") => {
            if config.raw_width == 0 || config.raw_height == 0 {
                return Err(Error::Config(
                    "raw .yuv input needs raw_width and raw_height in the config".into(),
                ));
            }
            read_raw_yuv(
                reader,
                config.raw_width,
                config.raw_height,
                config.raw_bit_depth,
                config.chroma()?,
                config.raw_fps,
            )
        }
        _ => Err(Error::UnsupportedFormat(format!(
            "{}: expected a .y4m or .yuv file",
            path.display()
        ))),
    }
}

/// A feature matrix with its column names.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn located(path: &Path, line: u64, msg: impl std::fmt::Display) -> Error {
    Error::at(
        format!("{}:{line}", path.display()),
        Error::Malformed(msg.to_string()),
    )
}

/// Streams rows of a feature CSV, validating width and parsing floats.
pub struct FeatureReader {
    path: std::path::PathBuf,
    names: Vec<String>,
    records: csv::StringRecordsIntoIter<BufReader<File>>,
}

impl FeatureReader {
    pub fn open(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(BufReader::new(open(path)?));
        let names: Vec<String> = reader
            .headers()
            .map_err(|e| located(path, 1, e))?
            .iter()
            .map(str::to_string)
            .collect();
        if names.is_empty() || names.iter().any(String::is_empty) {
            return Err(located(path, 1, "header has empty column names"));
        }
        Ok(FeatureReader {
            path: path.to_path_buf(),
            names,
            records: reader.into_records(),
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

impl Iterator for FeatureReader {
    type Item = Result<Vec<f64>>;

    fn next(&mut self) -> Option<Self::Item> {
        let rec = self.records.next()?;
        Some((|| {
            let rec = rec.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                located(&self.path, line, e)
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != self.names.len() {
                return Err(located(
                    &self.path,
                    line,
                    format!("{} fields, header has {}", rec.len(), self.names.len()),
                ));
            }
            rec.iter()
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| {
                            located(&self.path, line, format!("'{f}' is not a finite number"))
                        })
                })
                .collect()
        })())
    }
}

pub fn read_features(path: &Path) -> Result<FeatureTable> {
    let reader = FeatureReader::open(path)?;
    let names = reader.names().to_vec();
    let rows = reader.collect::<Result<Vec<_>>>()?;
    Ok(FeatureTable { names, rows })
}

/// Values are written in Rust's shortest round-trip float form.
pub fn write_features(path: &Path, table: &FeatureTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(&table.names)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(|cause| Error::Io {
        path: path.display().to_string(),
        cause,
    })
}
