//! Numeric CSV ingestion with optional column centering (applied first)
//! and per-row normalization.

use std::collections::HashMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::xmeans::RawPoints;
use crate::error::{Error, Result};
use crate::sphere::{self, PointSet};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
    Last,
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// `last`, a zero-based index, or a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = s.parse() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_string())
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeaderMode {
    /// Treat the first row as a header when any feature field is non-numeric.
    #[default]
    Auto,
    Present,
    Absent,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestOptions {
    pub center: bool,
    pub normalize: bool,
    pub label_column: Option<LabelColumn>,
    pub header: HeaderMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preprocessing {
    pub centered: bool,
    pub normalized: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub name: String,
    pub n: usize,
    pub d: usize,
    /// Number of distinct labels, when a label column was given.
    pub true_k: Option<usize>,
    pub preprocessing: Preprocessing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub record: DatasetRecord,
    pub rows: Vec<Vec<f64>>,
    /// Label ids in order of first appearance.
    pub labels: Option<Vec<usize>>,
    pub label_names: Vec<String>,
    /// Rows removed because they were zero after centering.
    pub dropped: usize,
}

impl Dataset {
    /// Rows as unit vectors; fails if any row is zero.
    pub fn point_set(&self) -> Result<PointSet> {
        PointSet::from_rows(&self.rows)
    }

    pub fn raw(&self) -> Result<RawPoints> {
        RawPoints::new(self.rows.clone())
    }
}

pub fn ingest_csv(path: impl AsRef<Path>, options: &IngestOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    ingest_reader(&name, File::open(path)?, options)
}

pub fn ingest_reader<R: Read>(name: &str, reader: R, options: &IngestOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = Vec::new();
    for r in rdr.records() {
        let r = r?;
        if r.iter().all(|f| f.is_empty()) {
            continue;
        }
        records.push(r);
    }
    let first = records.first().ok_or(Error::Parse {
        row: 1,
        column: 1,
        message: "no data rows".into(),
    })?;
    let width = first.len();

    let label_idx = |header: Option<&csv::StringRecord>| -> Result<Option<usize>> {
        match &options.label_column {
            None => Ok(None),
            Some(LabelColumn::Last) => Ok(Some(width - 1)),
            Some(LabelColumn::Index(i)) if *i < width => Ok(Some(*i)),
            Some(LabelColumn::Index(i)) => Err(Error::Parse {
                row: 1,
                column: i + 1,
                message: format!("label column {i} out of range for {width} columns"),
            }),
            Some(LabelColumn::Name(n)) => header
                .and_then(|h| h.iter().position(|f| f == n))
                .map(Some)
                .ok_or_else(|| Error::Parse {
                    row: 1,
                    column: 1,
                    message: format!("label column '{n}' not found in header"),
                }),
        }
    };

    let has_header = match options.header {
        HeaderMode::Present => true,
        HeaderMode::Absent => false,
        HeaderMode::Auto => {
            let provisional = match &options.label_column {
                Some(LabelColumn::Name(_)) => label_idx(Some(first)).ok().flatten(),
                _ => label_idx(None)?,
            };
            matches!(options.label_column, Some(LabelColumn::Name(_)))
                || first
                    .iter()
                    .enumerate()
                    .any(|(c, f)| Some(c) != provisional && f.parse::<f64>().is_err())
        }
    };
    let label = label_idx(has_header.then_some(first))?;
    let body = if has_header { &records[1..] } else { &records[..] };
    if body.is_empty() {
        return Err(Error::Parse {
            row: 2,
            column: 1,
            message: "no data rows after header".into(),
        });
    }

    let mut rows = Vec::with_capacity(body.len());
    let mut raw_labels = Vec::new();
    for (r, rec) in body.iter().enumerate() {
        let line = r + 1 + usize::from(has_header);
        if rec.len() != width {
            return Err(Error::Parse {
                row: line,
                column: rec.len().min(width) + 1,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        let mut row = Vec::with_capacity(width);
        for (c, field) in rec.iter().enumerate() {
            if Some(c) == label {
                raw_labels.push(field.to_string());
                continue;
            }
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row: line,
                column: c + 1,
                message: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: line,
                    column: c + 1,
                    message: format!("'{field}' is not finite"),
                });
            }
            row.push(v);
        }
        rows.push(row);
    }
    let d = rows[0].len();
    if d == 0 {
        return Err(Error::Parse {
            row: 1,
            column: 1,
            message: "no feature columns".into(),
        });
    }

    if options.center {
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for row in &rows {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        for row in &mut rows {
            for (v, m) in row.iter_mut().zip(&mean) {
                *v -= m;
            }
        }
    }

    let mut dropped = 0;
    if options.normalize {
        let mut kept_rows = Vec::with_capacity(rows.len());
        let mut kept_labels = Vec::new();
        for (i, row) in rows.into_iter().enumerate() {
            match sphere::normalize(&row) {
                Ok(u) => {
                    kept_rows.push(u.into_inner());
                    if label.is_some() {
                        kept_labels.push(raw_labels[i].clone());
                    }
                }
                Err(_) => dropped += 1,
            }
        }
        if kept_rows.is_empty() {
            return Err(Error::AllRowsDegenerate);
        }
        rows = kept_rows;
        raw_labels = kept_labels;
    }

    let (labels, label_names) = if label.is_some() {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut names = Vec::new();
        let ids = raw_labels
            .into_iter()
            .map(|l| {
                *index.entry(l.clone()).or_insert_with(|| {
                    names.push(l);
                    names.len() - 1
                })
            })
            .collect();
        (Some(ids), names)
    } else {
        (None, Vec::new())
    };

    Ok(Dataset {
        record: DatasetRecord {
            name: name.to_string(),
            n: rows.len(),
            d,
            true_k: labels.as_ref().map(|_| label_names.len()),
            preprocessing: Preprocessing {
                centered: options.center,
                normalized: options.normalize,
            },
        },
        rows,
        labels,
        label_names,
        dropped,
    })
}
