//! Soil-sample data model, CSV ingestion, and missing-value handling.
//!
//! A sample is a fixed record of nine numeric attributes in the canonical
//! column order `Ph, EC, OC, P, K, Fe, Zn, Mn, Cu`. Datasets are loaded
//! from UTF-8 comma-separated files with a mandatory header row and an
//! optional trailing `Fertility` column holding one of the six class
//! tokens. Missing cells (empty or `?`) are only accepted through
//! [`load_csv_raw`] followed by [`impute_missing`]; [`load_csv`] rejects
//! them with a located error.

mod synth;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use synth::{apply_label_noise, generate_synthetic, PFormula, SynthConfig};

/// Number of numeric attributes per sample.
pub const ATTRIBUTE_COUNT: usize = 9;

/// Number of fertility classes.
pub const CLASS_COUNT: usize = 6;

/// Errors raised while loading, validating, or transforming datasets.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("header is missing required column {0}")]
    MissingColumn(String),
    #[error("bad value {value:?} at row {row}, column {column}")]
    BadValue {
        row: usize,
        column: String,
        value: String,
    },
    #[error("labels required but no Fertility column present")]
    MissingLabel,
    #[error("missing value at row {row}, column {column}")]
    MissingValue { row: usize, column: String },
    #[error("column {0} has no non-missing values to impute from")]
    EmptyColumn(Attribute),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset has no labels")]
    Unlabeled,
    #[error("{rows} rows but {labels} labels")]
    LabelMismatch { rows: usize, labels: usize },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}

/// The nine soil-test attributes, in canonical column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Attribute {
    /// Soil pH (dimensionless).
    Ph,
    /// Electrical conductivity, dS/m.
    Ec,
    /// Organic carbon, percent.
    Oc,
    /// Phosphorus, ppm.
    P,
    /// Potassium, ppm.
    K,
    /// Iron, ppm.
    Fe,
    /// Zinc, ppm.
    Zn,
    /// Manganese, ppm.
    Mn,
    /// Copper, ppm.
    Cu,
}

impl Attribute {
    /// All attributes in canonical column order.
    pub const ALL: [Attribute; ATTRIBUTE_COUNT] = [
        Attribute::Ph,
        Attribute::Ec,
        Attribute::Oc,
        Attribute::P,
        Attribute::K,
        Attribute::Fe,
        Attribute::Zn,
        Attribute::Mn,
        Attribute::Cu,
    ];

    /// Canonical column index.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Canonical header spelling.
    pub fn name(self) -> &'static str {
        match self {
            Attribute::Ph => "Ph",
            Attribute::Ec => "EC",
            Attribute::Oc => "OC",
            Attribute::P => "P",
            Attribute::K => "K",
            Attribute::Fe => "Fe",
            Attribute::Zn => "Zn",
            Attribute::Mn => "Mn",
            Attribute::Cu => "Cu",
        }
    }

    /// Case-insensitive lookup by header or flag spelling.
    pub fn parse(s: &str) -> Option<Attribute> {
        Attribute::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The six ordered fertility levels, lowest first.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum FertilityClass {
    VeryLow,
    Low,
    Moderate,
    ModeratelyHigh,
    High,
    VeryHigh,
}

impl FertilityClass {
    /// All classes, lowest fertility first.
    pub const ALL: [FertilityClass; CLASS_COUNT] = [
        FertilityClass::VeryLow,
        FertilityClass::Low,
        FertilityClass::Moderate,
        FertilityClass::ModeratelyHigh,
        FertilityClass::High,
        FertilityClass::VeryHigh,
    ];

    /// Ordinal level, `VeryLow` = 0 through `VeryHigh` = 5.
    pub fn index(self) -> usize {
        self as usize
    }

    /// Class at the given ordinal level, if in range.
    pub fn from_index(i: usize) -> Option<FertilityClass> {
        FertilityClass::ALL.get(i).copied()
    }

    /// The exact token used in CSV files and reports.
    pub fn token(self) -> &'static str {
        match self {
            FertilityClass::VeryLow => "Very Low",
            FertilityClass::Low => "Low",
            FertilityClass::Moderate => "Moderate",
            FertilityClass::ModeratelyHigh => "Moderately High",
            FertilityClass::High => "High",
            FertilityClass::VeryHigh => "Very High",
        }
    }

    /// Parse a CSV token (exact spelling, surrounding whitespace ignored).
    pub fn from_token(s: &str) -> Option<FertilityClass> {
        FertilityClass::ALL.into_iter().find(|c| c.token() == s.trim())
    }
}

impl fmt::Display for FertilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One laboratory measurement record: nine finite numeric attributes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoilSample {
    values: [f64; ATTRIBUTE_COUNT],
}

impl SoilSample {
    /// Build a sample from values in canonical order, checking that pH is
    /// within [0, 14] and every other attribute is finite and non-negative.
    pub fn new(values: [f64; ATTRIBUTE_COUNT]) -> Result<SoilSample, String> {
        for (attr, &v) in Attribute::ALL.iter().zip(values.iter()) {
            if !v.is_finite() {
                return Err(format!("{attr} must be finite, got {v}"));
            }
            if *attr == Attribute::Ph {
                if !(0.0..=14.0).contains(&v) {
                    return Err(format!("Ph must be within [0, 14], got {v}"));
                }
            } else if v < 0.0 {
                return Err(format!("{attr} must be non-negative, got {v}"));
            }
        }
        Ok(SoilSample { values })
    }

    /// Value of one attribute.
    pub fn value(&self, attr: Attribute) -> f64 {
        self.values[attr.index()]
    }

    /// All nine values in canonical order.
    pub fn values(&self) -> &[f64; ATTRIBUTE_COUNT] {
        &self.values
    }
}

/// An immutable collection of samples with optional per-row class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    rows: Vec<SoilSample>,
    labels: Option<Vec<FertilityClass>>,
    provenance: String,
}

impl Dataset {
    /// Assemble a dataset; labels, when present, must match the row count.
    pub fn new(
        rows: Vec<SoilSample>,
        labels: Option<Vec<FertilityClass>>,
        provenance: impl Into<String>,
    ) -> Result<Dataset, DataError> {
        if let Some(ref l) = labels {
            if l.len() != rows.len() {
                return Err(DataError::LabelMismatch {
                    rows: rows.len(),
                    labels: l.len(),
                });
            }
        }
        Ok(Dataset {
            rows,
            labels,
            provenance: provenance.into(),
        })
    }

    pub fn rows(&self) -> &[SoilSample] {
        &self.rows
    }

    pub fn labels(&self) -> Option<&[FertilityClass]> {
        self.labels.as_deref()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows and labels together, or [`DataError::Unlabeled`].
    pub fn labeled(&self) -> Result<(&[SoilSample], &[FertilityClass]), DataError> {
        match self.labels.as_deref() {
            Some(l) => Ok((&self.rows, l)),
            None => Err(DataError::Unlabeled),
        }
    }

    /// Copy of this dataset carrying the given labels.
    pub fn with_labels(&self, labels: Vec<FertilityClass>) -> Result<Dataset, DataError> {
        Dataset::new(self.rows.clone(), Some(labels), self.provenance.clone())
    }

    /// Dataset restricted to the given row indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            rows: indices.iter().map(|&i| self.rows[i]).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
            provenance: self.provenance.clone(),
        }
    }
}

/// A parsed CSV that may still contain missing cells.
///
/// Produced by [`load_csv_raw`]; turned into a [`Dataset`] by
/// [`impute_missing`].
#[derive(Debug, Clone)]
pub struct RawDataset {
    rows: Vec<[Option<f64>; ATTRIBUTE_COUNT]>,
    labels: Option<Vec<FertilityClass>>,
    provenance: String,
}

impl RawDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// True if any cell is missing.
    pub fn has_gaps(&self) -> bool {
        self.rows.iter().any(|r| r.iter().any(|c| c.is_none()))
    }
}

/// Gap-handling strategy for [`impute_missing`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImputeStrategy {
    /// Any gap is an error.
    Reject,
    /// Replace each gap with the mean of the column's non-missing values.
    ColumnMean,
}

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t == "?"
}

/// Parse CSV text, tolerating missing cells (empty or `?`).
pub fn parse_csv_raw(text: &str, provenance: &str) -> Result<RawDataset, DataError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(DataError::EmptyDataset)?;

    // Column index of each attribute, plus the optional label column.
    let mut attr_cols: [Option<usize>; ATTRIBUTE_COUNT] = [None; ATTRIBUTE_COUNT];
    let mut label_col = None;
    for (i, name) in header.split(',').enumerate() {
        let name = name.trim();
        if name.eq_ignore_ascii_case("Fertility") {
            label_col = Some(i);
        } else if let Some(attr) = Attribute::parse(name) {
            attr_cols[attr.index()] = Some(i);
        }
    }
    for attr in Attribute::ALL {
        if attr_cols[attr.index()].is_none() {
            return Err(DataError::MissingColumn(attr.name().to_string()));
        }
    }

    let mut rows = Vec::new();
    let mut labels = label_col.map(|_| Vec::new());
    for (line_no, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row_no = line_no + 1; // 1-based data row
        let cells: Vec<&str> = line.split(',').collect();
        let mut row = [None; ATTRIBUTE_COUNT];
        for attr in Attribute::ALL {
            let col = attr_cols[attr.index()].unwrap();
            let cell = cells.get(col).copied().unwrap_or("");
            if is_missing(cell) {
                continue;
            }
            let v: f64 = cell.trim().parse().map_err(|_| DataError::BadValue {
                row: row_no,
                column: attr.name().to_string(),
                value: cell.trim().to_string(),
            })?;
            // Check the sample invariant per cell so the error is located.
            let bad = !v.is_finite()
                || (attr == Attribute::Ph && !(0.0..=14.0).contains(&v))
                || (attr != Attribute::Ph && v < 0.0);
            if bad {
                return Err(DataError::BadValue {
                    row: row_no,
                    column: attr.name().to_string(),
                    value: cell.trim().to_string(),
                });
            }
            row[attr.index()] = Some(v);
        }
        if let (Some(col), Some(ls)) = (label_col, labels.as_mut()) {
            let cell = cells.get(col).copied().unwrap_or("");
            match FertilityClass::from_token(cell) {
                Some(c) => ls.push(c),
                None => {
                    return Err(DataError::BadValue {
                        row: row_no,
                        column: "Fertility".to_string(),
                        value: cell.trim().to_string(),
                    })
                }
            }
        }
        rows.push(row);
    }
    Ok(RawDataset {
        rows,
        labels,
        provenance: provenance.to_string(),
    })
}

/// Load a CSV file, rejecting missing cells.
///
/// Use [`load_csv_raw`] plus [`impute_missing`] to accept gaps.
pub fn load_csv(path: impl AsRef<Path>, require_labels: bool) -> Result<Dataset, DataError> {
    let raw = load_csv_raw(path.as_ref())?;
    if require_labels && raw.labels.is_none() {
        return Err(DataError::MissingLabel);
    }
    impute_missing(&raw, ImputeStrategy::Reject)
}

/// Load a CSV file, tolerating missing cells (empty or `?`).
pub fn load_csv_raw(path: impl AsRef<Path>) -> Result<RawDataset, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_csv_raw(&text, &path.display().to_string())
}

/// Resolve gaps in a raw dataset per the chosen strategy.
pub fn impute_missing(raw: &RawDataset, strategy: ImputeStrategy) -> Result<Dataset, DataError> {
    // Column means over non-missing values, computed up front so Reject
    // and ColumnMean share the same scan.
    let mut means = [0.0f64; ATTRIBUTE_COUNT];
    if strategy == ImputeStrategy::ColumnMean {
        for attr in Attribute::ALL {
            let mut sum = 0.0;
            let mut count = 0usize;
            for row in &raw.rows {
                if let Some(v) = row[attr.index()] {
                    sum += v;
                    count += 1;
                }
            }
            let column_has_gap = raw.rows.iter().any(|r| r[attr.index()].is_none());
            if count == 0 && column_has_gap {
                return Err(DataError::EmptyColumn(attr));
            }
            means[attr.index()] = if count > 0 { sum / count as f64 } else { 0.0 };
        }
    }

    let mut rows = Vec::with_capacity(raw.rows.len());
    for (i, raw_row) in raw.rows.iter().enumerate() {
        let row_no = i + 1;
        let mut values = [0.0f64; ATTRIBUTE_COUNT];
        for attr in Attribute::ALL {
            values[attr.index()] = match raw_row[attr.index()] {
                Some(v) => v,
                None => match strategy {
                    ImputeStrategy::Reject => {
                        return Err(DataError::MissingValue {
                            row: row_no,
                            column: attr.name().to_string(),
                        })
                    }
                    ImputeStrategy::ColumnMean => means[attr.index()],
                },
            };
        }
        let sample = SoilSample::new(values).map_err(|_| DataError::BadValue {
            row: row_no,
            column: "row".to_string(),
            value: "imputed row violates sample invariants".to_string(),
        })?;
        rows.push(sample);
    }
    Dataset::new(rows, raw.labels.clone(), raw.provenance.clone())
}

/// Render a dataset as CSV text.
///
/// Numbers are written in Rust's shortest round-trip decimal form, so
/// `parse_csv_raw(write_csv_string(d))` reproduces every value exactly.
pub fn write_csv_string(d: &Dataset) -> String {
    let mut out = String::new();
    let header: Vec<&str> = Attribute::ALL.iter().map(|a| a.name()).collect();
    out.push_str(&header.join(","));
    if d.labels.is_some() {
        out.push_str(",Fertility");
    }
    out.push('\n');
    for (i, row) in d.rows.iter().enumerate() {
        let cells: Vec<String> = row.values().iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        if let Some(ref labels) = d.labels {
            out.push(',');
            out.push_str(labels[i].token());
        }
        out.push('\n');
    }
    out
}

/// Write a dataset to a CSV file. See [`write_csv_string`].
pub fn write_csv(d: &Dataset, path: impl AsRef<Path>) -> Result<(), DataError> {
    std::fs::write(path, write_csv_string(d))?;
    Ok(())
}

/// Per-attribute descriptive statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample (n−1) standard deviation; 0 for a single observation.
    pub stddev: f64,
}

/// Summary statistics for a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub rows: usize,
    /// Stats per attribute, in canonical order.
    pub attributes: Vec<(Attribute, AttributeStats)>,
    /// Label counts per class, lowest class first; all zero when unlabeled.
    pub class_histogram: [usize; CLASS_COUNT],
    pub labeled: bool,
}

/// Compute per-attribute min/max/mean/stddev and the class histogram.
pub fn dataset_summary(d: &Dataset) -> Result<DatasetSummary, DataError> {
    if d.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let n = d.len() as f64;
    let mut attributes = Vec::with_capacity(ATTRIBUTE_COUNT);
    for attr in Attribute::ALL {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for row in &d.rows {
            let v = row.value(attr);
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        let mean = sum / n;
        let stddev = if d.len() < 2 {
            0.0
        } else {
            let ss: f64 = d.rows.iter().map(|r| (r.value(attr) - mean).powi(2)).sum();
            (ss / (n - 1.0)).sqrt()
        };
        attributes.push((
            attr,
            AttributeStats {
                min,
                max,
                mean,
                stddev,
            },
        ));
    }
    let mut class_histogram = [0usize; CLASS_COUNT];
    if let Some(labels) = d.labels() {
        for l in labels {
            class_histogram[l.index()] += 1;
        }
    }
    Ok(DatasetSummary {
        rows: d.len(),
        attributes,
        class_histogram,
        labeled: d.labels.is_some(),
    })
}
