//! CSV ingestion into contiguous annual series.
//!
//! Files are comma-separated UTF-8 with a header row, a `year` column and one
//! or more named value columns. Row numbers in errors count data rows from 1;
//! the header is line 1 of the file.

use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use popgrowth_core::AnnualSeries;
use thiserror::Error;

use crate::config::ColumnInput;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed CSV: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: no column named `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: row {row}: non-numeric {column} {value:?}")]
    NonNumeric { path: PathBuf, row: usize, column: String, value: String },
    #[error("{path}: row {row}: year {year} does not follow {previous}")]
    NotIncreasing { path: PathBuf, row: usize, year: i32, previous: i32 },
    #[error("{path}: duplicate year {year} at row {row}")]
    Duplicate { path: PathBuf, row: usize, year: i32 },
    #[error("{path}: gap at {year}")]
    Gap { path: PathBuf, year: i32 },
    #[error("{path}: no rows inside the requested year range")]
    Empty { path: PathBuf },
    #[error("{path}: {source}")]
    Series {
        path: PathBuf,
        #[source]
        source: popgrowth_core::Error,
    },
}

/// Optional inclusive year filter applied before the contiguity check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct YearRange {
    pub from: Option<i32>,
    pub to: Option<i32>,
}

impl YearRange {
    fn contains(&self, year: i32) -> bool {
        self.from.is_none_or(|f| year >= f) && self.to.is_none_or(|t| year <= t)
    }
}

/// Read one value column of a CSV file into an [`AnnualSeries`].
pub fn ingest_csv(input: &ColumnInput, range: YearRange, unit: &str) -> Result<AnnualSeries, IngestError> {
    let path = &input.path;
    let file = File::open(path).map_err(|source| IngestError::Io { path: path.clone(), source })?;
    parse_csv(file, path, &input.column, range, unit)
}

/// As [`ingest_csv`] over any reader; `path` only labels errors.
pub fn parse_csv<R: Read>(
    reader: R,
    path: &Path,
    column: &str,
    range: YearRange,
    unit: &str,
) -> Result<AnnualSeries, IngestError> {
    let csv_err = |source| IngestError::Csv { path: path.to_path_buf(), source };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| IngestError::MissingColumn { path: path.to_path_buf(), column: name.to_string() })
    };
    let year_col = find("year")?;
    let value_col = find(column)?;

    let mut start = None;
    let mut values = Vec::new();
    let mut previous: Option<i32> = None;
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(csv_err)?;
        let field = |c: usize| record.get(c).unwrap_or("");
        let year_text = field(year_col);
        let year: i32 = year_text.parse().map_err(|_| IngestError::NonNumeric {
            path: path.to_path_buf(),
            row,
            column: "year".into(),
            value: year_text.into(),
        })?;
        if let Some(prev) = previous {
            if year == prev {
                return Err(IngestError::Duplicate { path: path.to_path_buf(), row, year });
            }
            if year < prev {
                return Err(IngestError::NotIncreasing { path: path.to_path_buf(), row, year, previous: prev });
            }
        }
        previous = Some(year);
        if !range.contains(year) {
            continue;
        }
        let text = field(value_col);
        let value: f64 = text.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| IngestError::NonNumeric {
            path: path.to_path_buf(),
            row,
            column: column.into(),
            value: text.into(),
        })?;
        match start {
            None => start = Some(year),
            Some(s) => {
                let expected = s + values.len() as i32;
                if year != expected {
                    return Err(IngestError::Gap { path: path.to_path_buf(), year: expected });
                }
            }
        }
        values.push(value);
    }
    let start = start.ok_or_else(|| IngestError::Empty { path: path.to_path_buf() })?;
    AnnualSeries::new(start, values, unit).map_err(|source| IngestError::Series { path: path.to_path_buf(), source })
}
