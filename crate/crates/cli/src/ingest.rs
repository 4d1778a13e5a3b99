use std::io::Read;

use plastream::InputTuple;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("line {0}: not a number")]
    ParseError(u64),
    #[error("line {0}: timestamp does not increase")]
    NonMonotonicTime(u64),
    #[error("line {0}: non-finite value")]
    NonFiniteValue(u64),
    #[error("line {line}: no column {column}")]
    MissingColumn { line: u64, column: String },
    #[error("column `{0}` is not in the header")]
    UnknownColumn(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A column given by 0-based position or, when the file has a header, by
/// name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Index(usize),
    Name(String),
}

impl std::str::FromStr for Column {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(s.parse().map_or_else(|_| Column::Name(s.to_owned()), Column::Index))
    }
}

impl std::fmt::Display for Column {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Column::Index(i) => i.fmt(f),
            Column::Name(n) => n.fmt(f),
        }
    }
}

/// Timestamps and one value series per requested column.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub timestamps: Vec<f64>,
    pub channels: Vec<Vec<f64>>,
}

impl Table {
    pub fn channel(&self, k: usize) -> Vec<InputTuple> {
        self.timestamps
            .iter()
            .zip(&self.channels[k])
            .map(|(&t, &y)| InputTuple::new(t, y))
            .collect()
    }
}

fn resolve(col: &Column, header: Option<&csv::StringRecord>) -> Result<usize, IngestError> {
    match (col, header) {
        (Column::Index(i), _) => Ok(*i),
        (Column::Name(n), Some(h)) => h
            .iter()
            .position(|c| c.trim() == n)
            .ok_or_else(|| IngestError::UnknownColumn(n.clone())),
        (Column::Name(n), None) => Err(IngestError::UnknownColumn(n.clone())),
    }
}

/// Reads comma-separated `t` and value columns, checking that timestamps
/// strictly increase and that every number is finite.
pub fn ingest_csv<R: Read>(
    reader: R,
    t_col: &Column,
    y_cols: &[Column],
    has_header: bool,
) -> Result<Table, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = if has_header { Some(rdr.headers()?.clone()) } else { None };
    let t_idx = resolve(t_col, header.as_ref())?;
    let y_idx: Vec<usize> = y_cols
        .iter()
        .map(|c| resolve(c, header.as_ref()))
        .collect::<Result<_, _>>()?;
    let mut table = Table {
        timestamps: Vec::new(),
        channels: vec![Vec::new(); y_idx.len()],
    };
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize, name: &Column| -> Result<f64, IngestError> {
            let raw = record.get(i).ok_or_else(|| IngestError::MissingColumn {
                line,
                column: name.to_string(),
            })?;
            let v: f64 = raw.parse().map_err(|_| IngestError::ParseError(line))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(IngestError::NonFiniteValue(line))
            }
        };
        let t = field(t_idx, t_col)?;
        let ys: Vec<f64> = y_idx
            .iter()
            .zip(y_cols)
            .map(|(&i, c)| field(i, c))
            .collect::<Result<_, _>>()?;
        if table.timestamps.last().is_some_and(|&last| t <= last) {
            return Err(IngestError::NonMonotonicTime(line));
        }
        table.timestamps.push(t);
        for (ch, y) in table.channels.iter_mut().zip(ys) {
            ch.push(y);
        }
    }
    Ok(table)
}

/// Reads only the timestamp column.
pub fn ingest_timestamps<R: Read>(reader: R, t_col: &Column, has_header: bool) -> Result<Vec<f64>, IngestError> {
    Ok(ingest_csv(reader, t_col, &[], has_header)?.timestamps)
}
