//! Matrix CSV for grid fields and long-format tables.
//!
//! A field file has a header row `label, x_0, ..., x_n` followed by one row
//! per y node, `y_j, u(x_0, y_j), ..., u(x_n, y_j)`, rows in increasing y.
//! Numbers use `{:.16e}` (17 significant digits) so values re-read
//! bit-identically; absent nodes are written as `NaN`.

use aer_core::{Field2D, Grid2D, PartialField};
use std::io::{Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: u64, message: String },
}

pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// A parsed matrix file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvMatrix {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major, `ys.len()` rows of `xs.len()` values.
    pub values: Vec<f64>,
}

impl CsvMatrix {
    pub fn from_values(label: &str, grid: &Grid2D, values: &[f64]) -> Self {
        Self {
            label: label.to_string(),
            xs: grid.xs(),
            ys: grid.ys(),
            values: values.to_vec(),
        }
    }

    pub fn from_field(label: &str, field: &Field2D) -> Self {
        Self::from_values(label, field.grid(), field.values())
    }

    pub fn from_partial(label: &str, field: &PartialField) -> Self {
        Self::from_values(label, field.grid(), field.values())
    }

    pub fn write<W: Write>(&self, out: W) -> Result<(), CsvError> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        w.write_record(
            std::iter::once(self.label.clone()).chain(self.xs.iter().map(|&x| fmt_num(x))),
        )?;
        for (j, &y) in self.ys.iter().enumerate() {
            let row = &self.values[j * self.xs.len()..(j + 1) * self.xs.len()];
            w.write_record(std::iter::once(fmt_num(y)).chain(row.iter().map(|&v| fmt_num(v))))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read<R: Read>(input: R) -> Result<Self, CsvError> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let mut records = r.records();
        let header = match records.next() {
            Some(rec) => rec?,
            None => {
                return Err(CsvError::Format {
                    line: 1,
                    message: "empty file".into(),
                })
            }
        };
        let line_of = |rec: &csv::StringRecord| rec.position().map_or(0, |p| p.line());
        let num = |s: &str, line: u64| {
            s.parse::<f64>().map_err(|_| CsvError::Format {
                line,
                message: format!("not a number: '{s}'"),
            })
        };
        let label = header.get(0).unwrap_or_default().to_string();
        let xs = header
            .iter()
            .skip(1)
            .map(|s| num(s, 1))
            .collect::<Result<Vec<_>, _>>()?;
        let (mut ys, mut values) = (Vec::new(), Vec::new());
        for rec in records {
            let rec = rec?;
            let line = line_of(&rec);
            if rec.len() != xs.len() + 1 {
                return Err(CsvError::Format {
                    line,
                    message: format!("expected {} cells, found {}", xs.len() + 1, rec.len()),
                });
            }
            ys.push(num(&rec[0], line)?);
            for s in rec.iter().skip(1) {
                values.push(num(s, line)?);
            }
        }
        Ok(Self {
            label,
            xs,
            ys,
            values,
        })
    }

    /// Places the values on `grid`; the coordinates must match it exactly.
    pub fn to_partial(&self, grid: &Grid2D) -> Result<PartialField, CsvError> {
        if self.xs != grid.xs() || self.ys != grid.ys() {
            return Err(CsvError::Format {
                line: 1,
                message: "coordinates do not match the grid".into(),
            });
        }
        PartialField::new(*grid, self.values.clone()).map_err(|e| CsvError::Format {
            line: 0,
            message: e.to_string(),
        })
    }
}

/// Long-format table with a header row.
pub fn write_table<W: Write>(
    out: W,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CsvError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
