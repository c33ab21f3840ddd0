//! Plain CSV time series: `#` comment lines, one header row, then numbers
//! with 17 significant digits.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

/// Round-trip exact formatting of a double.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
    width: usize,
}

impl CsvWriter {
    pub fn create(path: &Path, comments: &[String], columns: &[String]) -> Result<Self> {
        let file = File::create(path).map_err(CliError::io(format!("creating {}", path.display())))?;
        let mut w = Self { path: path.to_path_buf(), out: BufWriter::new(file), width: columns.len() };
        for c in comments {
            w.line(&format!("# {c}"))?;
        }
        w.line(&columns.join(","))?;
        Ok(w)
    }

    fn line(&mut self, text: &str) -> Result<()> {
        writeln!(self.out, "{text}").map_err(CliError::io(format!("writing {}", self.path.display())))
    }

    pub fn record(&mut self, fields: &[String]) -> Result<()> {
        debug_assert_eq!(fields.len(), self.width);
        self.line(&fields.join(","))
    }

    pub fn row(&mut self, values: &[f64]) -> Result<()> {
        self.record(&values.iter().map(|x| fmt(*x)).collect::<Vec<_>>())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush().map_err(CliError::io(format!("writing {}", self.path.display())))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Source line of each row, for error messages.
    pub lines: Vec<usize>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| CliError::format(path, format!("cannot open: {e}")))?;
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        let mut lines = Vec::new();
        for (k, line) in BufReader::new(file).lines().enumerate() {
            let line_no = k + 1;
            let line = line.map_err(|e| CliError::format(path, format!("line {line_no}: {e}")))?;
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let Some(cols) = &columns else {
                columns = Some(line.split(',').map(str::to_string).collect());
                continue;
            };
            let record = rows.len() + 1;
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != cols.len() {
                return Err(CliError::format(
                    path,
                    format!("record {record} (line {line_no}): expected {} fields, found {}", cols.len(), cells.len()),
                ));
            }
            let values = cells
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    cell.trim().parse::<f64>().map_err(|_| {
                        CliError::format(
                            path,
                            format!("record {record} (line {line_no}), column `{}`: not a number: {cell:?}", cols[c]),
                        )
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            rows.push(values);
            lines.push(line_no);
        }
        let columns = columns.ok_or_else(|| CliError::format(path, "no header row"))?;
        Ok(Self { columns, rows, lines })
    }

    pub fn column(&self, path: &Path, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| CliError::format(path, format!("missing column `{name}`")))
    }
}
