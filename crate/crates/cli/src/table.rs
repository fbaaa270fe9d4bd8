//! CSV tables: `#` comment lines, a header row with units in the column
//! names, then numeric rows.

use std::io::Write;
use std::path::Path;

use crate::error::CliError;

/// A numeric table read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<f64>>,
    source: String,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self, CliError> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .has_headers(true)
            .from_reader(text.as_bytes());
        let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if headers.iter().all(|h| h.is_empty()) {
            return Err(CliError::Input(format!("{source}: no header row")));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            if record.len() != headers.len() {
                return Err(CliError::Input(format!(
                    "{source}:{line}: expected {} fields, got {}",
                    headers.len(),
                    record.len()
                )));
            }
            let mut row = Vec::with_capacity(record.len());
            for (field, name) in record.iter().zip(&headers) {
                match field.parse::<f64>() {
                    Ok(v) if v.is_finite() => row.push(v),
                    _ => {
                        return Err(CliError::Input(format!(
                            "{source}:{line}: column '{name}': '{field}' is not a finite number"
                        )))
                    }
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(CliError::Input(format!("{source}: no data rows")));
        }
        Ok(Table {
            headers,
            rows,
            source: source.to_string(),
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, CliError> {
        self.optional_column(name)?.ok_or_else(|| {
            CliError::Input(format!(
                "{}: missing column '{name}' (found: {})",
                self.source,
                self.headers.join(", ")
            ))
        })
    }

    pub fn optional_column(&self, name: &str) -> Result<Option<Vec<f64>>, CliError> {
        Ok(self
            .headers
            .iter()
            .position(|h| h == name)
            .map(|j| self.rows.iter().map(|r| r[j]).collect()))
    }

    /// Column of non-negative integers, such as mode indices.
    pub fn index_column(&self, name: &str) -> Result<Vec<u32>, CliError> {
        self.column(name)?
            .into_iter()
            .map(|v| {
                if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                    Ok(v as u32)
                } else {
                    Err(CliError::Input(format!(
                        "{}: column '{name}': {v} is not a non-negative integer",
                        self.source
                    )))
                }
            })
            .collect()
    }
}

/// Table to be written, with values already formatted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TableOut {
    pub comments: Vec<String>,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl TableOut {
    pub fn new(headers: &[&str]) -> Self {
        TableOut {
            comments: Vec::new(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        for c in &self.comments {
            writeln!(out, "# {c}")?;
        }
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.headers)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn write_file(&self, path: &Path) -> Result<(), CliError> {
        let file = std::fs::File::create(path)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?;
        self.write_to(std::io::BufWriter::new(file))
    }
}

/// Shortest representation that parses back to the same value.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}
