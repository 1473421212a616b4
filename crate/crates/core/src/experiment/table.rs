//! Result tables and their CSV form.
//!
//! Layout: metadata lines `# key: value`, then a header row, then one row per
//! sample. Numbers are written with 17 significant digits in scientific
//! notation so every `f64` survives a round trip. The last column is always
//! `status`: `ok`, or the code of the error that made the sample degenerate
//! (its numeric cells are then zero, never NaN).

use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("malformed table: {0}")]
    Malformed(String),
}

pub const STATUS_OK: &str = "ok";

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub values: Vec<f64>,
    pub status: String,
}

impl TableRow {
    pub fn ok(values: Vec<f64>) -> Self {
        Self {
            values,
            status: STATUS_OK.into(),
        }
    }

    pub fn flagged(width: usize, status: impl Into<String>) -> Self {
        Self {
            values: vec![0.0; width],
            status: status.into(),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
}

/// Metadata key excluded from determinism comparisons.
pub const TIMESTAMP_KEY: &str = "generated_unix";

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            metadata: Vec::new(),
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: TableRow) {
        debug_assert_eq!(row.values.len(), self.columns.len());
        debug_assert!(row.values.iter().all(|v| v.is_finite()));
        self.rows.push(row);
    }

    pub fn add_metadata(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.push((key.into(), value.into()));
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a named column over the rows with status `ok`.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().filter(|r| r.is_ok()).map(|r| r.values[i]).collect())
    }

    pub fn write_csv<W: io::Write>(&self, mut out: W) -> Result<(), TableError> {
        for (k, v) in &self.metadata {
            for line in v.lines() {
                writeln!(out, "# {k}: {line}")?;
            }
            if v.is_empty() {
                writeln!(out, "# {k}: ")?;
            }
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let mut header = self.columns.clone();
        header.push("status".into());
        w.write_record(&header)?;
        for row in &self.rows {
            let mut record: Vec<String> = row.values.iter().map(|v| format_number(*v)).collect();
            record.push(row.status.clone());
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// The CSV text without the timestamp line.
    pub fn deterministic_body(&self) -> String {
        self.to_csv_string()
            .lines()
            .filter(|l| !l.starts_with(&format!("# {TIMESTAMP_KEY}:")))
            .map(|l| format!("{l}\n"))
            .collect()
    }

    pub fn from_csv_str(text: &str) -> Result<Self, TableError> {
        let mut metadata: Vec<(String, String)> = Vec::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let body = line.strip_prefix("# ").unwrap_or(&line[1..]);
            let (k, v) = body
                .split_once(": ")
                .or_else(|| body.strip_suffix(':').map(|k| (k, "")))
                .ok_or_else(|| TableError::Malformed(format!("metadata line '{line}'")))?;
            // Multi-line values are written as repeated keys.
            match metadata.last_mut() {
                Some((last, acc)) if last == k => {
                    acc.push('\n');
                    acc.push_str(v);
                }
                _ => metadata.push((k.to_string(), v.to_string())),
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let header = reader.headers()?.clone();
        let width = header.len();
        if width == 0 || &header[width - 1] != "status" {
            return Err(TableError::Malformed("last column must be 'status'".into()));
        }
        let columns = header.iter().take(width - 1).map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let values = record
                .iter()
                .take(width - 1)
                .map(|cell| {
                    cell.parse::<f64>()
                        .map_err(|e| TableError::Malformed(format!("cell '{cell}': {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(TableRow {
                values,
                status: record[width - 1].to_string(),
            });
        }
        Ok(Self {
            metadata,
            columns,
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(-2.5), "-2.5000000000000000e0");
    }

    #[test]
    fn round_trip_with_multiline_metadata() {
        let mut t = ResultTable::new(["a", "b"]);
        t.add_metadata("kind", "weak");
        t.add_metadata("config", "x = 1\n[y]\nz = 2");
        t.push(TableRow::ok(vec![std::f64::consts::PI, -1e-300]));
        t.push(TableRow::flagged(2, "degenerate_bracket"));
        let text = t.to_csv_string();
        assert!(text.ends_with('\n'));
        let back = ResultTable::from_csv_str(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.column("a").unwrap(), vec![std::f64::consts::PI]);
    }

    #[test]
    fn timestamp_is_excluded_from_body() {
        let mut t = ResultTable::new(["a"]);
        t.add_metadata(TIMESTAMP_KEY, "12345");
        t.push(TableRow::ok(vec![1.0]));
        assert!(!t.deterministic_body().contains("12345"));
    }

    #[test]
    fn rejects_missing_status() {
        assert!(ResultTable::from_csv_str("a,b\n1,2\n").is_err());
    }
}
