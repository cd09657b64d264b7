//! Report bundles: CSV tables, one JSON document and a text summary per run.

use crate::error::CliError;
use serde::Serialize;
use serde_json::ser::Formatter;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

/// Floats are written with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format!("{value:.16e}").as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with 17-digit floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ColumnKind {
    /// Exact integer, rational or boolean data.
    Exact,
    /// Floating point with an absolute tolerance where one is asserted.
    Float { tolerance: Option<f64> },
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Column {
    pub name: String,
    #[serde(flatten)]
    pub kind: ColumnKind,
}

pub fn exact(name: &str) -> Column {
    Column { name: name.into(), kind: ColumnKind::Exact }
}

pub fn float(name: &str, tolerance: Option<f64>) -> Column {
    Column { name: name.into(), kind: ColumnKind::Float { tolerance } }
}

pub fn text(name: &str) -> Column {
    Column { name: name.into(), kind: ColumnKind::Text }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    #[serde(skip)]
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: Vec<Column>) -> Self {
        Table { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct ReportBundle {
    pub command: String,
    pub parameters: serde_json::Value,
    pub summary: Vec<String>,
    pub invariants: Vec<InvariantCheck>,
    pub tables: Vec<Table>,
    pub result: serde_json::Value,
}

impl ReportBundle {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        ReportBundle {
            command: command.into(),
            parameters,
            summary: Vec::new(),
            invariants: Vec::new(),
            tables: Vec::new(),
            result: serde_json::Value::Null,
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.invariants.push(InvariantCheck { name: name.into(), pass, detail: detail.into() });
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    pub fn failed(&self) -> usize {
        self.invariants.iter().filter(|c| !c.pass).count()
    }

    pub fn set_result<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let text = to_json(value)?;
        self.result = serde_json::from_str(&text)?;
        Ok(())
    }

    /// Human-readable summary: the summary lines then one PASS/FAIL line per
    /// invariant.
    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        for l in &self.summary {
            s.push_str(l);
            s.push('\n');
        }
        for c in &self.invariants {
            s.push_str(&format!("{} {}: {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        s
    }

    /// Write `<command>.json`, `summary.txt` and every table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let io_err = |p: &Path| {
            let path = p.display().to_string();
            move |source| CliError::Io { path, source }
        };
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut written = Vec::new();
        for t in &self.tables {
            let path = dir.join(t.file_name());
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(t.columns.iter().map(|c| c.name.as_str()))?;
            for r in &t.rows {
                w.write_record(r)?;
            }
            w.flush().map_err(io_err(&path))?;
            written.push(path);
        }
        let path = dir.join(format!("{}.json", self.command));
        fs::write(&path, to_json(self)?).map_err(io_err(&path))?;
        written.push(path);
        let path = dir.join("summary.txt");
        fs::write(&path, self.summary_text()).map_err(io_err(&path))?;
        written.push(path);
        Ok(written)
    }
}
