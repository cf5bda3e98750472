use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_sig(*v, 12),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

/// `v` with `digits` significant digits, fixed notation for moderate
/// exponents and scientific otherwise.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_owned()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

/// Data produced by one command.
#[derive(Clone, Debug)]
pub struct Document {
    pub command: &'static str,
    pub parameters: Value,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub units: Option<Value>,
    pub summary: Option<Value>,
}

impl Document {
    pub fn new(command: &'static str, parameters: Value, columns: Vec<&'static str>) -> Self {
        Self { command, parameters, columns, rows: Vec::new(), units: None, summary: None }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => self.render_json(),
        }
    }

    fn render_csv(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!(
            "# pendular {} schema_version={SCHEMA_VERSION} code_version={CODE_VERSION}\n",
            self.command
        ));
        out.push_str(&format!("# parameters: {}\n", serde_json::to_string(&self.parameters)?));
        if let Some(units) = &self.units {
            out.push_str(&format!("# units: {}\n", serde_json::to_string(units)?));
        }
        if let Some(summary) = &self.summary {
            out.push_str(&format!("# summary: {}\n", serde_json::to_string(summary)?));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        out.push_str(std::str::from_utf8(&w.into_inner()?)?);
        Ok(out)
    }

    fn render_json(&self) -> Result<String> {
        let mut doc = Map::new();
        doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
        doc.insert("code_version".into(), json!(CODE_VERSION));
        doc.insert("command".into(), json!(self.command));
        doc.insert("parameters".into(), self.parameters.clone());
        if let Some(u) = &self.units {
            doc.insert("units".into(), u.clone());
        }
        if let Some(s) = &self.summary {
            doc.insert("summary".into(), s.clone());
        }
        doc.insert("columns".into(), json!(self.columns));
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        doc.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(doc))?;
        s.push('\n');
        Ok(s)
    }
}

#[derive(Debug, serde::Serialize)]
struct ManifestOutput {
    path: PathBuf,
    bytes: usize,
    sha256: String,
}

#[derive(Debug, serde::Serialize)]
struct Manifest<'a> {
    command: &'a str,
    parameters: &'a Value,
    format: Format,
    code_version: &'a str,
    schema_version: u32,
    timestamp: String,
    outputs: Vec<ManifestOutput>,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

pub fn sha256_hex(data: &[u8]) -> String {
    Sha256::digest(data).iter().map(|b| format!("{b:02x}")).collect()
}

/// Write the rendered document to `out` (plus its manifest) or to stdout.
pub fn emit(doc: &Document, format: Format, out: Option<&Path>) -> Result<()> {
    let text = doc.render(format)?;
    match out {
        None => {
            std::io::stdout().lock().write_all(text.as_bytes()).context("writing to stdout")?;
        }
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            let manifest = Manifest {
                command: doc.command,
                parameters: &doc.parameters,
                format,
                code_version: CODE_VERSION,
                schema_version: SCHEMA_VERSION,
                timestamp: humantime::format_rfc3339_seconds(std::time::SystemTime::now()).to_string(),
                outputs: vec![ManifestOutput {
                    path: path.file_name().map(PathBuf::from).unwrap_or_else(|| path.to_path_buf()),
                    bytes: text.len(),
                    sha256: sha256_hex(text.as_bytes()),
                }],
            };
            let mpath = manifest_path(path);
            let mut m = serde_json::to_string_pretty(&manifest)?;
            m.push('\n');
            std::fs::write(&mpath, m).with_context(|| format!("writing {}", mpath.display()))?;
        }
    }
    Ok(())
}
