use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

/// Significant digits of every emitted value.
pub const DIGITS: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Column-major description plus row data, with an ordered metadata echo.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(meta: Vec<(String, String)>, columns: Vec<String>) -> Self {
        ResultTable {
            meta,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_g(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let meta: serde_json::Map<String, serde_json::Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let rows: Vec<Vec<serde_json::Value>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| json_number(x)).collect())
            .collect();
        let doc = serde_json::json!({
            "meta": meta,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("plain JSON values");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn emit(&self, format: Format, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.render(format);
        match path {
            Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
            None => {
                use std::io::Write;
                std::io::stdout()
                    .lock()
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }

    /// Inverse of [`ResultTable::to_csv`].
    pub fn parse_csv(text: &str) -> Result<Self, String> {
        let mut meta = Vec::new();
        let mut lines = text.lines();
        let header = loop {
            let line = lines.next().ok_or("missing column header")?;
            match line.strip_prefix("# ") {
                Some(kv) => {
                    let (k, v) = kv.split_once('=').ok_or_else(|| format!("bad metadata line `{line}`"))?;
                    meta.push((k.to_string(), v.to_string()));
                }
                None => break line,
            }
        };
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for line in lines {
            let row = line
                .split(',')
                .map(|c| c.parse::<f64>().map_err(|e| format!("bad value `{c}`: {e}")))
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != columns.len() {
                return Err(format!("row has {} cells, header has {}", row.len(), columns.len()));
            }
            rows.push(row);
        }
        Ok(ResultTable { meta, columns, rows })
    }
}

fn json_number(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(round_digits(x))
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

/// `x` rounded to [`DIGITS`] significant digits.
pub fn round_digits(x: f64) -> f64 {
    if x.is_finite() {
        format!("{:.*e}", DIGITS - 1, x).parse().expect("valid float")
    } else {
        x
    }
}

/// C `%.15g`.
pub fn format_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let fixed = format!("{:.*}", (DIGITS as i32 - 1 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
