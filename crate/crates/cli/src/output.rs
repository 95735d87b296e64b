//! CSV and JSON writers. Every file starts with the resolved config and seed.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::Config;

/// C's `%.{prec}g`.
pub fn fmt_g(x: f64, prec: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let p = prec.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= p as i32 {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn g12(x: f64) -> String {
    fmt_g(x, 12)
}

/// Context written at the top of every output.
#[derive(Debug, Clone)]
pub struct Header {
    pub command: String,
    pub config: Config,
    pub seed: Option<u64>,
    pub extra: Vec<(String, String)>,
}

impl Header {
    pub fn new(command: &str, config: &Config, seed: Option<u64>) -> Self {
        Header {
            command: command.into(),
            config: config.clone(),
            seed,
            extra: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.push((key.into(), value.to_string()));
        self
    }

    pub fn comment_lines(&self) -> Vec<String> {
        let mut out = vec![format!("# legalrisk {} {}", self.command, env!("CARGO_PKG_VERSION"))];
        out.push(match self.seed {
            Some(s) => format!("# seed={s}"),
            None => "# seed=none".into(),
        });
        out.extend(self.config.render().into_iter().map(|l| format!("# {l}")));
        out.extend(self.extra.iter().map(|(k, v)| format!("# {k}={v}")));
        out
    }

    pub fn json(&self) -> Value {
        let mut cfg = Map::new();
        for line in self.config.render() {
            if let Some((k, v)) = line.split_once('=') {
                cfg.insert(k.into(), Value::String(v.into()));
            }
        }
        let extra: Map<String, Value> = self
            .extra
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "config": cfg,
            "extra": extra,
        })
    }
}

pub struct CsvFile {
    out: BufWriter<fs::File>,
    columns: usize,
}

impl CsvFile {
    pub fn create(path: &Path, header: &Header, columns: &[&str]) -> io::Result<Self> {
        let mut out = BufWriter::new(fs::File::create(path)?);
        for l in header.comment_lines() {
            writeln!(out, "{l}")?;
        }
        writeln!(out, "{}", columns.join(","))?;
        Ok(CsvFile {
            out,
            columns: columns.len(),
        })
    }

    pub fn row(&mut self, vals: &[f64]) -> io::Result<()> {
        debug_assert_eq!(vals.len(), self.columns);
        let cells: Vec<String> = vals.iter().map(|v| g12(*v)).collect();
        writeln!(self.out, "{}", cells.join(","))
    }

    /// Row with leading text cells.
    pub fn row_mixed(&mut self, text: &[&str], vals: &[f64]) -> io::Result<()> {
        debug_assert_eq!(text.len() + vals.len(), self.columns);
        let mut cells: Vec<String> = text.iter().map(|s| csv_escape(s)).collect();
        cells.extend(vals.iter().map(|v| g12(*v)));
        writeln!(self.out, "{}", cells.join(","))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Writes `body` with a `header` member prepended.
pub fn write_json(path: &Path, header: &Header, body: Value) -> io::Result<()> {
    let mut obj = Map::new();
    obj.insert("header".into(), header.json());
    match body {
        Value::Object(m) => obj.extend(m),
        other => {
            obj.insert("body".into(), other);
        }
    }
    let text = serde_json::to_string_pretty(&Value::Object(obj)).map_err(io::Error::other)?;
    fs::write(path, text + "\n")
}

/// JSON number, or null for non-finite values.
pub fn jnum(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn out_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

pub fn ensure_dir(dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.5907, "0.5907"),
            (1.0, "1"),
            (100.0, "100"),
            (123456789012345.0, "1.23456789012e+14"),
            (1e-5, "1e-05"),
            (0.0001234, "0.0001234"),
            (-2.5e-7, "-2.5e-07"),
            (1.0 / 3.0, "0.333333333333"),
            (999999999999.5, "1e+12"),
            (0.0, "0"),
        ];
        for (x, s) in cases {
            assert_eq!(fmt_g(x, 12), s, "{x}");
        }
        assert_eq!(fmt_g(f64::INFINITY, 12), "inf");
    }
}
