//! Deterministic JSON and CSV rendering. Every float is printed with 17
//! significant digits so that values round-trip exactly.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("expected `json` or `csv`, got `{other}`")),
        }
    }
}

pub fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

/// One CSV/JSON cell.
#[derive(Debug, Clone)]
pub enum Field {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Int(i) => i.to_string(),
            Field::Float(v) => {
                if v.is_finite() {
                    float(*v)
                } else {
                    String::new()
                }
            }
            Field::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> String {
        match self {
            Field::Int(i) => i.to_string(),
            Field::Float(v) => float(*v),
            Field::Text(s) => serde_json::to_string(s).expect("strings always serialize"),
        }
    }
}

/// A header plus rows, rendered as CSV or as a JSON array of objects.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.header.join(",");
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Field::csv).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Json => {
                let mut out = String::from("[");
                for (i, row) in self.rows.iter().enumerate() {
                    out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
                    for (j, (k, v)) in self.header.iter().zip(row).enumerate() {
                        if j > 0 {
                            out.push_str(", ");
                        }
                        let _ = write!(out, "\"{k}\": {}", v.json());
                    }
                    out.push('}');
                }
                out.push_str(if self.rows.is_empty() { "]\n" } else { "\n]\n" });
                out
            }
        }
    }
}

/// Render any serializable record as pretty JSON with fixed float precision.
/// Object keys come out sorted.
pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("strings always serialize")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            // short numeric vectors stay on one line
            if items.iter().all(|x| x.is_number()) {
                out.push('[');
                for (i, x) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(x, indent, out);
                }
                out.push(']');
                return;
            }
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                out.push_str(if i == 0 { "\n" } else { ",\n" });
                pad(indent + 1, out);
                write_value(x, indent + 1, out);
            }
            out.push('\n');
            pad(indent, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(if i == 0 { "\n" } else { ",\n" });
                pad(indent + 1, out);
                out.push_str(&serde_json::to_string(k).expect("strings always serialize"));
                out.push_str(": ");
                write_value(x, indent + 1, out);
            }
            out.push('\n');
            pad(indent, out);
            out.push('}');
        }
    }
}

fn pad(indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

/// Flat `field,value` CSV for a record whose leaves are scalars. Nested
/// arrays and objects are flattened with `.`-joined paths.
pub fn record_csv<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut out = String::from("field,value\n");
    flatten("", &v, &mut out);
    Ok(out)
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, out);
            }
        }
        Value::Null => {
            let _ = writeln!(out, "{prefix},");
        }
        Value::Number(n) if n.is_f64() => {
            let _ = writeln!(out, "{prefix},{}", float(n.as_f64().unwrap_or(f64::NAN)));
        }
        Value::String(s) => {
            let _ = writeln!(out, "{prefix},{s}");
        }
        other => {
            let _ = writeln!(out, "{prefix},{other}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_significant_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(std::f64::consts::PI), "3.1415926535897931e0");
        for v in [0.1, -2.5e-300, 1.0 / 3.0, 1e22 / 7.0] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(float(f64::NAN), "null");
    }

    #[test]
    fn table_renders_both_formats() {
        let mut t = Table::new(&["label", "i", "x"]);
        t.push(vec![Field::Text("eta1".into()), Field::Int(0), Field::Float(0.5)]);
        assert_eq!(t.render(Format::Csv), "label,i,x\neta1,0,5.0000000000000000e-1\n");
        let j = t.render(Format::Json);
        let parsed: Value = serde_json::from_str(&j).unwrap();
        assert_eq!(parsed[0]["x"], 0.5);
        assert_eq!(Table::new(&["x"]).render(Format::Json), "[]\n");
    }

    #[test]
    fn records_round_trip_through_json() {
        #[derive(Serialize)]
        struct R {
            a: f64,
            n: u64,
            v: [f64; 2],
            s: Option<f64>,
        }
        let text = json(&R {
            a: 0.1,
            n: 3,
            v: [1.0, -0.0],
            s: None,
        })
        .unwrap();
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["a"], 0.1);
        assert_eq!(parsed["n"], 3);
        assert!(parsed["s"].is_null());
        let csv = record_csv(&R {
            a: 0.1,
            n: 3,
            v: [1.0, 2.0],
            s: None,
        })
        .unwrap();
        assert!(csv.contains("v.1,2.0000000000000000e0\n"));
        assert!(csv.contains("s,\n"));
    }
}
