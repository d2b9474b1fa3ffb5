//! Canonical reports. JSON objects are `serde_json::Map`, which keeps keys
//! sorted, so identical inputs give byte-identical output. The text
//! renderer works from the same JSON value.

use num_rational::BigRational;
use serde_json::{json, Map, Value};

use witt_residue::brieskorn::PairingMatrix;
use witt_residue::coeff::{format_rational, Coeff, ModInt, Series, TruncPoly};
use witt_residue::Error;

pub const SCHEMA: &str = "witt-residue/1";

/// JSON encoding of a scalar: rationals as "a/b" strings, residues mod p^m
/// as {"mod", "value"}, s-truncated polynomials as coefficient arrays.
pub trait ToJson: Coeff {
    fn to_json(&self) -> Value;
}

impl ToJson for BigRational {
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
}

impl ToJson for ModInt {
    fn to_json(&self) -> Value {
        json!({ "mod": self.modulus().modulus(), "value": self.value() })
    }
}

impl<C: ToJson> ToJson for TruncPoly<C> {
    fn to_json(&self) -> Value {
        Value::Array(self.coeffs().iter().map(|c| c.to_json()).collect())
    }
}

/// Coefficients of t^low .. t^{order−1}.
fn window<S: ToJson>(s: &Series<S>, low: i64, order: i64) -> Value {
    let zero = S::zero(s.ctx());
    Value::Array((low..order).map(|k| s.coeff(k).unwrap_or_else(|| zero.clone()).to_json()).collect())
}

pub fn series_json<S: ToJson>(s: &Series<S>) -> Value {
    let low = s.valuation().min(0);
    json!({ "t_low": low, "t_order": s.order(), "coeffs": window(s, low, s.order()) })
}

/// Matrix of series on a common window t^{t_low} .. t^{t_order−1}.
pub fn matrix_json<S: ToJson>(k: &PairingMatrix<S>) -> Value {
    let low = k.valuation().min(0);
    let order = k.order();
    let entries: Vec<Value> = k
        .entries()
        .iter()
        .map(|row| Value::Array(row.iter().map(|s| window(s, low, order)).collect()))
        .collect();
    json!({ "t_low": low, "t_order": order, "entries": entries })
}

/// Matrix of plain scalars.
pub fn scalar_matrix_json<S: ToJson>(m: &[Vec<S>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(|c| c.to_json()).collect())).collect())
}

pub fn rational_json(q: &BigRational) -> Value {
    q.to_json()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    command: String,
    config: Map<String, Value>,
    results: Map<String, Value>,
    errors: Vec<Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.to_string(), config: Map::new(), results: Map::new(), errors: Vec::new() }
    }

    pub fn config(&mut self, key: &str, value: impl Into<Value>) {
        self.config.insert(key.to_string(), value.into());
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    pub fn error(&mut self, e: &Error) {
        self.errors.push(json!({ "kind": e.kind(), "message": e.to_string() }));
    }

    pub fn usage_error(&mut self, message: &str) {
        self.errors.push(json!({ "kind": "Usage", "message": message }));
    }

    pub fn has_errors(&self) -> bool {
        !self.errors.is_empty()
    }

    pub fn to_value(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "config": Value::Object(self.config.clone()),
            "results": Value::Object(self.results.clone()),
            "errors": self.errors,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} ({SCHEMA})\n", self.command);
        if !self.config.is_empty() {
            out.push_str("config:\n");
            for (k, v) in &self.config {
                out.push_str(&format!("  {k}: {}\n", inline(v)));
            }
        }
        if !self.results.is_empty() {
            out.push_str("results:\n");
            for (k, v) in &self.results {
                render(&mut out, k, v, 1);
            }
        }
        if self.errors.is_empty() {
            out.push_str("errors: none\n");
        } else {
            out.push_str("errors:\n");
            for e in &self.errors {
                out.push_str(&format!("  {}: {}\n", inline(&e["kind"]), inline(&e["message"])));
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

fn is_matrix(v: &Value) -> bool {
    v.as_object().is_some_and(|o| o.len() == 3 && o.contains_key("entries") && o.contains_key("t_low"))
}

fn is_series(v: &Value) -> bool {
    v.as_object().is_some_and(|o| o.len() == 3 && o.contains_key("coeffs") && o.contains_key("t_low"))
}

/// A coefficient: "a/b", {"mod", "value"} or an array of s-coefficients.
fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Object(o) if o.contains_key("mod") => o["value"].to_string(),
        Value::Array(cs) => {
            let terms: Vec<String> = cs
                .iter()
                .enumerate()
                .filter(|(_, c)| !is_zero_scalar(c))
                .map(|(k, c)| {
                    let c = scalar_text(c);
                    match k {
                        0 => c,
                        1 => format!("({c})*s"),
                        _ => format!("({c})*s^{k}"),
                    }
                })
                .collect();
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join(" + ")
            }
        }
        other => other.to_string(),
    }
}

fn is_zero_scalar(v: &Value) -> bool {
    match v {
        Value::String(s) => s == "0",
        Value::Object(o) => o.get("value").and_then(Value::as_u64) == Some(0),
        Value::Array(cs) => cs.iter().all(is_zero_scalar),
        _ => false,
    }
}

/// Σ c_k t^k over the window starting at `low`.
fn t_poly_text(coeffs: &[Value], low: i64) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !is_zero_scalar(c))
        .map(|(i, c)| {
            let k = low + i as i64;
            let mut c = scalar_text(c);
            if c.contains(" + ") {
                c = format!("({c})");
            }
            match k {
                0 => c,
                1 => format!("{c}*t"),
                _ => format!("{c}*t^{k}"),
            }
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => {
            let parts: Vec<String> = a.iter().map(inline).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Object(o) if o.contains_key("mod") && o.len() == 2 => scalar_text(v),
        Value::Object(_) if is_series(v) => {
            let low = v["t_low"].as_i64().unwrap_or(0);
            let cs = v["coeffs"].as_array().cloned().unwrap_or_default();
            format!("{} + O(t^{})", t_poly_text(&cs, low), v["t_order"])
        }
        Value::Object(o) => {
            let parts: Vec<String> = o.iter().map(|(k, x)| format!("{k}: {}", inline(x))).collect();
            format!("{{{}}}", parts.join(", "))
        }
        other => other.to_string(),
    }
}

fn render(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if is_matrix(v) {
        let low = v["t_low"].as_i64().unwrap_or(0);
        out.push_str(&format!("{pad}{key} (mod t^{}):\n", v["t_order"]));
        let rows: Vec<Vec<String>> = v["entries"]
            .as_array()
            .map(|rows| {
                rows.iter()
                    .map(|r| {
                        r.as_array()
                            .map(|es| es.iter().map(|e| t_poly_text(e.as_array().map_or(&[][..], |a| a), low)).collect())
                            .unwrap_or_default()
                    })
                    .collect()
            })
            .unwrap_or_default();
        table(out, &rows, depth + 1);
    } else if key.ends_with("matrix") && v.as_array().is_some_and(|rows| rows.iter().all(Value::is_array)) {
        out.push_str(&format!("{pad}{key}:\n"));
        let rows: Vec<Vec<String>> =
            v.as_array().unwrap().iter().map(|r| r.as_array().unwrap().iter().map(scalar_text).collect()).collect();
        table(out, &rows, depth + 1);
    } else if v.as_array().is_some_and(|items| !items.is_empty() && items.iter().all(|i| i.is_object() && !is_series(i))) {
        out.push_str(&format!("{pad}{key}:\n"));
        for item in v.as_array().unwrap() {
            out.push_str(&format!("{pad}  - {}\n", inline(item)));
        }
    } else if let Value::Object(o) = v {
        if is_series(v) || (o.contains_key("mod") && o.len() == 2) {
            out.push_str(&format!("{pad}{key}: {}\n", inline(v)));
        } else {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, x) in o {
                render(out, k, x, depth + 1);
            }
        }
    } else {
        out.push_str(&format!("{pad}{key}: {}\n", inline(v)));
    }
}

fn table(out: &mut String, rows: &[Vec<String>], depth: usize) {
    let pad = "  ".repeat(depth);
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|j| rows.iter().filter_map(|r| r.get(j)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    for r in rows {
        let cells: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:<w$}")).collect();
        out.push_str(&format!("{pad}{}\n", cells.join("  ").trim_end()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use witt_residue::coeff::Modulus;

    #[test]
    fn scalar_encodings() {
        let q = BigRational::new(1.into(), 3.into());
        assert_eq!(q.to_json(), json!("1/3"));
        let m = ModInt::new(Modulus::new(5, 2).unwrap(), 17);
        assert_eq!(m.to_json().to_string(), r#"{"mod":25,"value":17}"#);
    }

    #[test]
    fn keys_are_sorted_and_text_has_tables() {
        let mut r = Report::new("pairing");
        r.config("torder", 8);
        r.config("f", "x^3");
        let third = BigRational::new(1.into(), 3.into());
        let zero = BigRational::from_integer(0.into());
        let k = PairingMatrix::new(vec![
            vec![Series::constant(zero.clone(), 8), Series::constant(third.clone(), 8)],
            vec![Series::constant(third, 8), Series::monomial(BigRational::new((-1).into(), 9.into()), 1, 8)],
        ])
        .unwrap();
        r.result("K", matrix_json(&k));
        let j = r.to_json();
        assert!(j.find("\"command\"").unwrap() < j.find("\"config\"").unwrap());
        assert!(j.find("\"f\"").unwrap() < j.find("\"torder\"").unwrap());
        let t = r.to_text();
        assert!(t.contains("K (mod t^8):"), "{t}");
        assert!(t.contains("0    1/3"), "{t}");
        assert!(t.contains("1/3  -1/9*t"), "{t}");
    }
}
