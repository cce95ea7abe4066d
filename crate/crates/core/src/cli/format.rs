//! Fixed 9-significant-digit number formatting and the CSV/JSON envelopes.
//! The formatting is part of the output contract: golden files depend on it.

use serde::Serialize;
use serde_json::{Map, Value};

/// Significant digits in every emitted float.
pub const SIG_DIGITS: usize = 9;

/// Formats like C's `%.9g`: fixed notation for decimal exponents in
/// [−5, 9), scientific otherwise, trailing zeros removed.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), sign, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Rounds `x` to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_sig(x).parse().unwrap_or(x)
    } else {
        x
    }
}

/// Rounds every float in a JSON tree. Non-finite floats become null, as
/// JSON has no representation for them.
pub fn round_json(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: Option<u64>,
    pub rng: &'static str,
    pub config: Value,
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_sig(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Table { header: Vec<String>, rows: Vec<Vec<Cell>> },
    Object(Value),
}

impl Payload {
    pub fn table(header: &[&str], rows: Vec<Vec<Cell>>) -> Self {
        Payload::Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }

    pub fn object<T: Serialize>(value: &T) -> Self {
        Payload::Object(serde_json::to_value(value).expect("payload types serialize"))
    }
}

/// `#`-prefixed metadata lines, then a header row and the data rows.
pub fn render_csv(meta: &Metadata, payload: &Payload) -> String {
    let mut out = String::new();
    out.push_str(&format!("# tool: {} {}\n", meta.tool, meta.version));
    out.push_str(&format!("# command: {}\n", meta.command));
    match meta.seed {
        Some(seed) => out.push_str(&format!("# seed: {seed}\n")),
        None => out.push_str("# seed: none\n"),
    }
    out.push_str(&format!("# rng: {}\n", meta.rng));
    out.push_str(&format!("# config: {}\n", meta.config));
    match payload {
        Payload::Table { header, rows } => {
            out.push_str(&header.join(","));
            out.push('\n');
            for row in rows {
                let cells: Vec<String> = row.iter().map(Cell::render).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        Payload::Object(value) => {
            out.push_str("key,value\n");
            flatten(String::new(), value, &mut out);
        }
    }
    out
}

fn flatten(prefix: String, value: &Value, out: &mut String) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(join(k), v, out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(join(&i.to_string()), v, out)),
        Value::Number(n) => {
            let text = match (n.as_u64(), n.as_i64(), n.as_f64()) {
                (Some(u), _, _) => u.to_string(),
                (_, Some(i), _) => i.to_string(),
                (_, _, Some(x)) => fmt_sig(x),
                _ => n.to_string(),
            };
            out.push_str(&format!("{prefix},{text}\n"));
        }
        Value::String(s) => out.push_str(&format!("{prefix},{s}\n")),
        Value::Bool(b) => out.push_str(&format!("{prefix},{b}\n")),
        Value::Null => out.push_str(&format!("{prefix},\n")),
    }
}

pub fn render_json(meta: &Metadata, payload: &Payload) -> String {
    let body = match payload {
        Payload::Object(value) => value.clone(),
        Payload::Table { header, rows } => Value::Array(
            rows.iter()
                .map(|row| {
                    let obj: Map<String, Value> = header
                        .iter()
                        .zip(row)
                        .map(|(h, c)| {
                            let v = match c {
                                Cell::Num(x) => serde_json::Number::from_f64(*x).map(Value::Number).unwrap_or(Value::Null),
                                Cell::Text(s) => Value::String(s.clone()),
                                Cell::Empty => Value::Null,
                            };
                            (h.clone(), v)
                        })
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        ),
    };
    let doc = serde_json::json!({
        "metadata": meta,
        "payload": round_json(body),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig(std::f64::consts::FRAC_PI_2), "1.57079633");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-2.0), "-2");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(6.725939668478189e-23), "6.72593967e-23");
        assert_eq!(fmt_sig(7.539822368615503e12), "7.53982237e+12");
        assert_eq!(fmt_sig(123456789.4), "123456789");
        assert_eq!(fmt_sig(1234567894.0), "1.23456789e+09");
        assert_eq!(fmt_sig(1e-5), "0.00001");
        assert_eq!(fmt_sig(1.5e-6), "1.5e-06");
        assert_eq!(fmt_sig(0.99999999996), "1");
        assert_eq!(fmt_sig(f64::NAN), "nan");
    }

    #[test]
    fn json_rounding() {
        let v = round_json(serde_json::json!({"a": 1.0000000001, "b": [2.123456789123], "n": 3}));
        assert_eq!(v, serde_json::json!({"a": 1.0, "b": [2.12345679], "n": 3}));
    }
}
