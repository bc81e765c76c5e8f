//! JSON envelope and CSV formatting. Nothing here depends on locale or time,
//! so identical inputs give byte-identical output.

use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Serialize)]
pub struct Envelope {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub inputs: Value,
    pub result: Value,
    pub warnings: Vec<String>,
}

impl Envelope {
    pub fn new(command: &'static str, inputs: Value, result: Value, warnings: Vec<String>) -> Self {
        Envelope { schema_version: SCHEMA_VERSION, command, inputs, result, warnings }
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("envelope serializes");
        s.push('\n');
        s
    }
}

/// Finite values as JSON numbers; infinities as `"inf"` / `"-inf"` since
/// plain JSON has no spelling for them.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn intervals(pairs: &[(f64, f64)]) -> Value {
    Value::Array(pairs.iter().map(|&(lo, hi)| json!([num(lo), num(hi)])).collect())
}

/// Positional decimal with exactly 17 significant digits, e.g.
/// `0.19615242270663202`, `-1.0000000000000000`, `1234.5678901234567`.
pub fn fixed17(x: f64) -> String {
    if !x.is_finite() {
        return num(x).as_str().unwrap_or("nan").to_string();
    }
    if x == 0.0 {
        return "0.0000000000000000".into();
    }
    // d.dddddddddddddddde±x carries the 17 digits and the decimal exponent
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let sign = if x < 0.0 { "-" } else { "" };
    let body = if exp < 0 {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    } else {
        let point = exp as usize + 1;
        if point >= digits.len() {
            format!("{}{}.0", digits, "0".repeat(point - digits.len()))
        } else {
            format!("{}.{}", &digits[..point], &digits[point..])
        }
    };
    format!("{sign}{body}")
}

pub fn csv(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fixed17(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
