//! JSON file formats and number formatting.
//!
//! Numeric fields accept either JSON numbers or strings. Strings may be `"p/q"`,
//! integers or decimals, and coordinates are always read exactly: a JSON number
//! `0.1` becomes `1/10`. Errors carry a path to the offending field such as
//! `vertices[2][1]`.

use std::fs;
use std::path::Path;

use serde_json::{json, Map, Value};
use subbary_core::invariants::{JumpingData, ValuationRecord};
use subbary_core::number::{format_rational, parse_rational, to_f64};
use subbary_core::profile::ConcaveProfile;
use subbary_core::{ConvexBody, Rational};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: invalid JSON: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_err(field: &str, message: impl Into<String>) -> InputError {
    InputError::Field {
        field: field.into(),
        message: message.into(),
    }
}

pub fn read_json(path: &Path) -> Result<Value, InputError> {
    let text = fs::read_to_string(path).map_err(|source| InputError::Read {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| InputError::Json {
        path: path.display().to_string(),
        source,
    })
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, prefix: &str) -> Result<&'a Value, InputError> {
    obj.get(key)
        .ok_or_else(|| field_err(&join(prefix, key), "missing field"))
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.into()
    } else {
        format!("{prefix}.{key}")
    }
}

fn as_object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>, InputError> {
    v.as_object()
        .ok_or_else(|| field_err(if field.is_empty() { "<root>" } else { field }, "expected an object"))
}

fn as_array<'a>(v: &'a Value, field: &str) -> Result<&'a Vec<Value>, InputError> {
    v.as_array().ok_or_else(|| field_err(field, "expected an array"))
}

pub fn parse_exact(v: &Value, field: &str) -> Result<Rational, InputError> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(field_err(field, "expected a number or a \"p/q\" string")),
    };
    parse_rational(&text).map_err(|e| field_err(field, e.to_string()))
}

pub fn parse_real(v: &Value, field: &str) -> Result<f64, InputError> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| field_err(field, "number out of range")),
        _ => parse_exact(v, field).map(|q| to_f64(&q)),
    }
}

fn parse_count(v: &Value, field: &str) -> Result<usize, InputError> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| field_err(field, "expected a non-negative integer"))
}

fn parse_reals(v: &Value, field: &str) -> Result<Vec<f64>, InputError> {
    as_array(v, field)?
        .iter()
        .enumerate()
        .map(|(i, x)| parse_real(x, &format!("{field}[{i}]")))
        .collect()
}

/// `{"dim": n, "vertices": [[x, ...], ...]}`.
pub fn parse_body(v: &Value, prefix: &str) -> Result<ConvexBody, InputError> {
    let obj = as_object(v, prefix)?;
    let dim_field = join(prefix, "dim");
    let dim = parse_count(get(obj, "dim", prefix)?, &dim_field)?;
    let vf = join(prefix, "vertices");
    let rows = as_array(get(obj, "vertices", prefix)?, &vf)?;
    let mut points = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let rf = format!("{vf}[{i}]");
        let coords = as_array(row, &rf)?;
        if coords.len() != dim {
            return Err(field_err(
                &rf,
                format!("has {} coordinates, expected {dim}", coords.len()),
            ));
        }
        let p = coords
            .iter()
            .enumerate()
            .map(|(k, c)| parse_exact(c, &format!("{rf}[{k}]")))
            .collect::<Result<Vec<_>, _>>()?;
        points.push(p);
    }
    ConvexBody::build(points, dim).map_err(|e| field_err(&vf, e.to_string()))
}

pub fn body_to_json(body: &ConvexBody) -> Value {
    json!({
        "dim": body.dim(),
        "vertices": body.vertices().iter()
            .map(|p| p.iter().map(format_rational).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

/// One record `{"name", "A", "scale"?, "body"}`.
pub fn parse_valuation(v: &Value, prefix: &str, allow_zero_a: bool) -> Result<ValuationRecord, InputError> {
    let obj = as_object(v, prefix)?;
    let name = get(obj, "name", prefix)?
        .as_str()
        .ok_or_else(|| field_err(&join(prefix, "name"), "expected a string"))?
        .to_string();
    let a = parse_real(get(obj, "A", prefix)?, &join(prefix, "A"))?;
    let scale = match obj.get("scale") {
        Some(s) => parse_real(s, &join(prefix, "scale"))?,
        None => 1.0,
    };
    let body = parse_body(get(obj, "body", prefix)?, &join(prefix, "body"))?;
    let made = if allow_zero_a {
        ValuationRecord::new_lenient(name, a, scale, body)
    } else {
        ValuationRecord::new(name, a, scale, body)
    };
    made.map_err(|e| field_err(prefix, e.to_string()))
}

/// A single record or an array of them.
pub fn parse_valuations(v: &Value, allow_zero_a: bool) -> Result<Vec<ValuationRecord>, InputError> {
    match v {
        Value::Array(items) => {
            if items.is_empty() {
                return Err(field_err("<root>", "no valuation records"));
            }
            items
                .iter()
                .enumerate()
                .map(|(i, item)| parse_valuation(item, &format!("[{i}]"), allow_zero_a))
                .collect()
        }
        _ => Ok(vec![parse_valuation(v, "", allow_zero_a)?]),
    }
}

pub fn valuation_to_json(v: &ValuationRecord) -> Value {
    json!({
        "name": v.name(),
        "A": v.a(),
        "scale": v.scale(),
        "body": body_to_json(v.body()),
    })
}

/// `{"k", "d_k", "j"}`.
pub fn parse_jumping(v: &Value) -> Result<JumpingData, InputError> {
    let obj = as_object(v, "")?;
    let k = parse_count(get(obj, "k", "")?, "k")?;
    let d_k = parse_count(get(obj, "d_k", "")?, "d_k")?;
    let j = parse_reals(get(obj, "j", "")?, "j")?;
    JumpingData::new(k, d_k, j).map_err(|e| field_err("j", e.to_string()))
}

/// `{"T", "breakpoints", "values"}`.
pub fn parse_profile(v: &Value) -> Result<ConcaveProfile, InputError> {
    let obj = as_object(v, "")?;
    let length = parse_real(get(obj, "T", "")?, "T")?;
    let breakpoints = parse_reals(get(obj, "breakpoints", "")?, "breakpoints")?;
    let values = parse_reals(get(obj, "values", "")?, "values")?;
    ConcaveProfile::new(length, breakpoints, values).map_err(|e| field_err("values", e.to_string()))
}

pub fn profile_to_json(f: &ConcaveProfile) -> Value {
    json!({
        "T": f.length(),
        "breakpoints": f.breakpoints(),
        "values": f.values(),
    })
}

/// Decimal string with 15 significant digits, trailing zeros removed. Scientific
/// notation is used outside `[1e-6, 1e15)`.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-6..15).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (14 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Output policy for numbers: 15-digit decimals, or `"p/q"` where an exact
/// value exists and `exact` is set.
#[derive(Debug, Clone, Copy, Default)]
pub struct NumberStyle {
    pub exact: bool,
}

impl NumberStyle {
    pub fn real(&self, x: f64) -> Value {
        Value::String(fmt_real(x))
    }

    pub fn rational(&self, q: &Rational) -> Value {
        if self.exact {
            Value::String(format_rational(q))
        } else {
            self.real(to_f64(q))
        }
    }

    pub fn point(&self, p: &[Rational]) -> Value {
        Value::Array(p.iter().map(|q| self.rational(q)).collect())
    }
}
