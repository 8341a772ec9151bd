//! Scheme JSON round-tripping and shared float formatting.
//!
//! Floats are written with 17 significant decimal digits so that parsing the
//! document reproduces every coefficient bit-for-bit.

use serde_json::Value;

use crate::collocation::{CollocationScheme, NodeSet};
use crate::error::{Error, Result};
use crate::linalg::Mat;

/// 17-significant-digit decimal form; round-trips f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{x:.16e}")
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| fmt_f64(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_mat(m: &Mat) -> String {
    let rows: Vec<String> = (0..m.rows()).map(|i| fmt_vec(m.row(i))).collect();
    format!("[{}]", rows.join(", "))
}

/// Serializes a scheme to the interchange document
/// `{s, c[], A[][], B[][], b[], d[], step_order}`.
pub fn scheme_to_json(scheme: &CollocationScheme) -> String {
    format!(
        "{{\"s\": {}, \"c\": {}, \"A\": {}, \"B\": {}, \"b\": {}, \"d\": {}, \"step_order\": {}}}",
        scheme.s(),
        fmt_vec(scheme.node_slice()),
        fmt_mat(scheme.stage_weights()),
        fmt_mat(scheme.stage_deriv_weights()),
        fmt_vec(scheme.step_weights()),
        fmt_vec(scheme.step_deriv_weights()),
        scheme.step_order()
    )
}

fn parse_vec(value: &Value, key: &str) -> Result<Vec<f64>> {
    value
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::ParseError(format!("missing array '{key}'")))?
        .iter()
        .map(|v| {
            v.as_f64()
                .ok_or_else(|| Error::ParseError(format!("non-numeric entry in '{key}'")))
        })
        .collect()
}

fn parse_mat(value: &Value, key: &str, s: usize) -> Result<Mat> {
    let rows = value
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::ParseError(format!("missing matrix '{key}'")))?;
    if rows.len() != s {
        return Err(Error::ParseError(format!(
            "matrix '{key}' must have {s} rows"
        )));
    }
    let mut m = Mat::zeros(s, s);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::ParseError(format!("row {i} of '{key}' is not an array")))?;
        if row.len() != s {
            return Err(Error::ParseError(format!(
                "row {i} of '{key}' must have {s} entries"
            )));
        }
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = v
                .as_f64()
                .ok_or_else(|| Error::ParseError(format!("non-numeric entry in '{key}'")))?;
        }
    }
    Ok(m)
}

/// Parses a scheme document produced by [`scheme_to_json`]. Coefficients are
/// taken verbatim (no re-derivation), so a serialize/parse round-trip is
/// bitwise.
pub fn scheme_from_json(text: &str) -> Result<CollocationScheme> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))?;
    let s = value
        .get("s")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::ParseError("missing integer 's'".into()))? as usize;
    let c = parse_vec(&value, "c")?;
    if c.len() != s {
        return Err(Error::ParseError("'c' length disagrees with 's'".into()));
    }
    let a = parse_mat(&value, "A", s)?;
    let b_mat = parse_mat(&value, "B", s)?;
    let b = parse_vec(&value, "b")?;
    let d = parse_vec(&value, "d")?;
    if b.len() != s || d.len() != s {
        return Err(Error::ParseError(
            "'b'/'d' length disagrees with 's'".into(),
        ));
    }
    let step_order = value
        .get("step_order")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::ParseError("missing integer 'step_order'".into()))?
        as usize;
    CollocationScheme::from_parts(NodeSet::new(c)?, a, b_mat, b, d, step_order)
}
