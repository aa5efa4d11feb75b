//! Tensor serialization: a canonical JSON layout and a plain-text term listing.
//!
//! JSON: `{"dims": [x,y,z], "labels": {"x": [..], "y": [..], "z": [..]}, "terms": [[i,j,k,"num/den"], ..]}`
//! with terms sorted lexicographically and `labels` optional.
//!
//! Text: directive lines start with `#`; every other non-blank line is a term.
//! ```text
//! # dims 3 3 3
//! # labels x ["x0","x1","x2"]
//! 0 0 2 1/1
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::de::DeserializeOwned;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::tensor::{Labels, Rational, Tensor, Triple};

/// `num/den` in lowest terms with positive denominator.
pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `n`, `-n` or `n/d` with `d ≠ 0`.
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| format!("bad numerator in `{s}`"))?;
    let d = BigInt::from_str(d).map_err(|_| format!("bad denominator in `{s}`"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rational::new(n, d))
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn schema_error(message: impl Into<String>) -> Error {
    Error::Parse {
        line: 0,
        column: 0,
        message: message.into(),
    }
}

/// Deserializes any JSON document, mapping errors to [`Error::Parse`].
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(json_error)
}

fn labels_json(l: &Labels) -> String {
    let arr = |v: &[String]| serde_json::to_string(v).expect("strings serialize");
    format!(
        "{{\"x\": {}, \"y\": {}, \"z\": {}}}",
        arr(&l.x),
        arr(&l.y),
        arr(&l.z)
    )
}

/// Canonical JSON: one term per line, lexicographic order.
pub fn tensor_to_json(t: &Tensor) -> String {
    let [x, y, z] = t.dims();
    let mut s = format!("{{\n  \"dims\": [{x}, {y}, {z}],\n");
    if let Some(l) = t.labels() {
        let _ = writeln!(s, "  \"labels\": {},", labels_json(l));
    }
    s.push_str("  \"terms\": [");
    for (n, (tr, c)) in t.terms().enumerate() {
        s.push_str(if n == 0 { "\n" } else { ",\n" });
        let _ = write!(
            s,
            "    [{}, {}, {}, \"{}\"]",
            tr.i,
            tr.j,
            tr.k,
            rational_to_string(c)
        );
    }
    if !t.is_empty() {
        s.push_str("\n  ");
    }
    s.push_str("]\n}\n");
    s
}

pub fn tensor_from_json(text: &str) -> Result<Tensor> {
    let v: Value = serde_json::from_str(text).map_err(json_error)?;
    let obj = v
        .as_object()
        .ok_or_else(|| schema_error("tensor must be a JSON object"))?;
    let dims = obj
        .get("dims")
        .and_then(Value::as_array)
        .filter(|a| a.len() == 3)
        .ok_or_else(|| schema_error("`dims` must be an array of three integers"))?;
    let mut d = [0usize; 3];
    for (slot, v) in d.iter_mut().zip(dims) {
        *slot = v
            .as_u64()
            .ok_or_else(|| schema_error("`dims` entries must be nonnegative integers"))?
            as usize;
    }
    let terms = obj
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| schema_error("`terms` must be an array"))?;
    let mut parsed = Vec::with_capacity(terms.len());
    for (n, term) in terms.iter().enumerate() {
        let bad = || schema_error(format!("term {n}: expected [i, j, k, \"num/den\"]"));
        let arr = term.as_array().filter(|a| a.len() == 4).ok_or_else(bad)?;
        let idx = |v: &Value| v.as_u64().map(|u| u as usize).ok_or_else(bad);
        let coeff = match &arr[3] {
            Value::String(s) => {
                parse_rational(s).map_err(|m| schema_error(format!("term {n}: {m}")))?
            }
            Value::Number(num) if num.is_i64() => {
                Rational::from_integer(num.as_i64().unwrap().into())
            }
            _ => return Err(bad()),
        };
        parsed.push((
            Triple::new(idx(&arr[0])?, idx(&arr[1])?, idx(&arr[2])?),
            coeff,
        ));
    }
    let mut t = Tensor::new(d, parsed)?;
    if let Some(l) = obj.get("labels") {
        if !l.is_null() {
            let labels: Labels = serde_json::from_value(l.clone()).map_err(json_error)?;
            t = t.with_labels(labels)?;
        }
    }
    Ok(t)
}

/// Plain-text listing; round-trips with [`tensor_from_text`].
pub fn tensor_to_text(t: &Tensor) -> String {
    let [x, y, z] = t.dims();
    let mut s = format!("# dims {x} {y} {z}\n");
    if let Some(l) = t.labels() {
        for (axis, names) in [("x", &l.x), ("y", &l.y), ("z", &l.z)] {
            let _ = writeln!(
                s,
                "# labels {axis} {}",
                serde_json::to_string(names).expect("strings serialize")
            );
        }
    }
    for (tr, c) in t.terms() {
        let _ = writeln!(s, "{} {} {} {}", tr.i, tr.j, tr.k, rational_to_string(c));
    }
    s
}

pub fn tensor_from_text(text: &str) -> Result<Tensor> {
    let mut dims: Option<[usize; 3]> = None;
    let mut labels: [Option<Vec<String>>; 3] = Default::default();
    let mut terms = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let err = |column: usize, message: String| Error::Parse {
            line: line_no,
            column,
            message,
        };
        let indent = raw.len() - raw.trim_start().len();
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim_start();
            let col = indent + 1 + (line.len() - 1 - rest.len()) + 1;
            if let Some(d) = rest.strip_prefix("dims") {
                let nums: std::result::Result<Vec<usize>, _> =
                    d.split_whitespace().map(str::parse).collect();
                match nums {
                    Ok(v) if v.len() == 3 => dims = Some([v[0], v[1], v[2]]),
                    _ => return Err(err(col, "expected `# dims X Y Z`".into())),
                }
            } else if let Some(l) = rest.strip_prefix("labels") {
                let l = l.trim_start();
                let (axis, names) = l.split_at(l.find(char::is_whitespace).unwrap_or(l.len()));
                let slot = match axis {
                    "x" => 0,
                    "y" => 1,
                    "z" => 2,
                    _ => return Err(err(col, format!("unknown label axis `{axis}`"))),
                };
                let parsed: Vec<String> = serde_json::from_str(names.trim())
                    .map_err(|e| err(col, format!("bad label list: {e}")))?;
                labels[slot] = Some(parsed);
            }
            // Other comment lines are ignored.
            continue;
        }
        let mut fields = Vec::new();
        let mut pos = 0;
        for tok in raw.split_whitespace() {
            let start = raw[pos..].find(tok).expect("token from this line") + pos;
            fields.push((start + 1, tok));
            pos = start + tok.len();
        }
        if fields.len() != 4 {
            return Err(err(
                indent + 1,
                format!("expected `i j k num/den`, found {} fields", fields.len()),
            ));
        }
        let mut idx = [0usize; 3];
        for (slot, (col, tok)) in idx.iter_mut().zip(&fields) {
            *slot = tok
                .parse()
                .map_err(|_| err(*col, format!("`{tok}` is not a nonnegative integer")))?;
        }
        let (col, tok) = fields[3];
        let c = parse_rational(tok).map_err(|m| err(col, m))?;
        terms.push((Triple::from_array(idx), c));
    }
    let dims = dims.ok_or_else(|| Error::Parse {
        line: 1,
        column: 1,
        message: "missing `# dims X Y Z` directive".into(),
    })?;
    let mut t = Tensor::new(dims, terms)?;
    match labels {
        [Some(x), Some(y), Some(z)] => t = t.with_labels(Labels { x, y, z })?,
        [None, None, None] => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: "labels must be given for all three axes or none".into(),
            })
        }
    }
    Ok(t)
}

/// Reads either format, deciding by the first non-blank character.
pub fn tensor_from_any(text: &str) -> Result<Tensor> {
    if text.trim_start().starts_with('{') {
        tensor_from_json(text)
    } else {
        tensor_from_text(text)
    }
}
