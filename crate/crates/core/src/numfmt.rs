//! Fixed-precision number rendering for JSON and CSV output.
//!
//! Every `f64` is written with 17 significant digits in scientific notation,
//! which round-trips bit-exactly through any conforming parser.

use serde::ser::{Error as _, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

/// Renders a finite float with 17 significant digits, e.g. `5.0000000000000000e-1`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn raw(x: f64) -> Result<Box<RawValue>, String> {
    if !x.is_finite() {
        return Err(format!("cannot serialize non-finite value {x}"));
    }
    RawValue::from_string(format_f64(x)).map_err(|e| e.to_string())
}

pub fn serialize_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    raw(*x).map_err(S::Error::custom)?.serialize(s)
}

pub fn serialize_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize_f64(v, s),
        None => s.serialize_none(),
    }
}

pub fn serialize_f64_slice<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let raws = xs
        .iter()
        .map(|&x| raw(x))
        .collect::<Result<Vec<_>, _>>()
        .map_err(S::Error::custom)?;
    raws.serialize(s)
}

pub fn serialize_opt_f64_slice<S: Serializer>(
    xs: &[Option<f64>],
    s: S,
) -> Result<S::Ok, S::Error> {
    let raws = xs
        .iter()
        .map(|x| x.map(raw).transpose())
        .collect::<Result<Vec<_>, _>>()
        .map_err(S::Error::custom)?;
    raws.serialize(s)
}
