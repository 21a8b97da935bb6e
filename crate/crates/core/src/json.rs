//! JSON codecs for the domain objects.
//!
//! Conventions shared by every payload: rationals are `"p/q"` strings with
//! the denominator omitted when it is 1, complex floats are `"re+imi"`
//! strings, digit vectors are integer arrays least significant digit first,
//! and sparse operators are column-major triplet arrays. Decoding is strict
//! and every rejection names the offending field.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::cylinder::{CylFn, Domain};
use crate::error::{Error, Result};
use crate::khomology::{HomT, TIndex};
use crate::operators::{ToeplitzSymbol, TruncOp, Window};
use crate::scalar::{Complex64, Rat, Scalar};

fn as_object<'a>(value: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::schema(format!("{what}: expected a JSON object")))
}

fn field<'a>(obj: &'a Map<String, Value>, name: &str) -> Result<&'a Value> {
    obj.get(name)
        .ok_or_else(|| Error::schema(format!("missing field {name:?}")))
}

fn as_array<'a>(value: &'a Value, name: &str) -> Result<&'a Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| Error::schema(format!("field {name:?}: expected an array")))
}

fn as_str<'a>(value: &'a Value, name: &str) -> Result<&'a str> {
    value
        .as_str()
        .ok_or_else(|| Error::schema(format!("field {name:?}: expected a string")))
}

fn as_i64(value: &Value, name: &str) -> Result<i64> {
    value
        .as_i64()
        .ok_or_else(|| Error::schema(format!("field {name:?}: expected an integer")))
}

fn as_u64(value: &Value, name: &str) -> Result<u64> {
    value
        .as_u64()
        .ok_or_else(|| Error::schema(format!("field {name:?}: expected a nonnegative integer")))
}

fn as_u32(value: &Value, name: &str) -> Result<u32> {
    let raw = as_u64(value, name)?;
    u32::try_from(raw)
        .map_err(|_| Error::schema(format!("field {name:?}: value {raw} is out of range")))
}

fn scalar_from<S: Scalar>(value: &Value, name: &str) -> Result<S> {
    let text = as_str(value, name)?;
    S::parse_value(text).map_err(|e| Error::schema(format!("field {name:?}: {e}")))
}

fn check_ring(obj: &Map<String, Value>, expected: &str) -> Result<()> {
    let ring = as_str(field(obj, "ring")?, "ring")?;
    if ring != expected {
        return Err(Error::schema(format!(
            "field \"ring\": expected {expected:?}, found {ring:?}"
        )));
    }
    Ok(())
}

/// `{"s": .., "digits": [..]}`, least significant digit first.
pub fn sadic_to_json(x: &crate::sadic::SAdic) -> Value {
    json!({ "s": x.base(), "digits": x.digits() })
}

pub fn sadic_from_json(value: &Value) -> Result<crate::sadic::SAdic> {
    let obj = as_object(value, "SAdic")?;
    let s = as_u32(field(obj, "s")?, "s")?;
    let raw = as_array(field(obj, "digits")?, "digits")?;
    let digits = raw
        .iter()
        .enumerate()
        .map(|(i, d)| as_u32(d, &format!("digits[{i}]")))
        .collect::<Result<Vec<u32>>>()?;
    crate::sadic::SAdic::new(s, digits)
}

/// `{"s", "level", "domain": "full"|"units", "ring", "values": [..]}`.
pub fn cylfn_to_json<S: Scalar>(f: &CylFn<S>) -> Value {
    let domain = match f.domain() {
        Domain::Full => "full",
        Domain::Units => "units",
    };
    let values: Vec<String> = f.values().iter().map(Scalar::format_value).collect();
    json!({
        "s": f.s(),
        "level": f.level(),
        "domain": domain,
        "ring": S::RING_TAG,
        "values": values,
    })
}

pub fn cylfn_from_json<S: Scalar>(value: &Value) -> Result<CylFn<S>> {
    let obj = as_object(value, "CylFn")?;
    check_ring(obj, S::RING_TAG)?;
    cylfn_body(obj)
}

fn cylfn_body<S: Scalar>(obj: &Map<String, Value>) -> Result<CylFn<S>> {
    let s = as_u32(field(obj, "s")?, "s")?;
    let level = as_u32(field(obj, "level")?, "level")?;
    let domain = match as_str(field(obj, "domain")?, "domain")? {
        "full" => Domain::Full,
        "units" => Domain::Units,
        other => {
            return Err(Error::schema(format!(
                "field \"domain\": expected \"full\" or \"units\", found {other:?}"
            )))
        }
    };
    let raw = as_array(field(obj, "values")?, "values")?;
    let values = raw
        .iter()
        .enumerate()
        .map(|(i, v)| scalar_from::<S>(v, &format!("values[{i}]")))
        .collect::<Result<Vec<S>>>()?;
    CylFn::new(s, level, domain, values)
}

/// A cylinder function decoded by its `"ring"` tag.
#[derive(Debug, Clone, PartialEq)]
pub enum DynCylFn {
    Int(CylFn<i64>),
    Rat(CylFn<Rat>),
    CFloat(CylFn<Complex64>),
}

impl DynCylFn {
    pub fn to_json(&self) -> Value {
        match self {
            DynCylFn::Int(f) => cylfn_to_json(f),
            DynCylFn::Rat(f) => cylfn_to_json(f),
            DynCylFn::CFloat(f) => cylfn_to_json(f),
        }
    }
}

pub fn dyn_cylfn_from_json(value: &Value) -> Result<DynCylFn> {
    let obj = as_object(value, "CylFn")?;
    match as_str(field(obj, "ring")?, "ring")? {
        "int" => Ok(DynCylFn::Int(cylfn_body(obj)?)),
        "rat" => Ok(DynCylFn::Rat(cylfn_body(obj)?)),
        "cfloat" => Ok(DynCylFn::CFloat(cylfn_body(obj)?)),
        other => Err(Error::schema(format!(
            "field \"ring\": expected \"int\", \"rat\" or \"cfloat\", found {other:?}"
        ))),
    }
}

/// `{"s", "coeffs": [{"y", "phi"}, ..]}`, sorted by `y`.
pub fn homt_to_json(phi: &HomT) -> Value {
    let coeffs: Vec<Value> = phi
        .coeffs()
        .iter()
        .map(|(y, c)| json!({ "y": y, "phi": c }))
        .collect();
    json!({ "s": phi.s(), "coeffs": coeffs })
}

pub fn homt_from_json(value: &Value) -> Result<HomT> {
    let obj = as_object(value, "HomT")?;
    let s = as_u32(field(obj, "s")?, "s")?;
    let raw = as_array(field(obj, "coeffs")?, "coeffs")?;
    let mut coeffs = BTreeMap::new();
    for (i, item) in raw.iter().enumerate() {
        let entry = as_object(item, &format!("coeffs[{i}]"))?;
        let y = as_u64(field(entry, "y")?, &format!("coeffs[{i}].y"))?;
        let phi = as_i64(field(entry, "phi")?, &format!("coeffs[{i}].phi"))?;
        if let Err(e) = TIndex::new(y, s) {
            return Err(Error::schema(format!("field \"coeffs[{i}].y\": {e}")));
        }
        if phi == 0 {
            return Err(Error::schema(format!(
                "field \"coeffs[{i}].phi\": zero coefficients must be omitted"
            )));
        }
        if coeffs.insert(y, phi).is_some() {
            return Err(Error::schema(format!(
                "field \"coeffs[{i}].y\": duplicate index {y}"
            )));
        }
    }
    HomT::new(s, coeffs)
}

/// `{"ring", "coeffs": [{"m", "value"}, ..]}`, sorted by `m`.
pub fn toeplitz_to_json<S: Scalar>(symbol: &ToeplitzSymbol<S>) -> Value {
    let coeffs: Vec<Value> = symbol
        .coeffs()
        .iter()
        .map(|(m, v)| json!({ "m": m, "value": v.format_value() }))
        .collect();
    json!({ "ring": S::RING_TAG, "coeffs": coeffs })
}

pub fn toeplitz_from_json<S: Scalar>(value: &Value) -> Result<ToeplitzSymbol<S>> {
    let obj = as_object(value, "ToeplitzSymbol")?;
    check_ring(obj, S::RING_TAG)?;
    let raw = as_array(field(obj, "coeffs")?, "coeffs")?;
    let mut coeffs = BTreeMap::new();
    for (i, item) in raw.iter().enumerate() {
        let entry = as_object(item, &format!("coeffs[{i}]"))?;
        let m = as_i64(field(entry, "m")?, &format!("coeffs[{i}].m"))?;
        let v = scalar_from::<S>(field(entry, "value")?, &format!("coeffs[{i}].value"))?;
        if coeffs.insert(m, v).is_some() {
            return Err(Error::schema(format!(
                "field \"coeffs[{i}].m\": duplicate frequency {m}"
            )));
        }
    }
    Ok(ToeplitzSymbol::new(coeffs))
}

/// `{"ring", "window", "rows", "cols", "vals", "safe"}` with parallel
/// column-major triplet arrays.
pub fn truncop_to_json<S: Scalar>(op: &TruncOp<S>) -> Value {
    let entries = op.entries();
    let rows: Vec<i64> = entries.iter().map(|e| e.0).collect();
    let cols: Vec<i64> = entries.iter().map(|e| e.1).collect();
    let vals: Vec<String> = entries.iter().map(|e| e.2.format_value()).collect();
    let safe: Vec<i64> = op.safe_cols().iter().copied().collect();
    json!({
        "ring": S::RING_TAG,
        "window": op.window().radius(),
        "rows": rows,
        "cols": cols,
        "vals": vals,
        "safe": safe,
    })
}

pub fn truncop_from_json<S: Scalar>(value: &Value) -> Result<TruncOp<S>> {
    let obj = as_object(value, "TruncOp")?;
    check_ring(obj, S::RING_TAG)?;
    let radius = as_i64(field(obj, "window")?, "window")?;
    let window = Window::new(radius)?;
    let rows = as_array(field(obj, "rows")?, "rows")?;
    let cols = as_array(field(obj, "cols")?, "cols")?;
    let vals = as_array(field(obj, "vals")?, "vals")?;
    if rows.len() != cols.len() || rows.len() != vals.len() {
        return Err(Error::schema(format!(
            "field \"vals\": triplet arrays disagree in length ({} rows, {} cols, {} vals)",
            rows.len(),
            cols.len(),
            vals.len()
        )));
    }
    let mut entries = Vec::with_capacity(rows.len());
    for i in 0..rows.len() {
        let row = as_i64(&rows[i], &format!("rows[{i}]"))?;
        let col = as_i64(&cols[i], &format!("cols[{i}]"))?;
        let val = scalar_from::<S>(&vals[i], &format!("vals[{i}]"))?;
        entries.push((row, col, val));
    }
    let raw_safe = as_array(field(obj, "safe")?, "safe")?;
    let safe = raw_safe
        .iter()
        .enumerate()
        .map(|(i, l)| as_i64(l, &format!("safe[{i}]")))
        .collect::<Result<Vec<i64>>>()?;
    TruncOp::from_parts(window, entries, safe)
}

/// Parse a JSON document and decode it in one step.
pub fn parse_document(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::schema(format!("malformed JSON: {e}")))
}
