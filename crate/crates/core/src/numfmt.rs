//! Number rendering shared by the CSV and JSON writers.
//!
//! Floats are printed in the shortest form that parses back to the same
//! value; integral values below `2^53` print without a fractional part.

use serde::Serialize;
use serde_json::{Number, Value};

const EXACT_INT_LIMIT: f64 = 9_007_199_254_740_992.0;

fn as_exact_int(x: f64) -> Option<i64> {
    (x.fract() == 0.0 && x.abs() < EXACT_INT_LIMIT).then_some(x as i64)
}

/// Shortest round-trip text for `x`.
pub fn fmt_num(x: f64) -> String {
    match as_exact_int(x) {
        Some(i) => i.to_string(),
        None => x.to_string(),
    }
}

/// Rewrites integral floats in `v` as JSON integers.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => match n.as_f64().and_then(as_exact_int) {
            Some(i) => Value::Number(Number::from(i)),
            None => Value::Number(n),
        },
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// Compact JSON for `value` with normalized numbers.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("value serializes to JSON");
    normalize(v).to_string()
}
