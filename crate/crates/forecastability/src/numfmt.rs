//! Deterministic numeric formatting for emitted files: floats are
//! fixed at 9 significant digits so outputs are stable golden files.

/// CSV rendering: 9 significant digits; non-finite values (gaps,
/// undefined statistics) render as empty cells.
pub(crate) fn sig9(v: f64) -> String {
    if !v.is_finite() {
        return String::new();
    }
    format!("{v:.8e}")
}

/// Rounds to 9 significant digits for JSON emission.
pub(crate) fn round_sig9(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.8e}").parse().expect("formatted float reparses")
}

/// Rounds every fractional number in a JSON tree; integers are kept
/// verbatim.
pub(crate) fn round_json(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if !n.is_i64() && !n.is_u64() {
                if let Some(f) = n.as_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig9(f)) {
                        *n = rounded;
                    }
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Serializes with rounded floats, pretty-printed, trailing newline.
pub(crate) fn to_json_string<T: serde::Serialize>(value: &T) -> crate::error::Result<String> {
    let mut tree = serde_json::to_value(value)
        .map_err(|e| crate::error::Error::InvalidConfig(format!("serialization failed: {e}")))?;
    round_json(&mut tree);
    let mut out = serde_json::to_string_pretty(&tree)
        .map_err(|e| crate::error::Error::InvalidConfig(format!("serialization failed: {e}")))?;
    out.push('\n');
    Ok(out)
}
