//! Deterministic report emission: JSON with sorted keys and floats rounded
//! to 6 decimals, so identical runs produce identical bytes.

use std::path::Path;

use serde_json::Value;

/// Round every float in the tree to 6 decimal places.
pub fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.as_i64().is_none() && n.as_u64().is_none() {
                    let rounded = (f * 1e6).round() / 1e6;
                    if let Some(num) = serde_json::Number::from_f64(rounded) {
                        *value = Value::Number(num);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// Serialize with sorted keys (the default map is ordered) and rounded
/// floats, ending with a newline.
pub fn to_json_bytes(value: &Value) -> Vec<u8> {
    let mut v = value.clone();
    round_floats(&mut v);
    let mut bytes = serde_json::to_vec_pretty(&v).expect("report serialization");
    bytes.push(b'\n');
    bytes
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), String> {
    std::fs::write(path, to_json_bytes(value))
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}
