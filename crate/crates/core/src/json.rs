//! Canonical JSON serialization shared by every document type.
//!
//! Documents are rendered with keys sorted at every level, two-space
//! indentation, LF line endings and a single trailing newline.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

/// Renders `value` as a canonical document.
pub fn to_canonical_string<T: Serialize>(value: &T) -> String {
    // `Value` objects are BTreeMap-backed, which gives sorted keys.
    let tree = serde_json::to_value(value).expect("document types serialize to JSON");
    let mut out = serde_json::to_string_pretty(&tree).expect("JSON values always render");
    out.push('\n');
    out
}

/// Deserializes `value` into `T`, reporting the JSON path of the first
/// mismatch on failure.
pub(crate) fn from_value_with_path<T: DeserializeOwned>(
    value: Value,
) -> Result<T, (String, String)> {
    serde_path_to_error::deserialize(value).map_err(|err| {
        let path = err.path().to_string();
        (path, err.into_inner().to_string())
    })
}

/// Lists object keys present in `original` but absent from `known`.
///
/// `known` is the re-serialization of the typed value parsed from
/// `original`, so anything it lacks was ignored during parsing.
pub(crate) fn unknown_keys(original: &Value, known: &Value) -> Vec<String> {
    let mut out = Vec::new();
    collect_unknown(original, known, String::new(), &mut out);
    out
}

fn collect_unknown(original: &Value, known: &Value, path: String, out: &mut Vec<String>) {
    match (original, known) {
        (Value::Object(orig), Value::Object(kept)) => {
            for (key, child) in orig {
                let child_path = if path.is_empty() {
                    key.clone()
                } else {
                    format!("{path}.{key}")
                };
                match kept.get(key) {
                    Some(kept_child) => collect_unknown(child, kept_child, child_path, out),
                    // Optional fields serialized as absent are still known keys.
                    None if child.is_null() => {}
                    None => out.push(child_path),
                }
            }
        }
        (Value::Array(orig), Value::Array(kept)) => {
            for (i, (a, b)) in orig.iter().zip(kept).enumerate() {
                collect_unknown(a, b, format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_at_every_level() {
        let doc = to_canonical_string(&json!({"b": {"z": 1, "a": [ {"y": 1, "x": 2} ]}, "a": []}));
        assert_eq!(
            doc,
            "{\n  \"a\": [],\n  \"b\": {\n    \"a\": [\n      {\n        \"x\": 2,\n        \"y\": 1\n      }\n    ],\n    \"z\": 1\n  }\n}\n"
        );
    }

    #[test]
    fn unknown_keys_are_reported_with_paths() {
        let original = json!({"a": 1, "extra": 2, "list": [{"k": 1, "odd": true}]});
        let known = json!({"a": 1, "list": [{"k": 1}]});
        assert_eq!(
            unknown_keys(&original, &known),
            vec!["extra", "list[0].odd"]
        );
    }
}

/// A parsed document together with the non-fatal warnings raised while
/// reading it (currently: unknown keys).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed<T> {
    pub value: T,
    pub warnings: Vec<String>,
}
