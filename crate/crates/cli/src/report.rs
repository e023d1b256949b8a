//! Ordered key/value reports with text and JSON renderings.

use rmc_core::field::FieldElem;
use rmc_core::linalg::Mat;
use serde_json::{Map, Value};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    entries: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report::default();
        r.set("command", command);
        r
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|k| k.as_str())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.entries).expect("plain data");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        Ok(Report {
            entries: serde_json::from_str(text)?,
        })
    }

    /// One `key: value` line per entry; strings are printed bare, everything
    /// else as compact JSON.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let rendered = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(k);
            out.push_str(": ");
            out.push_str(&rendered);
            out.push('\n');
        }
        out
    }
}

pub fn elems(v: &[FieldElem]) -> Value {
    Value::from(v.iter().map(|a| a.to_int()).collect::<Vec<_>>())
}

/// Rows of integer-encoded entries.
pub fn matrix(x: &Mat) -> Value {
    Value::from(x.row_vecs().map(elems).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_keeps_order() {
        let mut r = Report::new("analyze");
        r.set("zeta", 1);
        r.set("alpha", "x");
        r.set("order", "1234567890123456789012345");
        r.set("nested", Value::from(vec![vec![1, 2], vec![3, 4]]));
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(
            back.keys().collect::<Vec<_>>(),
            ["command", "zeta", "alpha", "order", "nested"]
        );
        assert_eq!(r.to_text().lines().nth(4).unwrap(), "nested: [[1,2],[3,4]]");
    }
}
