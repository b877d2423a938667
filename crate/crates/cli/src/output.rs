//! Deterministic artifact writers: CSV with 17-significant-digit floats and
//! JSON summaries with sorted keys, so identical configurations produce
//! byte-identical files.

use serde_json::{Map, Value};
use std::fs;
use std::path::{Path, PathBuf};

/// Format a float with 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_csv(&self, name: &str, header: &str, rows: &[Vec<String>]) -> std::io::Result<()> {
        let mut text = String::with_capacity(rows.len() * 64 + header.len() + 1);
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        fs::write(self.path(name), text)
    }

    pub fn write_summary(&self, summary: &Map<String, Value>) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(&Value::Object(summary.clone()))
            .expect("summary serialization");
        fs::write(self.path("summary.json"), text + "\n")
    }
}

/// Builder for the summary object (serde_json maps sort keys, keeping the
/// output stable).
#[derive(Default)]
pub struct Summary {
    map: Map<String, Value>,
}

impl Summary {
    pub fn new(command: &str) -> Self {
        let mut s = Self::default();
        s.map
            .insert("command".into(), Value::String(command.into()));
        s
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.map.insert(
            key.into(),
            serde_json::Number::from_f64(value)
                .map(Value::Number)
                .unwrap_or(Value::Null),
        );
        self
    }

    pub fn int(&mut self, key: &str, value: usize) -> &mut Self {
        self.map.insert(key.into(), Value::Number(value.into()));
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.map.insert(key.into(), Value::Bool(value));
        self
    }

    pub fn text(&mut self, key: &str, value: &str) -> &mut Self {
        self.map.insert(key.into(), Value::String(value.into()));
        self
    }

    pub fn nums(&mut self, key: &str, values: &[f64]) -> &mut Self {
        let arr = values
            .iter()
            .map(|v| {
                serde_json::Number::from_f64(*v)
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            })
            .collect();
        self.map.insert(key.into(), Value::Array(arr));
        self
    }

    pub fn finish(self) -> Map<String, Value> {
        self.map
    }
}
