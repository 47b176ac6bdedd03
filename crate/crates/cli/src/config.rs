//! Optional run configuration file: flat `key=value` lines (with `#`
//! comments) or a single JSON object. Command-line flags override file
//! values; file values override built-in defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let trimmed = text.trim_start();
        let mut values = BTreeMap::new();
        if trimmed.starts_with('{') {
            let json: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("config is not valid JSON: {e}")))?;
            let obj = json
                .as_object()
                .ok_or_else(|| CliError::usage("config JSON must be an object"))?;
            for (k, v) in obj {
                let s = match v {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Array(items) => items
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                    other => other.to_string(),
                };
                values.insert(k.to_ascii_lowercase(), s);
            }
        } else {
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    CliError::usage(format!(
                        "config line {} is not `key=value`: `{line}`",
                        lineno + 1
                    ))
                })?;
                values.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
            }
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn get_parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::usage(format!("config key `{key}`: bad value `{raw}`"))),
        }
    }
}
