//! Flat `key=value` text files used for run configuration and persisted
//! hyperparameters.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use crate::error::DataError;

/// Parsed `key=value` pairs. Blank lines and `#` comments are skipped; a
/// later key overrides an earlier one.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvMap {
    entries: BTreeMap<String, (usize, String)>,
}

impl KvMap {
    pub fn parse(text: &str) -> Result<Self, DataError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(DataError::BadConfig {
                    line: i + 1,
                    reason: format!("expected key=value, got {line:?}"),
                });
            };
            let key = k.trim();
            if key.is_empty() {
                return Err(DataError::BadConfig {
                    line: i + 1,
                    reason: "empty key".into(),
                });
            }
            entries.insert(key.to_string(), (i + 1, v.trim().to_string()));
        }
        Ok(Self { entries })
    }

    pub fn insert(&mut self, key: &str, value: impl Display) {
        self.entries.insert(key.to_string(), (0, value.to_string()));
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    /// Parses `key` as `T` if present.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, DataError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((line, v)) => v.parse::<T>().map(Some).map_err(|_| DataError::BadConfig {
                line: *line,
                reason: format!("cannot parse value {v:?} for key {key}"),
            }),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, (_, v)) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}
