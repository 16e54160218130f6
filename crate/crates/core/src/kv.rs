//! Plain-text `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are skipped. Keys are
//! case-sensitive; dashes and underscores in keys are interchangeable.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KvError {
    #[error("cannot read config {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, KvError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| KvError::Syntax { line: i + 1, text: raw.to_string() })?;
            if k.trim().is_empty() {
                return Err(KvError::Syntax { line: i + 1, text: raw.to_string() });
            }
            entries.insert(normalize(k), v.trim().to_string());
        }
        Ok(KeyValues { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self, KvError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| KvError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_dashes() {
        let kv = KeyValues::parse("# run\nmin-matches = 30\n\nseed=7\n").unwrap();
        assert_eq!(kv.get("min_matches"), Some("30"));
        assert_eq!(kv.get("seed"), Some("7"));
        assert_eq!(kv.get("out"), None);
    }

    #[test]
    fn rejects_lines_without_equals() {
        assert!(matches!(KeyValues::parse("seed 7"), Err(KvError::Syntax { line: 1, .. })));
    }
}
