//! Line-oriented `key=value` configuration files.
//!
//! Keys are the long flag names without the leading dashes; `-` and `_` are
//! interchangeable. Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;

pub const KEYS: [&str; 11] = [
    "ell",
    "n",
    "k",
    "method",
    "ell-range",
    "n-range",
    "checks",
    "precision-bits",
    "format",
    "out",
    "parallelism",
];

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key {key:?}", i + 1));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// A flag value wins over the file; the file wins over the default.
    pub fn pick(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.get(key).map(str::to_string))
    }
}
