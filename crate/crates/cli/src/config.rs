//! Flat `key = value` settings files.
//!
//! Keys are the long flag names (`graphs-per-size`, `xi`, ...); underscores
//! are accepted in place of dashes. `#` starts a comment line.

use std::fmt;

#[derive(Debug, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

#[derive(Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ConfigError {}

pub fn parse(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError {
                line,
                msg: format!("expected `key = value`, got `{body}`"),
            });
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError {
                line,
                msg: "empty key".into(),
            });
        }
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            return Err(ConfigError {
                line,
                msg: format!("`{key}` already set on line {}", prev.line),
            });
        }
        entries.push(Entry { line, key, value });
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries() {
        let got = parse("# sweep\nsizes = 50,100\n\n  graphs_per_size=2  \nout = a b\n").unwrap();
        let keys: Vec<(&str, &str, usize)> = got.iter().map(|e| (e.key.as_str(), e.value.as_str(), e.line)).collect();
        assert_eq!(
            keys,
            vec![("sizes", "50,100", 2), ("graphs-per-size", "2", 4), ("out", "a b", 5)]
        );
    }

    #[test]
    fn errors() {
        assert_eq!(parse("xi 0.5").unwrap_err().line, 1);
        assert_eq!(parse("\n= 3").unwrap_err().line, 2);
        let dup = parse("xi = 1\nxi = 2").unwrap_err();
        assert_eq!(dup.line, 2);
        assert!(dup.msg.contains("line 1"));
    }
}
