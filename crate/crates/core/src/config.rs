//! Minimal `key = value` configuration format.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Keys are snake_case; lists are comma separated. Every error carries the
//! line number it was found on.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::ConfigLine {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
                return Err(Error::ConfigLine { line, message: format!("invalid key `{key}`") });
            }
            if value.is_empty() {
                return Err(Error::ConfigLine { line, message: format!("empty value for `{key}`") });
            }
            if entries.insert(key.to_string(), (value.to_string(), line)).is_some() {
                return Err(Error::ConfigLine { line, message: format!("duplicate key `{key}`") });
            }
        }
        Ok(Self { entries })
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), (value.into(), 0));
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map(|(_, l)| *l).unwrap_or(0)
    }

    /// Error located at the line of `key` (line 0 means "set programmatically").
    pub fn error(&self, key: &str, message: impl Into<String>) -> Error {
        let message = message.into();
        match self.line_of(key) {
            0 => Error::Config(format!("{key}: {message}")),
            line => Error::ConfigLine { line, message: format!("{key}: {message}") },
        }
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key)
            .map(|v| parse_f64(v).map_err(|m| self.error(key, m)))
            .transpose()
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.raw(key)
            .map(|v| v.parse::<usize>().map_err(|_| self.error(key, format!("expected a non-negative integer, found `{v}`"))))
            .transpose()
    }

    pub fn list(&self, key: &str) -> Option<Vec<String>> {
        self.raw(key).map(|v| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
    }

    pub fn usize_list(&self, key: &str) -> Result<Option<Vec<usize>>> {
        match self.list(key) {
            None => Ok(None),
            Some(items) => items
                .iter()
                .map(|s| s.parse::<usize>().map_err(|_| self.error(key, format!("expected integers, found `{s}`"))))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    /// Canonical text: sorted keys, one `key = value` per line.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (k, (v, _)) in &self.entries {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

pub fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("expected a number, found `{s}`"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a finite number, found `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_lists() {
        let m = ConfigMap::parse("# head\npreset = xy  # inline\n\nn_sites = 8, 10\n").unwrap();
        assert_eq!(m.raw("preset"), Some("xy"));
        assert_eq!(m.usize_list("n_sites").unwrap(), Some(vec![8, 10]));
        assert_eq!(m.line_of("n_sites"), 4);
    }

    #[test]
    fn reports_line_numbers() {
        let err = ConfigMap::parse("a = 1\nbogus line\n").unwrap_err();
        assert_eq!(err, Error::ConfigLine { line: 2, message: "expected `key = value`, found `bogus line`".into() });
        let m = ConfigMap::parse("h = 1\nhx = x\n").unwrap();
        assert!(matches!(m.f64("hx"), Err(Error::ConfigLine { line: 2, .. })));
        assert!(matches!(ConfigMap::parse("a = 1\na = 2"), Err(Error::ConfigLine { line: 2, .. })));
    }
}
