//! Flat key=value configuration: an optional file of `key=value` lines merged
//! with command-line `key=value` overrides (command line wins). Unknown keys
//! are rejected up front so a typo cannot silently fall back to a default.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

pub struct KvConfig {
    entries: BTreeMap<String, String>,
}

/// Parses one `key=value` token. Whitespace around key and value is trimmed;
/// the value may contain further `=` characters.
pub fn parse_pair(token: &str) -> Result<(String, String), String> {
    match token.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().into(), v.trim().into())),
        _ => Err(format!("expected key=value, got `{token}`")),
    }
}

impl KvConfig {
    /// Loads `path` (when given), applies `overrides` on top, and rejects any
    /// key not in `allowed`. File syntax: one `key=value` per line, blank
    /// lines and `#` comments ignored; parse errors carry the line number.
    pub fn load(
        path: Option<&Path>,
        overrides: &[(String, String)],
        allowed: &[&str],
    ) -> Result<KvConfig, String> {
        let mut entries = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = parse_pair(line)
                    .map_err(|e| format!("{}:{}: {e}", path.display(), lineno + 1))?;
                entries.insert(k, v);
            }
        }
        for (k, v) in overrides {
            entries.insert(k.clone(), v.clone());
        }
        for key in entries.keys() {
            if !allowed.contains(&key.as_str()) {
                let mut msg = format!("unknown key `{key}`; valid keys:");
                for a in allowed {
                    let _ = write!(msg, " {a}");
                }
                return Err(msg);
            }
        }
        Ok(KvConfig { entries })
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).unwrap_or(default)
    }

    pub fn require(&self, key: &str) -> Result<&str, String> {
        self.get(key)
            .ok_or_else(|| format!("missing required key `{key}`"))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, String> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| format!("key `{key}`: `{v}` is not a number")),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, String> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| format!("key `{key}`: `{v}` is not a nonnegative integer")),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, String> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| format!("key `{key}`: `{v}` is not a nonnegative integer")),
        }
    }

    /// Comma-separated list of numbers for sweep keys; a single value is a
    /// one-element sweep.
    pub fn f64_list(&self, key: &str, required: bool) -> Result<Vec<f64>, String> {
        let Some(raw) = self.get(key) else {
            return if required {
                Err(format!("missing required key `{key}`"))
            } else {
                Ok(Vec::new())
            };
        };
        raw.split(',')
            .map(|tok| {
                tok.trim()
                    .parse()
                    .map_err(|_| format!("key `{key}`: `{tok}` is not a number"))
            })
            .collect()
    }
}
