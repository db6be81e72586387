//! Flat key-value configuration files with `[section]` headers.
//!
//! Grammar, line by line: blank lines and lines starting with `#` are
//! ignored; `[name]` opens a section; `key = value` adds an entry to
//! the current section. Values run to the end of the line (no inline
//! comments), so they may contain any character. Keys are unique
//! within a section and must appear after a section header. Every
//! parse or lookup error carries the offending line number.

use crate::error::{Error, Result};

/// One `key = value` line.
#[derive(Clone, Debug)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// A `[name]` block and its entries.
#[derive(Clone, Debug)]
pub struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

/// A parsed configuration file.
#[derive(Clone, Debug)]
pub struct ConfigFile {
    sections: Vec<Section>,
}

fn config_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::config_at(line, msg.to_string())
}

impl ConfigFile {
    /// Parse the full text of a config file.
    pub fn parse(text: &str) -> Result<ConfigFile> {
        let mut sections: Vec<Section> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[') {
                let name = inner.strip_suffix(']').ok_or_else(|| {
                    config_err(line_no, format!("malformed section header `{line}`"))
                })?;
                let name = name.trim();
                if name.is_empty() {
                    return Err(config_err(line_no, "empty section name"));
                }
                if sections.iter().any(|s| s.name == name) {
                    return Err(config_err(line_no, format!("duplicate section `[{name}]`")));
                }
                sections.push(Section {
                    name: name.to_string(),
                    line: line_no,
                    entries: Vec::new(),
                });
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_err(
                    line_no,
                    format!("expected `key = value` or `[section]`, got `{line}`"),
                ));
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(config_err(line_no, "empty key"));
            }
            if value.is_empty() {
                return Err(config_err(line_no, format!("key `{key}` has no value")));
            }
            let Some(section) = sections.last_mut() else {
                return Err(config_err(
                    line_no,
                    format!("key `{key}` appears before any [section] header"),
                ));
            };
            if section.entries.iter().any(|e| e.key == key) {
                return Err(config_err(
                    line_no,
                    format!("duplicate key `{key}` in section `[{}]`", section.name),
                ));
            }
            section.entries.push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                line: line_no,
            });
        }
        Ok(ConfigFile { sections })
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn require_section(&self, name: &str) -> Result<&Section> {
        self.section(name)
            .ok_or_else(|| Error::config(format!("missing required section `[{name}]`")))
    }

    /// Reject sections outside the allowed set, naming the first
    /// offender and its line.
    pub fn check_sections(&self, allowed: &[&str]) -> Result<()> {
        for s in &self.sections {
            if !allowed.contains(&s.name.as_str()) {
                return Err(config_err(
                    s.line,
                    format!(
                        "unknown section `[{}]`; expected one of: {}",
                        s.name,
                        allowed.join(", ")
                    ),
                ));
            }
        }
        Ok(())
    }
}

impl Section {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn line(&self) -> usize {
        self.line
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn require(&self, key: &str) -> Result<&Entry> {
        self.get(key).ok_or_else(|| {
            Error::config_at(
                self.line,
                format!(
                    "section `[{}]` is missing the required key `{key}`",
                    self.name
                ),
            )
        })
    }

    /// Reject keys outside the allowed set, naming the first offender
    /// and its line.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for e in &self.entries {
            if !allowed.contains(&e.key.as_str()) {
                return Err(config_err(
                    e.line,
                    format!(
                        "unknown key `{}` in section `[{}]`; expected one of: {}",
                        e.key,
                        self.name,
                        allowed.join(", ")
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        let e = self.require(key)?;
        parse_f64(e)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            Some(e) => parse_f64(e),
            None => Ok(default),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let e = self.require(key)?;
        e.value.parse::<usize>().map_err(|_| {
            config_err(
                e.line,
                format!(
                    "key `{key}`: expected a nonnegative integer, got `{}`",
                    e.value
                ),
            )
        })
    }

    pub fn i64(&self, key: &str) -> Result<i64> {
        let e = self.require(key)?;
        e.value.parse::<i64>().map_err(|_| {
            config_err(
                e.line,
                format!("key `{key}`: expected an integer, got `{}`", e.value),
            )
        })
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        Ok(self.require(key)?.value.as_str())
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.get(key).map_or(default, |e| e.value.as_str())
    }

    /// Comma-separated list of reals.
    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let e = self.require(key)?;
        e.value
            .split(',')
            .map(|part| {
                let part = part.trim();
                part.parse::<f64>().map_err(|_| {
                    config_err(
                        e.line,
                        format!("key `{key}`: `{part}` is not a real number"),
                    )
                })
            })
            .collect()
    }

    /// Comma-separated list of identifiers.
    pub fn str_list(&self, key: &str) -> Result<Vec<String>> {
        let e = self.require(key)?;
        let items: Vec<String> = e
            .value
            .split(',')
            .map(|part| part.trim().to_string())
            .collect();
        if items.iter().any(String::is_empty) {
            return Err(config_err(
                e.line,
                format!("key `{key}`: empty item in list `{}`", e.value),
            ));
        }
        Ok(items)
    }
}

fn parse_f64(e: &Entry) -> Result<f64> {
    let v: f64 = e.value.parse().map_err(|_| {
        config_err(
            e.line,
            format!("key `{}`: `{}` is not a real number", e.key, e.value),
        )
    })?;
    if !v.is_finite() {
        return Err(config_err(
            e.line,
            format!("key `{}`: value must be finite, got `{}`", e.key, e.value),
        ));
    }
    Ok(v)
}
