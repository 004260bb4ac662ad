//! Flat key = value configuration files with one section per experiment.
//! Keys outside any section apply to every command.

use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Default)]
pub struct Config {
    /// (section, key) -> value; global keys use an empty section name.
    entries: BTreeMap<(String, String), String>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

impl Config {
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(idx) => &raw[..idx],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(ConfigError(format!(
                        "line {}: unterminated section header",
                        lineno + 1
                    )));
                }
                section = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let Some(eq) = line.find('=') else {
                return Err(ConfigError(format!(
                    "line {}: expected key = value, got {line:?}",
                    lineno + 1
                )));
            };
            let key = line[..eq].trim().to_string();
            let value = line[eq + 1..].trim().to_string();
            if key.is_empty() {
                return Err(ConfigError(format!("line {}: empty key", lineno + 1)));
            }
            entries.insert((section.clone(), key), value);
        }
        Ok(Config { entries })
    }

    /// Raw lookup: the command's section first, then the global section.
    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.entries
            .get(&(section.to_string(), key.to_string()))
            .or_else(|| self.entries.get(&(String::new(), key.to_string())))
            .map(|s| s.as_str())
    }

    /// Keys present for a section (including globals), for typo detection.
    pub fn keys_for(&self, section: &str) -> Vec<String> {
        self.entries
            .keys()
            .filter(|(s, _)| s == section || s.is_empty())
            .map(|(_, k)| k.clone())
            .collect()
    }
}

/// Typed accessor that records every value it hands out (explicit or
/// defaulted) so the metadata file can echo the complete parameter set.
pub struct Params<'a> {
    config: &'a Config,
    section: &'a str,
    used: std::cell::RefCell<BTreeMap<String, String>>,
    consumed: std::cell::RefCell<Vec<String>>,
}

impl<'a> Params<'a> {
    pub fn new(config: &'a Config, section: &'a str) -> Self {
        Params {
            config,
            section,
            used: Default::default(),
            consumed: Default::default(),
        }
    }

    fn record(&self, key: &str, value: String) {
        self.used.borrow_mut().insert(key.to_string(), value);
        self.consumed.borrow_mut().push(key.to_string());
    }

    pub fn get_f64(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        let v = match self.config.raw(self.section, key) {
            Some(s) => s
                .parse::<f64>()
                .map_err(|_| ConfigError(format!("key {key}: expected a number, got {s:?}")))?,
            None => default,
        };
        self.record(key, format!("{v}"));
        Ok(v)
    }

    pub fn get_usize(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        let v = match self.config.raw(self.section, key) {
            Some(s) => s
                .parse::<usize>()
                .map_err(|_| ConfigError(format!("key {key}: expected an integer, got {s:?}")))?,
            None => default,
        };
        self.record(key, format!("{v}"));
        Ok(v)
    }

    pub fn get_bool(&self, key: &str, default: bool) -> Result<bool, ConfigError> {
        let v = match self.config.raw(self.section, key) {
            Some(s) => match s {
                "true" | "1" | "yes" => true,
                "false" | "0" | "no" => false,
                other => {
                    return Err(ConfigError(format!(
                        "key {key}: expected true/false, got {other:?}"
                    )))
                }
            },
            None => default,
        };
        self.record(key, format!("{v}"));
        Ok(v)
    }

    pub fn get_str(&self, key: &str, default: &str) -> String {
        let v = self
            .config
            .raw(self.section, key)
            .unwrap_or(default)
            .to_string();
        self.record(key, v.clone());
        v
    }

    /// Comma-separated list of numbers.
    pub fn get_f64_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        let v = match self.config.raw(self.section, key) {
            Some(s) => s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| ConfigError(format!("key {key}: bad number {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => default.to_vec(),
        };
        self.record(
            key,
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        Ok(v)
    }

    /// Fails on unrecognized keys in the section so typos surface early.
    pub fn reject_unknown(&self) -> Result<(), ConfigError> {
        let consumed = self.consumed.borrow();
        for key in self.config.keys_for(self.section) {
            if !consumed.iter().any(|k| k == &key) {
                return Err(ConfigError(format!(
                    "unknown key {key:?} for command {:?}",
                    self.section
                )));
            }
        }
        Ok(())
    }

    /// All parameters handed out, as deterministic metadata lines.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.used.borrow().iter() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}
