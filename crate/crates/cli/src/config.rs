//! `key = value` overlay files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys may use `-` or
//! `_`. Unknown keys are rejected so that typos do not pass silently.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

pub const KEYS: &[&str] = &[
    "task",
    "mode",
    "k",
    "test_fraction",
    "seed",
    "averaging",
    "negatives",
    "c",
    "loss",
    "max_epochs",
    "tolerance",
    "eta0",
    "decay",
    "unknown_tokens",
    "subsample",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overlay {
    source: String,
    values: BTreeMap<String, (String, usize)>,
}

impl Overlay {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::input(format!("{source}:{line_no}: expected key = value")))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::input(format!(
                    "{source}:{line_no}: unknown key {key:?} (known: {})",
                    KEYS.join(", ")
                )));
            }
            values.insert(key, (value.trim().to_string(), line_no));
        }
        Ok(Self { source: source.to_string(), values })
    }

    pub fn get<T>(&self, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        debug_assert!(KEYS.contains(&key));
        match self.values.get(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::input(format!("{}:{line}: {key}: {e}", self.source))),
        }
    }

    /// `flag`, else the overlay value, else `default`.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }
}
