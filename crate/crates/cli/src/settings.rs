//! Run settings from flags and an optional `key = value` file.
//!
//! Keys are flag names without the leading dashes (`gamma-min = 0.5`;
//! underscores are accepted for dashes). Blank lines and lines starting with
//! `#` are ignored. A flag given on the command line overrides the file.
//!
//! Every resolved value is recorded in resolution order, so the run manifest
//! written from them is itself a valid settings file.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Manifest keys that describe a run rather than configure it.
pub(crate) const META_PREFIX: &str = "meta.";

#[derive(Debug, Default)]
pub struct Settings {
    origin: String,
    entries: BTreeMap<String, (String, usize)>,
    used: BTreeSet<String>,
    resolved: Vec<(String, String)>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl Settings {
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("{origin}:{}: expected `key = value`", i + 1))
            })?;
            let key = normalize(key);
            if key.is_empty() {
                return Err(CliError::Config(format!("{origin}:{}: empty key", i + 1)));
            }
            if key.starts_with(META_PREFIX) {
                continue;
            }
            if let Some((_, first)) = entries.insert(key.clone(), (value.trim().to_string(), i + 1))
            {
                return Err(CliError::Config(format!(
                    "{origin}:{}: {key} already set on line {first}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            origin: origin.to_string(),
            entries,
            ..Self::default()
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Rejects a file written for a different subcommand.
    pub fn expect_command(&mut self, name: &str) -> CliResult<()> {
        if let Some((value, line)) = self.entries.get("command") {
            if value != name {
                return Err(CliError::Config(format!(
                    "{}:{line}: settings are for `{value}`, not `{name}`",
                    self.origin
                )));
            }
            self.used.insert("command".into());
        }
        Ok(())
    }

    fn file_value<T>(&mut self, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        let Some((value, line)) = self.entries.get(key) else {
            return Ok(None);
        };
        self.used.insert(key.to_string());
        value.parse().map(Some).map_err(|e| {
            CliError::Config(format!(
                "{}:{line}: invalid {key} {value:?}: {e}",
                self.origin
            ))
        })
    }

    /// The flag if given, else the file value, else `default`.
    pub fn resolve<T>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = self.resolve_opt(key, flag)?.unwrap_or(default);
        self.record(key, &value);
        Ok(value)
    }

    /// Like [`Settings::resolve`] for a setting with no default. Only a
    /// present value is recorded.
    pub fn resolve_opt<T>(&mut self, key: &str, flag: Option<T>) -> CliResult<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let file = self.file_value(key)?;
        let value = flag.or(file);
        if let Some(v) = &value {
            self.record(key, v);
        }
        Ok(value)
    }

    fn record(&mut self, key: &str, value: &impl Display) {
        if !self.resolved.iter().any(|(k, _)| k == key) {
            self.resolved.push((key.to_string(), value.to_string()));
        }
    }

    /// The resolved parameters, failing on file keys nothing asked for.
    pub fn finish(self) -> CliResult<Vec<(String, String)>> {
        let unknown: Vec<String> = self
            .entries
            .iter()
            .filter(|(k, _)| !self.used.contains(*k))
            .map(|(k, (_, line))| format!("{k} (line {line})"))
            .collect();
        if !unknown.is_empty() {
            return Err(CliError::Config(format!(
                "{}: unknown settings {}",
                self.origin,
                unknown.join(", ")
            )));
        }
        Ok(self.resolved)
    }
}
