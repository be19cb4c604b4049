//! Layered settings: command-line flag, then `PACKBENCH_<KEY>` environment
//! variable, then `key=value` config file, then the built-in default.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

pub const ENV_PREFIX: &str = "PACKBENCH_";

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

#[derive(Debug, Default, Clone)]
pub struct Settings {
    values: BTreeMap<String, String>,
    /// Resolved values, recorded for the config hash.
    used: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(config: Option<&Path>) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
            values.extend(parse_config(&text)?);
        }
        for (k, v) in std::env::vars() {
            if let Some(rest) = k.strip_prefix(ENV_PREFIX) {
                values.insert(normalize(rest), v);
            }
        }
        Ok(Self {
            values,
            used: BTreeMap::new(),
        })
    }

    /// Resolves `key`, recording the value unless the key is excluded from
    /// the hash (output paths and worker counts do not change results).
    pub fn pick<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let key = normalize(key);
        let value = match flag {
            Some(v) => v,
            None => match self.values.get(&key) {
                Some(raw) => raw
                    .parse()
                    .map_err(|e| CliError::Usage(format!("bad value `{raw}` for `{key}`: {e}")))?,
                None => default,
            },
        };
        if key != "out" && key != "workers" {
            self.used.insert(key, value.to_string());
        }
        Ok(value)
    }

    /// Records a value that has no config-file form (such as an input path).
    pub fn note(&mut self, key: &str, value: impl Display) {
        self.used.insert(normalize(key), value.to_string());
    }

    pub fn resolved(&self) -> Vec<(String, String)> {
        self.used.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        out.insert(normalize(k), v.trim().to_string());
    }
    Ok(out)
}
