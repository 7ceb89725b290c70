//! Optional plain-text `key=value` configuration.
//!
//! Flags always win; the file only fills in values the command line left
//! unset. Keys use the flag names with `-` or `_` interchangeably, `#`
//! starts a comment.

use anyhow::{bail, Context, Result};
use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: HashMap<String, String>,
}

fn normalize_key(k: &str) -> String {
    k.trim().to_lowercase().replace('-', "_")
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!(
                    "{}:{}: expected key=value, got '{raw}'",
                    path.display(),
                    lineno + 1
                );
            };
            values.insert(normalize_key(k), v.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    /// Parsed value for `key`, if the file has one.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(&normalize_key(key)) {
            None => Ok(None),
            Some(raw) => match raw.parse() {
                Ok(v) => Ok(Some(v)),
                Err(e) => bail!("config key '{key}': cannot parse '{raw}': {e}"),
            },
        }
    }
}

/// First of: command-line value, config value, default.
pub fn resolve<T: FromStr + Clone>(flag: Option<T>, cfg: &FileConfig, key: &str, default: T) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    if let Some(v) = flag {
        return Ok(v);
    }
    Ok(cfg.get(key)?.unwrap_or(default))
}
