//! Flag/config-file merging. A config file is a flat TOML table whose keys
//! are the long flag names (`-` or `_` both accepted). Flags win over the
//! file, the file wins over built-in defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::Value;

/// A settings problem the user has to fix; exits with status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(message: impl Into<String>) -> anyhow::Error {
    ConfigError(message.into()).into()
}

/// Effective settings of one run, echoed into its output.
pub type Echo = BTreeMap<String, Value>;

pub struct Layered {
    file: BTreeMap<String, toml::Value>,
    source: Option<PathBuf>,
    echo: Echo,
}

impl Layered {
    /// Loads `path` if given and rejects keys outside `allowed`.
    pub fn load(path: Option<&Path>, allowed: &[&str]) -> anyhow::Result<Self> {
        let mut file = BTreeMap::new();
        if let Some(path) = path {
            let raw = std::fs::read_to_string(path).map_err(|e| {
                config_error(format!("cannot read config file {}: {e}", path.display()))
            })?;
            let table: toml::Table = raw
                .parse()
                .map_err(|e| config_error(format!("config file {}: {e}", path.display())))?;
            for (key, value) in table {
                let key = key.replace('-', "_");
                if !allowed.contains(&key.as_str()) {
                    return Err(config_error(format!(
                        "config file {}: unknown key {key:?} (allowed: {})",
                        path.display(),
                        allowed.join(", ")
                    )));
                }
                file.insert(key, value);
            }
        }
        let mut echo = Echo::new();
        if let Some(path) = path {
            echo.insert(
                "config_file".into(),
                Value::from(path.display().to_string()),
            );
        }
        Ok(Layered {
            file,
            source: path.map(Path::to_path_buf),
            echo,
        })
    }

    fn file_string(&self, key: &str) -> anyhow::Result<Option<String>> {
        let Some(value) = self.file.get(key) else {
            return Ok(None);
        };
        let text = match value {
            toml::Value::String(s) => s.clone(),
            toml::Value::Integer(i) => i.to_string(),
            toml::Value::Float(f) => f.to_string(),
            toml::Value::Boolean(b) => b.to_string(),
            other => {
                return Err(config_error(format!(
                    "config file {}: {key} must be a scalar, found {}",
                    self.source
                        .as_ref()
                        .map_or(String::new(), |p| p.display().to_string()),
                    other.type_str()
                )))
            }
        };
        Ok(Some(text))
    }

    /// Flag, else file value, else `None`; parsed as `T`.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> anyhow::Result<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file_string(key)? {
                Some(raw) => Some(
                    raw.parse::<T>()
                        .map_err(|e| config_error(format!("config key {key}={raw:?}: {e}")))?,
                ),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.echo.insert(key.to_owned(), Value::from(v.to_string()));
        }
        Ok(value)
    }

    pub fn with_default<T>(&mut self, key: &str, flag: Option<T>, default: T) -> anyhow::Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = self.optional(key, flag)?.unwrap_or(default);
        self.echo
            .insert(key.to_owned(), Value::from(value.to_string()));
        Ok(value)
    }

    pub fn required<T>(&mut self, key: &str, flag: Option<T>) -> anyhow::Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.optional(key, flag)?.ok_or_else(|| {
            config_error(format!(
                "missing required setting --{}",
                key.replace('_', "-")
            ))
        })
    }

    /// Integer setting echoed as a JSON number.
    pub fn number(&mut self, key: &str, flag: Option<u64>, default: u64) -> anyhow::Result<u64> {
        let value = self.with_default(key, flag, default)?;
        self.echo.insert(key.to_owned(), Value::from(value));
        Ok(value)
    }

    /// Boolean switch: set by the flag, else by the file, else `default`.
    pub fn switch(&mut self, key: &str, flag: bool, default: bool) -> anyhow::Result<bool> {
        let value = if flag {
            Some(!default)
        } else {
            self.optional::<bool>(key, None)?
        };
        let value = value.unwrap_or(default);
        self.echo.insert(key.to_owned(), Value::from(value));
        Ok(value)
    }

    /// Repeated flag, else a string array in the file.
    pub fn list(&mut self, key: &str, flag: Vec<String>) -> anyhow::Result<Vec<String>> {
        let value = if !flag.is_empty() {
            flag
        } else {
            match self.file.get(key) {
                None => Vec::new(),
                Some(toml::Value::String(s)) => vec![s.clone()],
                Some(toml::Value::Array(items)) => items
                    .iter()
                    .map(|v| {
                        v.as_str().map(str::to_owned).ok_or_else(|| {
                            config_error(format!("config key {key} must hold strings"))
                        })
                    })
                    .collect::<anyhow::Result<_>>()?,
                Some(other) => {
                    return Err(config_error(format!(
                        "config key {key} must be a list, found {}",
                        other.type_str()
                    )))
                }
            }
        };
        if !value.is_empty() {
            self.echo.insert(key.to_owned(), Value::from(value.clone()));
        }
        Ok(value)
    }

    pub fn record(&mut self, key: &str, value: impl Into<Value>) {
        self.echo.insert(key.to_owned(), value.into());
    }

    pub fn echo(&self) -> &Echo {
        &self.echo
    }
}
