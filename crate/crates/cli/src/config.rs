//! `key = value` experiment files and flag/config/default resolution.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Blank lines and lines starting with `#` are ignored. Keys may use
    /// either `-` or `_`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", n + 1)))?;
            let key = key.trim().replace('_', "-");
            if key.is_empty() {
                return Err(CliError::Usage(format!("config line {}: empty key", n + 1)));
            }
            let value = value.trim().trim_matches('"').to_string();
            if entries.insert(key.clone(), value).is_some() {
                return Err(CliError::Usage(format!("config line {}: duplicate key `{key}`", n + 1)));
            }
        }
        Ok(Self { entries })
    }

    /// Reject keys that the chosen subcommand does not understand.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.entries.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Usage(format!("unknown config key `{k}`"))),
            None => Ok(()),
        }
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("config key `{key}`: invalid value `{v}`: {e}")))
            })
            .transpose()
    }
}

/// Flag if given, else the config entry, else the default.
pub fn resolve<T>(flag: Option<T>, config: &ConfigFile, key: &str, default: T) -> Result<T, CliError>
where
    T: FromStr,
    T::Err: Display,
{
    match flag {
        Some(v) => Ok(v),
        None => Ok(config.get(key)?.unwrap_or(default)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_underscores() {
        let c = ConfigFile::parse("# run\na = 0.12\n\nmax_iter = 500\nformat = \"csv\"\n").unwrap();
        assert_eq!(c.get::<f64>("a").unwrap(), Some(0.12));
        assert_eq!(c.get::<usize>("max-iter").unwrap(), Some(500));
        assert_eq!(c.get::<String>("format").unwrap().as_deref(), Some("csv"));
        assert_eq!(c.get::<f64>("seed").unwrap(), None);
    }

    #[test]
    fn precedence() {
        let c = ConfigFile::parse("a = 0.12").unwrap();
        assert_eq!(resolve(Some(0.05), &c, "a", 0.1).unwrap(), 0.05);
        assert_eq!(resolve(None, &c, "a", 0.1).unwrap(), 0.12);
        assert_eq!(resolve(None, &c, "epsilon", 0.05).unwrap(), 0.05);
    }

    #[test]
    fn malformed_files_are_usage_errors() {
        assert!(ConfigFile::parse("a 0.1").is_err());
        assert!(ConfigFile::parse("a = 1\na = 2").is_err());
        assert!(ConfigFile::parse("= 2").is_err());
        let c = ConfigFile::parse("a = x").unwrap();
        assert!(c.get::<f64>("a").is_err());
        assert!(c.check_keys(&["seed"]).is_err());
        assert!(c.check_keys(&["a"]).is_ok());
    }
}
