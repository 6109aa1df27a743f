//! Flat `key=value` settings: config file first, then `--set` overrides.
//!
//! Each scenario pulls the keys it understands; whatever is left over is an
//! unknown key and rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Bad configuration; the binary maps it to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

pub fn parse_pair(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(format!("empty key in `{s}`"));
    }
    Ok((k.to_string(), v.to_string()))
}

#[derive(Debug, Default)]
pub struct Settings {
    raw: BTreeMap<String, String>,
    /// Resolved values in lookup order, defaults included.
    resolved: Vec<(String, String)>,
}

impl Settings {
    pub fn load(file: Option<&Path>, overrides: &[(String, String)]) -> anyhow::Result<Self> {
        let mut raw = BTreeMap::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            for (no, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = parse_pair(line).map_err(|e| config_error(format!("{}:{}: {e}", path.display(), no + 1)))?;
                raw.insert(k, v);
            }
        }
        for (k, v) in overrides {
            raw.insert(k.clone(), v.clone());
        }
        Ok(Self { raw, resolved: Vec::new() })
    }

    pub fn get<T: FromStr + ToString>(&mut self, key: &str, default: T) -> anyhow::Result<T> {
        let value = match self.raw.remove(key) {
            Some(text) => text
                .parse()
                .map_err(|_| config_error(format!("cannot parse {key}={text}")))?,
            None => default,
        };
        self.resolved.push((key.to_string(), value.to_string()));
        Ok(value)
    }

    /// Errors on any key no scenario lookup consumed.
    pub fn finish(&self) -> anyhow::Result<()> {
        match self.raw.keys().next() {
            None => Ok(()),
            Some(_) => Err(config_error(format!(
                "unknown key(s): {}",
                self.raw.keys().cloned().collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    pub fn resolved(&self) -> &[(String, String)] {
        &self.resolved
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_and_unknown_keys() {
        let mut s = Settings::load(None, &[("k".into(), "0.5".into()), ("bogus".into(), "1".into())]).unwrap();
        assert_eq!(s.get("k", 2.0).unwrap(), 0.5);
        assert_eq!(s.get("T", 10.0).unwrap(), 10.0);
        assert!(s.finish().is_err());
        assert_eq!(s.resolved()[1], ("T".to_string(), "10".to_string()));
    }

    #[test]
    fn pairs() {
        assert_eq!(parse_pair(" a = 1 ").unwrap(), ("a".into(), "1".into()));
        assert!(parse_pair("a").is_err());
        assert!(parse_pair("=1").is_err());
    }

    #[test]
    fn unparsable_value_is_a_config_error() {
        let mut s = Settings::load(None, &[("Nx".into(), "eight".into())]).unwrap();
        let err = s.get("Nx", 8usize).unwrap_err();
        assert!(err.downcast_ref::<ConfigError>().is_some());
    }
}
