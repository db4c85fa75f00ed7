//! Flat key-value configuration files.
//!
//! One `key = value` pair per line; `#` starts a comment; keys use the
//! long flag names without the leading dashes. Values read exactly like
//! the corresponding command-line values. Precedence is
//! flags > config file > built-in defaults.
//!
//! ```text
//! # quarter run
//! K1 = 2.0
//! mu = 1.5
//! alpha = 0.5
//! boundary-form = integral
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<ConfigFile, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "config line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                ));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    /// Resolves one parameter: explicit flag wins, then the config file,
    /// then the default.
    pub fn resolve<T: FromStr + Clone>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|_| format!("config key `{key}`: cannot parse `{raw}`")),
            None => Ok(default),
        }
    }

    /// Same, but the parameter stays optional.
    pub fn resolve_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, String> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| format!("config key `{key}`: cannot parse `{raw}`")),
            None => Ok(None),
        }
    }
}
