//! Optional `key = value` defaults for the oracle and atlas commands.
//!
//! ```text
//! # qdense.conf
//! box = 40
//! prec = 2
//! window = 3
//! budget = 20000000
//! jobs = 4
//! radius = 12
//! ```

use std::path::{Path, PathBuf};

/// Environment variable naming the config file.
pub const CONFIG_ENV: &str = "QDENSE_CONFIG";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    pub box_radius: Option<u64>,
    pub precision: Option<u32>,
    pub window: Option<i64>,
    pub budget: Option<u64>,
    pub jobs: Option<usize>,
    pub radius: Option<u64>,
}

fn value<T: std::str::FromStr>(key: &str, raw: &str, line: usize) -> Result<T, String> {
    raw.parse()
        .map_err(|_| format!("line {line}: `{raw}` is not a valid value for `{key}`"))
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, val) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let (key, val) = (key.trim(), val.trim());
            match key {
                "box" => c.box_radius = Some(value(key, val, i + 1)?),
                "prec" | "precision" => c.precision = Some(value(key, val, i + 1)?),
                "window" => c.window = Some(value(key, val, i + 1)?),
                "budget" => c.budget = Some(value(key, val, i + 1)?),
                "jobs" => c.jobs = Some(value(key, val, i + 1)?),
                "radius" => c.radius = Some(value(key, val, i + 1)?),
                other => return Err(format!("line {}: unknown key `{other}`", i + 1)),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Reads the file named by `QDENSE_CONFIG`, if set.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) if !path.is_empty() => Self::load(&PathBuf::from(path)),
            _ => Ok(Config::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c = Config::parse("# defaults\nbox = 40\nprec=2 # finer\n\nwindow = 3\njobs = 4\n").unwrap();
        assert_eq!(c.box_radius, Some(40));
        assert_eq!(c.precision, Some(2));
        assert_eq!(c.window, Some(3));
        assert_eq!(c.jobs, Some(4));
        assert_eq!(c.budget, None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(Config::parse("box 40").unwrap_err().contains("line 1"));
        assert!(Config::parse("colour = red").unwrap_err().contains("unknown key"));
        assert!(Config::parse("box = -3").is_err());
    }
}
