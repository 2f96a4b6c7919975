use crate::error::CliError;
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

/// `key = value` settings read from a text file. Blank lines and lines
/// starting with `#` are ignored; keys use the long flag names.
#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

pub const KNOWN_KEYS: &[&str] = &[
    "group", "map", "surface", "level", "min-level", "iters", "samples", "seed", "out", "format", "check",
    "window", "mode", "eta", "contracted",
];

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", i + 1)))?;
            let key = k.trim().replace('_', "-");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("line {}: unknown key `{key}`", i + 1)));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The flag value if given, else the file value parsed as `T`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key `{key}`: {e}"))),
        }
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let c = FileConfig::parse("# comment\nlevel = 4\nseed=9\n\ngroup = hanoi").unwrap();
        assert_eq!(c.pick::<usize>(None, "level").unwrap(), Some(4));
        assert_eq!(c.pick(Some(7usize), "level").unwrap(), Some(7));
        assert_eq!(c.pick::<String>(None, "group").unwrap().as_deref(), Some("hanoi"));
        assert_eq!(c.pick::<u64>(None, "iters").unwrap(), None);
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(FileConfig::parse("level 4"), Err(CliError::Config(_))));
        assert!(matches!(FileConfig::parse("colour = red"), Err(CliError::Config(_))));
        let c = FileConfig::parse("level = four").unwrap();
        assert!(c.pick::<usize>(None, "level").is_err());
    }
}
