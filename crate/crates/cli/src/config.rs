//! Run configuration: defaults, then a key=value file, then command-line flags.

use std::path::{Path, PathBuf};

use crate::CliError;

pub const CONFIG_ENV: &str = "MULHECKE_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    /// Truncation for series work; traces pick their own when absent.
    pub terms: Option<usize>,
    pub prec: u32,
    pub discriminants: Vec<i64>,
    pub level: Option<u64>,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            terms: None,
            prec: 256,
            discriminants: Vec::new(),
            level: None,
            cache_dir: None,
            format: Format::Table,
            timings: false,
        }
    }
}

fn bad(path: &Path, line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{}:{line}: {msg}", path.display()))
}

impl RunConfig {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| bad(path, i + 1, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<u64>().map_err(|_| bad(path, i + 1, format!("{key}: not a number: {v}")));
            match key {
                "terms" => self.terms = Some(num(value)? as usize),
                "prec" | "precision_bits" => self.prec = num(value)? as u32,
                "level" => self.level = Some(num(value)?),
                "discriminants" => {
                    self.discriminants = value
                        .split(',')
                        .map(|d| d.trim().parse().map_err(|_| bad(path, i + 1, format!("bad discriminant {d}"))))
                        .collect::<Result<_, _>>()?
                }
                "cache_dir" => self.cache_dir = if value.is_empty() { None } else { Some(PathBuf::from(value)) },
                "no_cache" => {
                    if value
                        .parse::<bool>()
                        .map_err(|_| bad(path, i + 1, "no_cache must be true or false"))?
                    {
                        self.cache_dir = None;
                    }
                }
                "format" => {
                    self.format = match value {
                        "json" => Format::Json,
                        "table" => Format::Table,
                        _ => return Err(bad(path, i + 1, "format must be json or table")),
                    }
                }
                "timings" => self.timings = value.parse().map_err(|_| bad(path, i + 1, "timings must be true or false"))?,
                _ => return Err(bad(path, i + 1, format!("unknown key {key}"))),
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if matches!(self.terms, Some(t) if t < 4) {
            return Err(CliError::Usage("terms must be at least 4".into()));
        }
        if self.prec < 64 {
            return Err(CliError::Usage("precision must be at least 64 bits".into()));
        }
        for &d in &self.discriminants {
            if !mulhecke_core::field::is_fundamental(d) {
                return Err(CliError::Usage(format!("{d} is not a fundamental discriminant")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "# comment\nterms = 30\nprec=512\ndiscriminants = 1, 8\nformat = json\n").unwrap();
        let mut c = RunConfig::default();
        c.apply_file(&path).unwrap();
        assert_eq!(c.terms, Some(30));
        assert_eq!(c.prec, 512);
        assert_eq!(c.discriminants, vec![1, 8]);
        assert_eq!(c.format, Format::Json);
        c.validate().unwrap();

        std::fs::write(&path, "colour = red\n").unwrap();
        assert!(matches!(RunConfig::default().apply_file(&path), Err(CliError::Usage(_))));
        std::fs::write(&path, "discriminants = 9\n").unwrap();
        let mut c = RunConfig::default();
        c.apply_file(&path).unwrap();
        assert!(c.validate().is_err());
    }
}
