//! Flat `key=value` run configuration. Command-line flags take precedence.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::CliError;

/// Every key a config file may set; anything else is rejected.
pub const KEYS: &[&str] = &[
    "data",
    "features",
    "weights",
    "qubo",
    "layout",
    "out",
    "index",
    "epochs",
    "learning_rate",
    "init_scale",
    "train_seed",
    "backend",
    "reads",
    "sweeps",
    "beta_start",
    "beta_end",
    "seed",
    "threads",
    "k",
    "alpha",
    "penalty",
    "clamp_mode",
    "normalization",
    "format",
    "repetitions",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    source: Option<PathBuf>,
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| annealnet::Error::Io {
            path: path.to_owned(),
            source: e,
        })?;
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("{}:{}: expected key=value", path.display(), i + 1))
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::Usage(format!(
                    "{}:{}: unknown key {key:?}",
                    path.display(),
                    i + 1
                )));
            }
            if values
                .insert(key.to_owned(), value.trim().to_owned())
                .is_some()
            {
                return Err(CliError::Usage(format!(
                    "{}:{}: repeated key {key:?}",
                    path.display(),
                    i + 1
                )));
            }
        }
        Ok(Self {
            source: Some(path.to_owned()),
            values,
        })
    }

    /// The flag if given, otherwise the file's value, parsed.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                let origin = self
                    .source
                    .as_ref()
                    .map_or_else(String::new, |p| format!("{}: ", p.display()));
                CliError::Usage(format!("{origin}invalid value {raw:?} for `{key}`"))
            }),
        }
    }

    pub fn pick_or<T: FromStr>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T, CliError> {
        self.pick(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("missing required setting `{key}`")))
    }
}

/// `beta_start`: a number, or `auto` to scale it to each model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaStart {
    Fixed(f64),
    Auto,
}

impl FromStr for BetaStart {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(BetaStart::Auto);
        }
        s.parse()
            .map(BetaStart::Fixed)
            .map_err(|_| format!("expected a number or `auto`, got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Csv,
}

impl FromStr for TableFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(TableFormat::Text),
            "csv" => Ok(TableFormat::Csv),
            _ => Err(format!("format must be text or csv, got {s:?}")),
        }
    }
}
