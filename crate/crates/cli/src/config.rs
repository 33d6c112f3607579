//! Flat `key = value` config files and CLI-over-file-over-default
//! resolution of run settings.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use offlang_core::nn::Readout;

use crate::CliError;

/// Which binary task labels are used: OFF/NOT or TIN/UNT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Subtask {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "B", alias = "b")]
    B,
}

impl Subtask {
    /// Class names in index order (class 0, class 1).
    pub fn class_names(self) -> [&'static str; 2] {
        match self {
            Subtask::A => ["NOT", "OFF"],
            Subtask::B => ["TIN", "UNT"],
        }
    }
}

impl fmt::Display for Subtask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subtask::A => "A",
            Subtask::B => "B",
        })
    }
}

impl FromStr for Subtask {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Subtask::A),
            "B" | "b" => Ok(Subtask::B),
            other => Err(format!("unknown subtask {other:?} (expected A or B)")),
        }
    }
}

/// Which classifier a command trains or loads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelKind {
    /// Char-CNN + word-LSTM classifier.
    Deep,
    /// Word/char n-gram linear SVM.
    Svm,
    /// Linear SVM over precomputed sentence vectors.
    EmbeddingSvm,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Deep => "deep",
            ModelKind::Svm => "svm",
            ModelKind::EmbeddingSvm => "embedding-svm",
        })
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "deep" => Ok(ModelKind::Deep),
            "svm" => Ok(ModelKind::Svm),
            "embedding-svm" | "embedding_svm" => Ok(ModelKind::EmbeddingSvm),
            other => Err(format!(
                "unknown model {other:?} (expected deep, svm or embedding-svm)"
            )),
        }
    }
}

pub fn parse_readout(s: &str) -> Result<Readout, String> {
    match s.trim() {
        "last" => Ok(Readout::Last),
        "mean" => Ok(Readout::Mean),
        other => Err(format!("unknown readout {other:?} (expected last or mean)")),
    }
}

pub fn readout_name(r: Readout) -> &'static str {
    match r {
        Readout::Last => "last",
        Readout::Mean => "mean",
    }
}

/// Parse a flat config file: one `key = value` per line, `#` comments
/// and blank lines allowed.
fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "{}:{}: expected `key = value`, got {raw:?}",
                path.display(),
                i + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Merges one optional config file under CLI flags: flag beats file
/// beats default.
pub struct Resolver {
    file: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(config: Option<&PathBuf>) -> Result<Resolver, CliError> {
        let file = match config {
            Some(path) => parse_config_file(path)?,
            None => BTreeMap::new(),
        };
        Ok(Resolver { file })
    }

    fn parse_file_value<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::Usage(format!("config key {key} = {raw:?}: {e}"))
            }),
        }
    }

    /// Resolved value of a required setting.
    pub fn get<T>(&self, key: &str, cli: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match cli {
            Some(v) => Ok(v),
            None => Ok(self.parse_file_value(key)?.unwrap_or(default)),
        }
    }

    /// Resolved value of an optional setting.
    pub fn opt<T>(&self, key: &str, cli: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match cli {
            Some(v) => Ok(Some(v)),
            None => self.parse_file_value(key),
        }
    }
}

/// Frozen echo of every knob that affects results, written next to the
/// training artifacts. Lines reload as a config file.
#[derive(Debug, Default)]
pub struct ConfigEcho {
    entries: BTreeMap<String, String>,
}

impl ConfigEcho {
    pub fn set(&mut self, key: &str, value: impl fmt::Display) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn set_opt(&mut self, key: &str, value: Option<impl fmt::Display>) {
        if let Some(v) = value {
            self.set(key, v);
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.entries {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(value);
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.render())
            .map_err(|e| CliError::Core(offlang_core::Error::io(path.display().to_string(), e)))
    }
}
