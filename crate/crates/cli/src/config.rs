//! Settings resolution. Precedence: command-line flags, then the TOML file
//! named by `COREF_FORGE_CONFIG` (and `COREF_FORGE_LEXICON` for the lexicon
//! path), then built-in defaults.

use std::path::PathBuf;

use anyhow::{Context, Result};
use coref_forge::lexicon::{load_lexicon, GenderLexicon};
use serde::Deserialize;

use crate::io::Format;
use crate::usage;

/// The optional configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lexicon: Option<PathBuf>,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub verbosity: Option<u8>,
}

impl FileConfig {
    /// Load the file named by `COREF_FORGE_CONFIG`, if set.
    pub fn from_env() -> Result<FileConfig> {
        let Some(path) = std::env::var_os("COREF_FORGE_CONFIG") else {
            return Ok(FileConfig::default());
        };
        let path = PathBuf::from(path);
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))
    }
}

/// Fully resolved run settings.
#[derive(Debug)]
pub struct Settings {
    pub seed: u64,
    pub lexicon: Option<PathBuf>,
    /// Output format override; `None` falls back to the output file extension.
    pub format: Option<Format>,
    pub json: bool,
    pub verbosity: u8,
    pub jobs: Option<usize>,
}

impl Settings {
    pub fn resolve(
        seed: Option<u64>,
        lexicon: Option<PathBuf>,
        format: Option<&str>,
        json: bool,
        verbose: u8,
        jobs: Option<usize>,
        config: FileConfig,
    ) -> Result<Settings> {
        let format = match format {
            Some(name) => {
                Some(Format::from_name(name).ok_or_else(|| {
                    usage(format!("unknown output format {name:?} (conll or jsonl)"))
                })?)
            }
            None => match &config.format {
                Some(name) => Some(Format::from_name(name).ok_or_else(|| {
                    anyhow::anyhow!("config file names unknown output format {name:?}")
                })?),
                None => None,
            },
        };
        let lexicon = lexicon
            .or_else(|| std::env::var_os("COREF_FORGE_LEXICON").map(PathBuf::from))
            .or(config.lexicon);
        Ok(Settings {
            seed: seed.or(config.seed).unwrap_or(0),
            lexicon,
            format,
            json,
            verbosity: if verbose > 0 {
                verbose
            } else {
                config.verbosity.unwrap_or(0)
            },
            jobs,
        })
    }

    /// Output format for `path`: explicit setting first, then the extension.
    pub fn format_for(&self, path: &std::path::Path) -> Format {
        self.format
            .or_else(|| Format::from_extension(path))
            .unwrap_or(Format::Conll)
    }

    /// Load the lexicon these settings name, or the built-in one.
    pub fn lexicon(&self) -> Result<GenderLexicon> {
        let user = match &self.lexicon {
            None => None,
            Some(path) => Some(
                std::fs::read_to_string(path)
                    .with_context(|| format!("reading lexicon {}", path.display()))?,
            ),
        };
        load_lexicon(user.as_deref()).context("loading lexicon")
    }
}
