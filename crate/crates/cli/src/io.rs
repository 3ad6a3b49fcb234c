//! Corpus file IO. The on-disk format follows the file extension (`.jsonl`
//! for the sidecar, anything else for the column format) unless overridden.

use std::path::Path;

use anyhow::{Context, Result};
use coref_forge::conll::{parse_conll, serialize_conll};
use coref_forge::corpus::Corpus;
use coref_forge::jsonl::{parse_jsonl, serialize_jsonl};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Conll,
    Jsonl,
}

impl Format {
    pub fn from_name(name: &str) -> Option<Format> {
        match name.trim().to_lowercase().as_str() {
            "conll" => Some(Format::Conll),
            "jsonl" => Some(Format::Jsonl),
            _ => None,
        }
    }

    pub fn from_extension(path: &Path) -> Option<Format> {
        let ext = path.extension()?.to_str()?;
        Format::from_name(ext)
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::Conll => "conll",
            Format::Jsonl => "jsonl",
        }
    }
}

/// Read a corpus, picking the parser from the file extension.
pub fn read_corpus(path: &Path) -> Result<Corpus> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let format = Format::from_extension(path).unwrap_or(Format::Conll);
    match format {
        Format::Conll => {
            parse_conll(&text).with_context(|| format!("parsing {}", path.display()))
        }
        Format::Jsonl => {
            parse_jsonl(&text).with_context(|| format!("parsing {}", path.display()))
        }
    }
}

/// Render a corpus in the requested format.
pub fn render_corpus(corpus: &Corpus, format: Format) -> String {
    match format {
        Format::Conll => serialize_conll(corpus),
        Format::Jsonl => serialize_jsonl(corpus),
    }
}
