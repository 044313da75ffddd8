//! JSON-lines corpus of plaintext placements:
//! `{"grid":{"rows":R,"cols":C},"tagged":"<tagged form>"}` per line.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::CodecError;
use crate::grid::{Dims, GridError, GridSpec};
use crate::placement::Placement;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },
    #[error("line {line}: {source}")]
    Grid { line: usize, source: GridError },
    #[error("line {line}: {source}")]
    Codec { line: usize, source: CodecError },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusGrid {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub grid: CorpusGrid,
    pub tagged: String,
}

impl CorpusEntry {
    pub fn of(p: &Placement) -> Self {
        CorpusEntry {
            grid: CorpusGrid {
                rows: p.dims().rows(),
                cols: p.dims().cols(),
            },
            tagged: p.to_tagged().into_string(),
        }
    }
}

pub fn corpus_line(p: &Placement) -> String {
    serde_json::to_string(&CorpusEntry::of(p)).expect("corpus entries serialize")
}

pub fn parse_corpus_line(text: &str, line: usize) -> Result<Placement, CorpusError> {
    let entry: CorpusEntry =
        serde_json::from_str(text).map_err(|source| CorpusError::Json { line, source })?;
    let dims = Dims::new(entry.grid.rows, entry.grid.cols)
        .map_err(|source| CorpusError::Grid { line, source })?;
    let grid = GridSpec::with_dims(dims, 0);
    Placement::from_tagged(&grid, &entry.tagged)
        .map_err(|source| CorpusError::Codec { line, source })
}

/// Parses every non-blank line.
pub fn parse_corpus(text: &str) -> Result<Vec<Placement>, CorpusError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_corpus_line(l, i + 1))
        .collect()
}
