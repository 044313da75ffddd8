//! Text serializations of a placement.
//!
//! * [`CanonicalForm`]: every row concatenated, empty cells as spaces. This is
//!   what gets hashed.
//! * [`TaggedForm`]: for each occupied cell in row-major order, the 1-based
//!   row and column as zero-padded decimal fields followed by the character,
//!   e.g. `23P24a` on a 9x9 grid or `0203P0204a` on a 12x12 grid.

use std::fmt;

use thiserror::Error;

use crate::grid::{Coord, Dims, GridError, GridSpec};
use crate::placement::Placement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("expected {expected} cells, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("at byte {offset}: {reason}")]
    Parse { offset: usize, reason: String },
    #[error(transparent)]
    Grid(#[from] GridError),
}

impl CodecError {
    fn parse(offset: usize, reason: impl Into<String>) -> Self {
        CodecError::Parse {
            offset,
            reason: reason.into(),
        }
    }

    /// Byte offset of a parse failure, if this is one.
    pub fn offset(&self) -> Option<usize> {
        match self {
            CodecError::Parse { offset, .. } => Some(*offset),
            _ => None,
        }
    }
}

/// Exactly `rows * cols` characters, row-major, space for empty cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(String);

impl CanonicalForm {
    pub fn from_cells(dims: Dims, cells: impl IntoIterator<Item = Option<char>>) -> Self {
        let mut s = String::with_capacity(dims.cells());
        s.extend(cells.into_iter().map(|c| c.unwrap_or(' ')));
        debug_assert_eq!(s.chars().count(), dims.cells());
        CanonicalForm(s)
    }

    pub fn empty(dims: Dims) -> Self {
        CanonicalForm(" ".repeat(dims.cells()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.0.as_bytes()
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Coordinate-tagged text form; see the module docs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TaggedForm(String);

impl TaggedForm {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for TaggedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Decimal digits needed for the largest 1-based coordinate.
pub fn coord_width(dims: Dims) -> usize {
    dims.rows().max(dims.cols()).to_string().len()
}

impl Placement {
    pub fn to_canonical(&self) -> CanonicalForm {
        let dims = self.dims();
        let mut cells = vec![None; dims.cells()];
        for &(at, c) in self.entries() {
            cells[dims.index(at)] = Some(c);
        }
        CanonicalForm::from_cells(dims, cells)
    }

    pub fn from_canonical(grid: &GridSpec, text: &str) -> Result<Placement, CodecError> {
        let dims = grid.dims();
        let found = text.chars().count();
        if found != dims.cells() {
            return Err(CodecError::WrongLength {
                expected: dims.cells(),
                found,
            });
        }
        let entries = text
            .chars()
            .enumerate()
            .filter(|&(_, c)| c != ' ')
            .map(|(i, c)| (dims.coord(i), c));
        Ok(Placement::new(grid, entries)?)
    }

    pub fn to_tagged(&self) -> TaggedForm {
        let w = coord_width(self.dims());
        let mut s = String::with_capacity(self.len() * (2 * w + 1));
        for &(at, c) in self.entries() {
            use fmt::Write;
            write!(s, "{:0w$}{:0w$}{c}", at.row + 1, at.col + 1).expect("writing to a String");
        }
        TaggedForm(s)
    }

    /// Parses a tagged form. Rejects out-of-range or malformed coordinate
    /// fields, characters outside the alphabet and repeated cells, reporting
    /// the byte offset of the offending record.
    pub fn from_tagged(grid: &GridSpec, text: &str) -> Result<Placement, CodecError> {
        let dims = grid.dims();
        let w = coord_width(dims);
        let bytes = text.as_bytes();
        let mut entries: Vec<(Coord, char)> = Vec::new();
        let mut seen = vec![false; dims.cells()];
        let mut pos = 0;
        if text.is_empty() {
            return Err(CodecError::parse(0, "empty password"));
        }
        while pos < bytes.len() {
            let start = pos;
            let row = parse_field(bytes, pos, w, dims.rows())?;
            pos += w;
            let col = parse_field(bytes, pos, w, dims.cols())?;
            pos += w;
            let c = text[pos..]
                .chars()
                .next()
                .ok_or_else(|| CodecError::parse(pos, "missing character after coordinates"))?;
            if !grid.alphabet().contains(c) {
                return Err(CodecError::parse(
                    pos,
                    format!("character {c:?} not allowed"),
                ));
            }
            pos += c.len_utf8();
            let at = Coord::new(row - 1, col - 1);
            let idx = dims.index(at);
            if seen[idx] {
                return Err(CodecError::parse(
                    start,
                    format!("cell {row},{col} given twice"),
                ));
            }
            seen[idx] = true;
            entries.push((at, c));
        }
        Ok(Placement::new(grid, entries)?)
    }
}

fn parse_field(bytes: &[u8], pos: usize, width: usize, max: usize) -> Result<usize, CodecError> {
    let field = bytes
        .get(pos..pos + width)
        .ok_or_else(|| CodecError::parse(pos, "truncated coordinate"))?;
    let mut v = 0usize;
    for (k, &b) in field.iter().enumerate() {
        if !b.is_ascii_digit() {
            return Err(CodecError::parse(pos + k, "expected a digit"));
        }
        v = v * 10 + (b - b'0') as usize;
    }
    if v == 0 || v > max {
        return Err(CodecError::parse(
            pos,
            format!("coordinate {v} outside 1..={max}"),
        ));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The example "Password" snake, 1-based.
    fn snake(grid: &GridSpec) -> Placement {
        let cells = [
            (2, 3),
            (2, 4),
            (2, 5),
            (2, 6),
            (3, 6),
            (4, 6),
            (5, 6),
            (5, 7),
        ];
        Placement::new(
            grid,
            cells
                .iter()
                .zip("Password".chars())
                .map(|(&(r, c), ch)| (Coord::new(r - 1, c - 1), ch)),
        )
        .unwrap()
    }

    #[test]
    fn tagged_single_digit_grid() {
        let g = GridSpec::with_dims(Dims::new(9, 9).unwrap(), 0);
        let p = snake(&g);
        assert_eq!(p.to_tagged().as_str(), "23P24a25s26s36w46o56r57d");
        assert_eq!(
            Placement::from_tagged(&g, "23P24a25s26s36w46o56r57d").unwrap(),
            p
        );
    }

    #[test]
    fn tagged_two_digit_grid() {
        let g = GridSpec::standard(0);
        let p = snake(&g);
        assert_eq!(
            p.to_tagged().as_str(),
            "0203P0204a0205s0206s0306w0406o0506r0507d"
        );
    }

    #[test]
    fn tagged_errors() {
        let g = GridSpec::standard(0);
        let dup = Placement::from_tagged(&g, "0101a0101b").unwrap_err();
        assert_eq!(dup.offset(), Some(5));
        assert_eq!(
            Placement::from_tagged(&g, "1301a").unwrap_err().offset(),
            Some(0)
        );
        assert_eq!(
            Placement::from_tagged(&g, "0113a").unwrap_err().offset(),
            Some(2)
        );
        assert_eq!(
            Placement::from_tagged(&g, "0000a").unwrap_err().offset(),
            Some(0)
        );
        assert_eq!(
            Placement::from_tagged(&g, "01x1a").unwrap_err().offset(),
            Some(2)
        );
        assert_eq!(
            Placement::from_tagged(&g, "0101").unwrap_err().offset(),
            Some(4)
        );
        assert_eq!(
            Placement::from_tagged(&g, "0101 ").unwrap_err().offset(),
            Some(4)
        );
        assert_eq!(
            Placement::from_tagged(&g, "0101a01").unwrap_err().offset(),
            Some(7)
        );
        assert_eq!(
            Placement::from_tagged(&g, "").unwrap_err().offset(),
            Some(0)
        );
    }

    #[test]
    fn canonical_layout() {
        let g = GridSpec::standard(0);
        let p = Placement::new(&g, [(Coord::new(1, 2), 'P'), (Coord::new(1, 3), 'a')]).unwrap();
        let canon = p.to_canonical();
        let s = canon.as_str();
        assert_eq!(s.len(), 144);
        // row * cols + col
        assert_eq!(&s[14..16], "Pa");
        assert_eq!(s.chars().filter(|&c| c != ' ').count(), 2);
        assert_eq!(Placement::from_canonical(&g, s).unwrap(), p);
    }

    #[test]
    fn empty_grid_is_all_spaces() {
        let d = Dims::new(3, 3).unwrap();
        assert_eq!(CanonicalForm::empty(d).as_str(), "         ");
        let session = crate::grid::EntrySession::new(GridSpec::with_dims(d, 0));
        assert_eq!(session.canonical(), CanonicalForm::empty(d));
    }

    #[test]
    fn canonical_length_checked() {
        let g = GridSpec::with_dims(Dims::new(2, 2).unwrap(), 0);
        assert_eq!(
            Placement::from_canonical(&g, "ab"),
            Err(CodecError::WrongLength {
                expected: 4,
                found: 2
            })
        );
        assert_eq!(
            Placement::from_canonical(&g, "    "),
            Err(CodecError::Grid(GridError::EmptyPlacement))
        );
    }
}
