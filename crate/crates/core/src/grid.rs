//! Grid geometry and the interactive entry state machine.
//!
//! Cursor movement wraps toroidally: each axis is taken modulo its dimension,
//! so a diagonal step off a corner lands on the opposite corner.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::CanonicalForm;
use crate::placement::Placement;

/// Largest number of cells a grid may have.
pub const MAX_CELLS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid must be at least 2x2, got {rows}x{cols}")]
    TooSmall { rows: usize, cols: usize },
    #[error("grid {rows}x{cols} exceeds {MAX_CELLS} cells")]
    TooLarge { rows: usize, cols: usize },
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("alphabet may not contain the space character")]
    SpaceInAlphabet,
    #[error("alphabet contains {0:?} more than once")]
    DuplicateChar(char),
    #[error("palette must have at least one color")]
    EmptyPalette,
    #[error("cell ({row},{col}) is outside the {rows}x{cols} grid")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("no cursor cell selected")]
    NoCursor,
    #[error("character {0:?} is not in the grid alphabet")]
    BadChar(char),
    #[error("placement has no characters")]
    EmptyPlacement,
    #[error("cell ({row},{col}) appears twice")]
    DuplicateCoord { row: usize, col: usize },
    #[error("username is empty")]
    EmptyUsername,
    #[error("malformed grid size {0:?}, expected RxC")]
    BadDims(String),
}

/// Grid dimensions. Always at least 2x2 and at most [`MAX_CELLS`] cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    rows: u16,
    cols: u16,
}

impl Dims {
    pub fn new(rows: usize, cols: usize) -> Result<Self, GridError> {
        if rows < 2 || cols < 2 {
            return Err(GridError::TooSmall { rows, cols });
        }
        if rows.saturating_mul(cols) > MAX_CELLS {
            return Err(GridError::TooLarge { rows, cols });
        }
        Ok(Dims {
            rows: rows as u16,
            cols: cols as u16,
        })
    }

    pub fn rows(self) -> usize {
        self.rows as usize
    }

    pub fn cols(self) -> usize {
        self.cols as usize
    }

    pub fn cells(self) -> usize {
        self.rows() * self.cols()
    }

    pub fn contains(self, c: Coord) -> bool {
        c.row < self.rows && c.col < self.cols
    }

    pub fn check(self, c: Coord) -> Result<Coord, GridError> {
        if self.contains(c) {
            Ok(c)
        } else {
            Err(GridError::OutOfBounds {
                row: c.row as usize,
                col: c.col as usize,
                rows: self.rows(),
                cols: self.cols(),
            })
        }
    }

    /// Row-major cell index.
    pub fn index(self, c: Coord) -> usize {
        c.row as usize * self.cols() + c.col as usize
    }

    pub fn coord(self, index: usize) -> Coord {
        Coord::new(index / self.cols(), index % self.cols())
    }

    pub fn coords(self) -> impl Iterator<Item = Coord> {
        (0..self.cells()).map(move |i| self.coord(i))
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

impl FromStr for Dims {
    type Err = GridError;

    /// Parses `RxC`, e.g. `12x12`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GridError::BadDims(s.to_string());
        let (r, c) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let rows = r.trim().parse().map_err(|_| bad())?;
        let cols = c.trim().parse().map_err(|_| bad())?;
        Dims::new(rows, cols)
    }
}

/// A 0-based cell coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coord {
    pub row: u16,
    pub col: u16,
}

impl Coord {
    pub fn new(row: usize, col: usize) -> Self {
        Coord {
            row: row as u16,
            col: col as u16,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// One of the eight unit steps a cursor can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Direction {
    pub const ALL: [Direction; 8] = [
        Direction::N,
        Direction::NE,
        Direction::E,
        Direction::SE,
        Direction::S,
        Direction::SW,
        Direction::W,
        Direction::NW,
    ];

    /// `(d_row, d_col)` with rows growing downwards.
    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::N => (-1, 0),
            Direction::NE => (-1, 1),
            Direction::E => (0, 1),
            Direction::SE => (1, 1),
            Direction::S => (1, 0),
            Direction::SW => (1, -1),
            Direction::W => (0, -1),
            Direction::NW => (-1, -1),
        }
    }

    pub fn from_delta(dr: i32, dc: i32) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.delta() == (dr, dc))
    }

    pub fn opposite(self) -> Direction {
        let (dr, dc) = self.delta();
        Direction::from_delta(-dr, -dc).expect("every direction has an opposite")
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::N => "N",
            Direction::NE => "NE",
            Direction::E => "E",
            Direction::SE => "SE",
            Direction::S => "S",
            Direction::SW => "SW",
            Direction::W => "W",
            Direction::NW => "NW",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Direction::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown direction {s:?}"))
    }
}

/// Steps one cell from `from` in `dir`, wrapping each axis independently.
pub fn advance(dims: Dims, from: Coord, dir: Direction) -> Coord {
    let (dr, dc) = dir.delta();
    Coord {
        row: wrap(from.row, dr, dims.rows),
        col: wrap(from.col, dc, dims.cols),
    }
}

fn wrap(v: u16, d: i32, n: u16) -> u16 {
    (v as i32 + d).rem_euclid(n as i32) as u16
}

/// Ordered set of characters a password may use. Never contains a space,
/// which is reserved as the empty-cell marker of the canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    chars: Vec<char>,
    sorted: Vec<char>,
}

impl Alphabet {
    pub fn new(chars: impl IntoIterator<Item = char>) -> Result<Self, GridError> {
        let chars: Vec<char> = chars.into_iter().collect();
        if chars.is_empty() {
            return Err(GridError::EmptyAlphabet);
        }
        let mut sorted = chars.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(GridError::DuplicateChar(w[0]));
            }
        }
        if sorted.binary_search(&' ').is_ok() {
            return Err(GridError::SpaceInAlphabet);
        }
        Ok(Alphabet { chars, sorted })
    }

    /// The 94 printable non-space ASCII characters, `!` through `~`.
    pub fn printable() -> Self {
        Alphabet::new('!'..='~').expect("printable ASCII is a valid alphabet")
    }

    pub fn contains(&self, c: char) -> bool {
        self.sorted.binary_search(&c).is_ok()
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::printable()
    }
}

/// Shared context for every password: dimensions, alphabet and the
/// parameters of the per-account colorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    dims: Dims,
    alphabet: Alphabet,
    palette_size: u8,
    color_seed: u64,
}

impl GridSpec {
    pub const DEFAULT_ROWS: usize = 12;
    pub const DEFAULT_COLS: usize = 12;
    pub const DEFAULT_PALETTE: u8 = 6;

    pub fn new(
        dims: Dims,
        alphabet: Alphabet,
        palette_size: u8,
        color_seed: u64,
    ) -> Result<Self, GridError> {
        if palette_size == 0 {
            return Err(GridError::EmptyPalette);
        }
        Ok(GridSpec {
            dims,
            alphabet,
            palette_size,
            color_seed,
        })
    }

    /// 12x12, six colors, printable alphabet.
    pub fn standard(color_seed: u64) -> Self {
        GridSpec {
            dims: Dims::new(Self::DEFAULT_ROWS, Self::DEFAULT_COLS).expect("12x12 is valid"),
            alphabet: Alphabet::printable(),
            palette_size: Self::DEFAULT_PALETTE,
            color_seed,
        }
    }

    /// Printable alphabet and default palette on arbitrary dimensions.
    pub fn with_dims(dims: Dims, color_seed: u64) -> Self {
        GridSpec {
            dims,
            alphabet: Alphabet::printable(),
            palette_size: Self::DEFAULT_PALETTE,
            color_seed,
        }
    }

    /// Grid whose colorization is seeded by `username`.
    pub fn for_user(username: &str, dims: Dims, palette_size: u8) -> Result<Self, GridError> {
        let seed = crate::color::seed_from_username(username, dims)?;
        GridSpec::new(dims, Alphabet::printable(), palette_size, seed)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn rows(&self) -> usize {
        self.dims.rows()
    }

    pub fn cols(&self) -> usize {
        self.dims.cols()
    }

    pub fn cells(&self) -> usize {
        self.dims.cells()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn palette_size(&self) -> u8 {
        self.palette_size
    }

    pub fn color_seed(&self) -> u64 {
        self.color_seed
    }

    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Self {
        self.alphabet = alphabet;
        self
    }

    pub fn check_char(&self, c: char) -> Result<char, GridError> {
        if self.alphabet.contains(c) {
            Ok(c)
        } else {
            Err(GridError::BadChar(c))
        }
    }
}

/// Live state of one password entry attempt.
///
/// There is no default cursor: typing before a cell is selected fails with
/// [`GridError::NoCursor`]. The direction starts out as east.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntrySession {
    grid: GridSpec,
    cursor: Option<Coord>,
    direction: Direction,
    cells: Vec<Option<char>>,
}

impl EntrySession {
    pub fn new(grid: GridSpec) -> Self {
        let cells = vec![None; grid.cells()];
        EntrySession {
            grid,
            cursor: None,
            direction: Direction::E,
            cells,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn cursor(&self) -> Option<Coord> {
        self.cursor
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn cell(&self, c: Coord) -> Option<char> {
        if self.grid.dims.contains(c) {
            self.cells[self.grid.dims.index(c)]
        } else {
            None
        }
    }

    /// Number of occupied cells.
    pub fn filled(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn set_cursor(&mut self, at: Coord) -> Result<(), GridError> {
        self.cursor = Some(self.grid.dims.check(at)?);
        Ok(())
    }

    pub fn set_direction(&mut self, dir: Direction) {
        self.direction = dir;
    }

    /// Clears one cell. The cursor does not move.
    pub fn erase_at(&mut self, at: Coord) -> Result<(), GridError> {
        let at = self.grid.dims.check(at)?;
        let i = self.grid.dims.index(at);
        self.cells[i] = None;
        Ok(())
    }

    /// Writes `c` under the cursor, replacing whatever was there, then
    /// advances the cursor one step in the current direction.
    pub fn input_char(&mut self, c: char) -> Result<(), GridError> {
        let cursor = self.cursor.ok_or(GridError::NoCursor)?;
        self.grid.check_char(c)?;
        let i = self.grid.dims.index(cursor);
        self.cells[i] = Some(c);
        self.cursor = Some(advance(self.grid.dims, cursor, self.direction));
        Ok(())
    }

    /// Types a whole string. Nothing is written unless every character is
    /// acceptable.
    pub fn type_str(&mut self, s: &str) -> Result<(), GridError> {
        if self.cursor.is_none() {
            return Err(GridError::NoCursor);
        }
        for c in s.chars() {
            self.grid.check_char(c)?;
        }
        for c in s.chars() {
            self.input_char(c)?;
        }
        Ok(())
    }

    /// The occupied cells as a password. Fails when the grid is empty.
    pub fn placement(&self) -> Result<Placement, GridError> {
        let dims = self.grid.dims;
        let entries: Vec<(Coord, char)> = self
            .cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (dims.coord(i), c)))
            .collect();
        if entries.is_empty() {
            return Err(GridError::EmptyPlacement);
        }
        Ok(Placement::from_sorted_unchecked(dims, entries))
    }

    /// Row-major, space-padded rendering of the grid; defined even when empty.
    pub fn canonical(&self) -> CanonicalForm {
        CanonicalForm::from_cells(self.grid.dims, self.cells.iter().copied())
    }

    /// Clears all cells and the cursor.
    pub fn reset(&mut self) {
        self.cells.iter_mut().for_each(|c| *c = None);
        self.cursor = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g12() -> GridSpec {
        GridSpec::standard(0)
    }

    #[test]
    fn advance_wraps_each_axis() {
        let d = g12().dims();
        assert_eq!(
            advance(d, Coord::new(0, 11), Direction::E),
            Coord::new(0, 0)
        );
        assert_eq!(
            advance(d, Coord::new(0, 0), Direction::NW),
            Coord::new(11, 11)
        );
        assert_eq!(advance(d, Coord::new(5, 5), Direction::S), Coord::new(6, 5));
    }

    #[test]
    fn typing_places_adjacent_chars() {
        let mut s = EntrySession::new(g12());
        s.set_cursor(Coord::new(2, 2)).unwrap();
        s.type_str("Pa").unwrap();
        assert_eq!(s.cell(Coord::new(2, 2)), Some('P'));
        assert_eq!(s.cell(Coord::new(2, 3)), Some('a'));
        assert_eq!(s.cursor(), Some(Coord::new(2, 4)));
    }

    #[test]
    fn typing_wraps_within_row() {
        let mut s = EntrySession::new(g12());
        s.set_cursor(Coord::new(0, 11)).unwrap();
        s.type_str("ab").unwrap();
        assert_eq!(s.cell(Coord::new(0, 11)), Some('a'));
        assert_eq!(s.cell(Coord::new(0, 0)), Some('b'));
    }

    #[test]
    fn typing_overwrites() {
        let mut s = EntrySession::new(g12());
        s.set_cursor(Coord::new(3, 3)).unwrap();
        s.input_char('x').unwrap();
        s.set_cursor(Coord::new(3, 3)).unwrap();
        s.input_char('y').unwrap();
        assert_eq!(s.cell(Coord::new(3, 3)), Some('y'));
        assert_eq!(s.filled(), 1);
    }

    #[test]
    fn no_cursor_is_rejected() {
        let mut s = EntrySession::new(g12());
        assert_eq!(s.input_char('a'), Err(GridError::NoCursor));
        assert_eq!(s.type_str("ab"), Err(GridError::NoCursor));
        assert_eq!(s.filled(), 0);
    }

    #[test]
    fn space_and_foreign_chars_are_rejected() {
        let mut s = EntrySession::new(g12());
        s.set_cursor(Coord::new(0, 0)).unwrap();
        assert_eq!(s.input_char(' '), Err(GridError::BadChar(' ')));
        assert_eq!(s.input_char('é'), Err(GridError::BadChar('é')));
        // all-or-nothing
        assert_eq!(s.type_str("ab c"), Err(GridError::BadChar(' ')));
        assert_eq!(s.filled(), 0);
        assert_eq!(s.cursor(), Some(Coord::new(0, 0)));
    }

    #[test]
    fn direction_south_gives_vertical_pair() {
        let mut s = EntrySession::new(g12());
        s.set_cursor(Coord::new(4, 4)).unwrap();
        s.set_direction(Direction::S);
        s.type_str("ab").unwrap();
        assert_eq!(s.cell(Coord::new(4, 4)), Some('a'));
        assert_eq!(s.cell(Coord::new(5, 4)), Some('b'));
    }

    #[test]
    fn erase_on_empty_is_noop_and_keeps_cursor() {
        let mut s = EntrySession::new(g12());
        s.set_cursor(Coord::new(1, 1)).unwrap();
        let before = s.clone();
        s.erase_at(Coord::new(7, 7)).unwrap();
        assert_eq!(s, before);

        s.type_str("q").unwrap();
        s.erase_at(Coord::new(1, 1)).unwrap();
        assert_eq!(s.filled(), 0);
        assert_eq!(s.cursor(), Some(Coord::new(1, 2)));
    }

    #[test]
    fn set_cursor_bounds() {
        let mut s = EntrySession::new(g12());
        s.set_cursor(Coord::new(5, 7)).unwrap();
        assert_eq!(s.cursor(), Some(Coord::new(5, 7)));
        assert_eq!(s.filled(), 0);
        assert!(matches!(
            s.set_cursor(Coord::new(12, 0)),
            Err(GridError::OutOfBounds { .. })
        ));
        assert!(s.erase_at(Coord::new(0, 12)).is_err());
    }

    #[test]
    fn dims_validation() {
        assert!(Dims::new(1, 5).is_err());
        assert!(Dims::new(64, 64).is_ok());
        assert!(Dims::new(64, 65).is_err());
        assert_eq!("12x12".parse::<Dims>().unwrap(), Dims::new(12, 12).unwrap());
        assert!("12by12".parse::<Dims>().is_err());
    }

    #[test]
    fn alphabet_validation() {
        assert_eq!(Alphabet::printable().len(), 94);
        assert_eq!(
            Alphabet::new("ab c".chars()),
            Err(GridError::SpaceInAlphabet)
        );
        assert_eq!(
            Alphabet::new("abca".chars()),
            Err(GridError::DuplicateChar('a'))
        );
        assert_eq!(Alphabet::new("".chars()), Err(GridError::EmptyAlphabet));
    }

    #[test]
    fn direction_parse_and_opposite() {
        for d in Direction::ALL {
            assert_eq!(d.name().parse::<Direction>().unwrap(), d);
            assert_eq!(d.opposite().opposite(), d);
            let (dr, dc) = d.delta();
            assert!(dr.abs() <= 1 && dc.abs() <= 1 && (dr, dc) != (0, 0));
        }
        assert_eq!(Direction::NE.opposite(), Direction::SW);
    }
}
