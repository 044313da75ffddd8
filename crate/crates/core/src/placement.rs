use std::collections::HashSet;

use crate::grid::{Coord, Dims, GridError, GridSpec};

/// A grid password: characters and the cells they occupy.
///
/// Entries are kept in row-major order with no repeated cell, so two
/// placements are equal exactly when they describe the same grid contents.
/// Typing order is not part of a placement.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Placement {
    dims: Dims,
    entries: Vec<(Coord, char)>,
}

impl Placement {
    /// Validates bounds, alphabet membership and cell uniqueness.
    pub fn new(
        grid: &GridSpec,
        entries: impl IntoIterator<Item = (Coord, char)>,
    ) -> Result<Self, GridError> {
        let dims = grid.dims();
        let mut entries: Vec<(Coord, char)> = entries.into_iter().collect();
        if entries.is_empty() {
            return Err(GridError::EmptyPlacement);
        }
        for &(at, c) in &entries {
            dims.check(at)?;
            grid.check_char(c)?;
        }
        entries.sort_unstable_by_key(|e| e.0);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(GridError::DuplicateCoord {
                    row: w[0].0.row as usize,
                    col: w[0].0.col as usize,
                });
            }
        }
        Ok(Placement { dims, entries })
    }

    /// Caller guarantees entries are non-empty, in bounds, sorted and unique.
    pub(crate) fn from_sorted_unchecked(dims: Dims, entries: Vec<(Coord, char)>) -> Self {
        debug_assert!(!entries.is_empty());
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Placement { dims, entries }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn entries(&self) -> &[(Coord, char)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, at: Coord) -> Option<char> {
        self.entries
            .binary_search_by_key(&at, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn cells(&self) -> impl Iterator<Item = Coord> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn cell_set(&self) -> HashSet<Coord> {
        self.cells().collect()
    }

    /// Characters in row-major cell order.
    pub fn text(&self) -> String {
        self.entries.iter().map(|e| e.1).collect()
    }

    /// Shifts every cell by `(dr, dc)` without wrapping. `None` if any cell
    /// would leave the grid.
    pub fn translate(&self, dr: i32, dc: i32) -> Option<Placement> {
        let rows = self.dims.rows() as i32;
        let cols = self.dims.cols() as i32;
        let entries = self
            .entries
            .iter()
            .map(|&(at, c)| {
                let r = at.row as i32 + dr;
                let k = at.col as i32 + dc;
                ((0..rows).contains(&r) && (0..cols).contains(&k))
                    .then(|| (Coord::new(r as usize, k as usize), c))
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Placement {
            dims: self.dims,
            entries,
        })
    }

    /// Replaces the character at `at`. `None` if the cell is empty.
    pub fn with_char(&self, at: Coord, c: char) -> Option<Placement> {
        let i = self.entries.binary_search_by_key(&at, |e| e.0).ok()?;
        let mut entries = self.entries.clone();
        entries[i].1 = c;
        Some(Placement {
            dims: self.dims,
            entries,
        })
    }
}
