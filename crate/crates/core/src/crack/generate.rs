use std::collections::HashSet;

use super::{AttackStrategy, CrackError, StrategyKind};
use crate::grid::{advance, Coord, Dims, Direction};
use crate::placement::Placement;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    /// Lowest start cell from which the strategy produces this placement.
    pub start: Coord,
    pub placement: Placement,
}

/// Distinct placements of one word under one strategy, grouped by start cell
/// in row-major order.
#[derive(Debug, Clone, Default)]
pub struct CandidateSet {
    raw: u64,
    candidates: Vec<Candidate>,
}

impl CandidateSet {
    /// Candidates produced before removing duplicates.
    pub fn raw_count(&self) -> u64 {
        self.raw
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Candidate> {
        self.candidates.iter()
    }

    pub fn placements(&self) -> impl Iterator<Item = &Placement> {
        self.candidates.iter().map(|c| &c.placement)
    }

    pub fn into_placements(self) -> Vec<Placement> {
        self.candidates.into_iter().map(|c| c.placement).collect()
    }

    /// Disjoint runs sharing a start cell, for independent workers.
    pub fn partitions(&self) -> Vec<&[Candidate]> {
        self.candidates
            .chunk_by(|a, b| a.start == b.start)
            .collect()
    }
}

/// Expands `word` into every distinct placement the strategy allows, each
/// exactly once.
pub fn generate_candidates(
    strategy: &AttackStrategy,
    word: &str,
) -> Result<CandidateSet, CrackError> {
    let chars: Vec<char> = word.chars().collect();
    check_word(strategy.dims, &chars)?;
    if !strategy.kind.is_enumerable() {
        return Err(CrackError::NonEnumerable(strategy.kind));
    }
    let mut seen: HashSet<Placement> = HashSet::new();
    let mut out = CandidateSet::default();
    for_each_typing(strategy, chars.len(), |start, steps| {
        out.raw += 1;
        let p = type_word(strategy.dims, start, steps, &chars);
        if seen.insert(p.clone()) {
            out.candidates.push(Candidate {
                start,
                placement: p,
            });
        }
    })?;
    Ok(out)
}

pub(super) fn check_word(dims: Dims, chars: &[char]) -> Result<(), CrackError> {
    if chars.is_empty() {
        return Err(CrackError::EmptyWord);
    }
    if chars.len() > dims.cells() {
        return Err(CrackError::TooLong {
            length: chars.len(),
            cells: dims.cells(),
        });
    }
    if let Some(&c) = chars.iter().find(|c| c.is_whitespace() || c.is_control()) {
        return Err(CrackError::BadChar(c));
    }
    Ok(())
}

pub(super) fn count_snakes(
    strategy: &AttackStrategy,
    length: usize,
    max_turns: usize,
) -> Result<u64, CrackError> {
    let mut n = 0u64;
    let s = AttackStrategy {
        kind: StrategyKind::SnakeBounded { max_turns },
        ..*strategy
    };
    for_each_typing(&s, length, |_, _| n += 1)?;
    Ok(n)
}

/// Types `chars` from `start`, taking `steps[i]` after the `i`th character.
/// Later characters overwrite earlier ones on the same cell.
fn type_word(dims: Dims, start: Coord, steps: &[Direction], chars: &[char]) -> Placement {
    let mut cells: Vec<(Coord, char)> = Vec::with_capacity(chars.len());
    let mut at = start;
    for (i, &c) in chars.iter().enumerate() {
        if i > 0 {
            at = advance(dims, at, steps[i - 1]);
        }
        match cells.iter_mut().find(|e| e.0 == at) {
            Some(e) => e.1 = c,
            None => cells.push((at, c)),
        }
    }
    cells.sort_unstable_by_key(|e| e.0);
    Placement::from_sorted_unchecked(dims, cells)
}

/// Calls `f(start, steps)` for every way the strategy types a word of
/// `length` characters, starts in row-major order.
fn for_each_typing(
    strategy: &AttackStrategy,
    length: usize,
    mut f: impl FnMut(Coord, &[Direction]),
) -> Result<(), CrackError> {
    let dims = strategy.dims;
    let steps = length.saturating_sub(1);
    let straight = |dirs: &[Direction],
                    starts: &mut dyn Iterator<Item = Coord>,
                    f: &mut dyn FnMut(Coord, &[Direction])| {
        let runs: Vec<Vec<Direction>> = dirs.iter().map(|&d| vec![d; steps]).collect();
        for start in starts {
            for run in &runs {
                f(start, run);
            }
        }
    };
    match strategy.kind {
        StrategyKind::FixedTopLeftHorizontal => straight(
            &[Direction::E],
            &mut std::iter::once(Coord::new(0, 0)),
            &mut f,
        ),
        StrategyKind::HorizontalAnyStartLR => straight(&[Direction::E], &mut dims.coords(), &mut f),
        StrategyKind::HorizontalAnyStartBothDir => {
            straight(&[Direction::E, Direction::W], &mut dims.coords(), &mut f)
        }
        StrategyKind::StraightAnyDirection => straight(&Direction::ALL, &mut dims.coords(), &mut f),
        StrategyKind::SnakeBounded { max_turns } => {
            let mut walk = SnakeWalk {
                dims,
                steps,
                max_turns,
                budget: strategy.snake_budget,
                emitted: 0,
                dirs: Vec::with_capacity(steps),
                cells: Vec::with_capacity(length),
            };
            for start in dims.coords() {
                walk.cells.push(start);
                walk.extend(start, 0, &mut f)?;
                walk.cells.pop();
            }
        }
        StrategyKind::PointsCountOnly => return Err(CrackError::NonEnumerable(strategy.kind)),
    }
    Ok(())
}

struct SnakeWalk {
    dims: Dims,
    steps: usize,
    max_turns: usize,
    budget: u64,
    emitted: u64,
    dirs: Vec<Direction>,
    cells: Vec<Coord>,
}

impl SnakeWalk {
    fn extend(
        &mut self,
        at: Coord,
        turns: usize,
        f: &mut impl FnMut(Coord, &[Direction]),
    ) -> Result<(), CrackError> {
        if self.dirs.len() == self.steps {
            self.emitted += 1;
            if self.emitted > self.budget {
                return Err(CrackError::BudgetExceeded(self.budget));
            }
            f(self.cells[0], &self.dirs);
            return Ok(());
        }
        for d in Direction::ALL {
            let t = turns + usize::from(self.dirs.last().is_some_and(|&l| l != d));
            if t > self.max_turns {
                continue;
            }
            let next = advance(self.dims, at, d);
            if self.cells.contains(&next) {
                continue;
            }
            self.dirs.push(d);
            self.cells.push(next);
            let r = self.extend(next, t, f);
            self.cells.pop();
            self.dirs.pop();
            r?;
        }
        Ok(())
    }
}
