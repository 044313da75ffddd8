//! Dictionary-expansion attacks on grid passwords.
//!
//! A base dictionary word becomes many candidate placements depending on how
//! the attacker assumes it was typed: from the top-left corner only, from any
//! cell, in either horizontal direction, in any of the eight directions, or
//! along bounded-turn paths. Counting-only strategies measure how large a
//! dictionary would have to be without enumerating it.

mod engine;
mod generate;
mod tradeoff;

pub use engine::{
    crack, crack_with, Checkpoint, CrackConfig, CrackProgress, CrackReport, Recovery,
};
pub use generate::{generate_candidates, Candidate, CandidateSet};
pub use tradeoff::{tradeoff_csv, tradeoff_curve, TradeoffPoint, TRADEOFF_HEADER};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::credential::CredentialError;
use crate::entropy::{perm_count, EntropyError};
use crate::exec::ExecError;
use crate::grid::Dims;
use crate::kdf::KdfError;

/// Default ceiling on bounded-snake candidates per word.
pub const DEFAULT_SNAKE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum CrackError {
    #[error("word of length {length} does not fit a grid of {cells} cells")]
    TooLong { length: usize, cells: usize },
    #[error("word is empty")]
    EmptyWord,
    #[error("word contains {0:?}, which cannot be placed")]
    BadChar(char),
    #[error("strategy {0} only counts candidates; it cannot enumerate them")]
    NonEnumerable(StrategyKind),
    #[error("snake enumeration exceeded its budget of {0} candidates")]
    BudgetExceeded(u64),
    #[error("dictionary is empty")]
    EmptyDictionary,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("corpus mixes grid sizes {0} and {1}")]
    MixedGrids(Dims, Dims),
    #[error("bad credential file: {0}")]
    BadCredFile(#[from] CredentialError),
    #[error("unknown strategy {0:?}")]
    UnknownStrategy(String),
    #[error(transparent)]
    Kdf(#[from] KdfError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyKind {
    /// Typed left to right from the top-left cell.
    FixedTopLeftHorizontal,
    /// Typed left to right from any cell.
    HorizontalAnyStartLR,
    /// Typed left to right or right to left from any cell.
    HorizontalAnyStartBothDir,
    /// Typed in any of the eight directions from any cell.
    StraightAnyDirection,
    /// Self-avoiding 8-adjacent paths from any cell with at most
    /// `max_turns` direction changes.
    SnakeBounded { max_turns: usize },
    /// Characters in any distinct cells; counted, never enumerated.
    PointsCountOnly,
}

impl StrategyKind {
    pub fn is_enumerable(self) -> bool {
        !matches!(self, StrategyKind::PointsCountOnly)
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyKind::FixedTopLeftHorizontal => f.write_str("fixed-top-left"),
            StrategyKind::HorizontalAnyStartLR => f.write_str("horizontal-lr"),
            StrategyKind::HorizontalAnyStartBothDir => f.write_str("horizontal-both"),
            StrategyKind::StraightAnyDirection => f.write_str("straight-any"),
            StrategyKind::SnakeBounded { max_turns } => write!(f, "snake-{max_turns}"),
            StrategyKind::PointsCountOnly => f.write_str("points"),
        }
    }
}

impl FromStr for StrategyKind {
    type Err = CrackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "fixed-top-left" => StrategyKind::FixedTopLeftHorizontal,
            "horizontal-lr" => StrategyKind::HorizontalAnyStartLR,
            "horizontal-both" => StrategyKind::HorizontalAnyStartBothDir,
            "straight-any" => StrategyKind::StraightAnyDirection,
            "points" => StrategyKind::PointsCountOnly,
            other => {
                let turns = other
                    .strip_prefix("snake-")
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| CrackError::UnknownStrategy(other.to_string()))?;
                StrategyKind::SnakeBounded { max_turns: turns }
            }
        })
    }
}

/// A strategy applied to a particular grid size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttackStrategy {
    pub kind: StrategyKind,
    pub dims: Dims,
    /// Maximum snake candidates per word before enumeration fails.
    pub snake_budget: u64,
}

impl AttackStrategy {
    pub fn new(kind: StrategyKind, dims: Dims) -> Self {
        AttackStrategy {
            kind,
            dims,
            snake_budget: DEFAULT_SNAKE_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.snake_budget = budget;
        self
    }
}

/// How many raw candidates one word of `word_length` characters expands to.
///
/// Typing-based strategies count (start cell, direction sequence) pairs, so
/// words whose placements coincide (palindromes, repeated letters) are
/// counted once per way of typing them; [`CandidateSet::len`] gives the
/// deduplicated count.
pub fn expansion_factor(
    strategy: &AttackStrategy,
    word_length: usize,
) -> Result<BigUint, CrackError> {
    let cells = strategy.dims.cells();
    if word_length > cells {
        return Err(CrackError::TooLong {
            length: word_length,
            cells,
        });
    }
    let n = cells as u64;
    Ok(match strategy.kind {
        StrategyKind::FixedTopLeftHorizontal => BigUint::from(1u32),
        StrategyKind::HorizontalAnyStartLR => BigUint::from(n),
        StrategyKind::HorizontalAnyStartBothDir => BigUint::from(2 * n),
        StrategyKind::StraightAnyDirection => BigUint::from(8 * n),
        StrategyKind::SnakeBounded { max_turns } => {
            BigUint::from(generate::count_snakes(strategy, word_length, max_turns)?)
        }
        StrategyKind::PointsCountOnly => perm_count(n, word_length as u64)?,
    })
}
