use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;

use super::generate::{check_word, generate_candidates};
use super::{expansion_factor, AttackStrategy, CrackError, StrategyKind, DEFAULT_SNAKE_BUDGET};
use crate::exec::Executor;
use crate::placement::Placement;

/// Dictionary size needed by a strategy and the share of a plaintext corpus
/// it recovers.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffPoint {
    pub strategy: StrategyKind,
    pub dictionary_size: BigUint,
    pub recovered: usize,
    pub corpus_size: usize,
    pub recovery_fraction: f64,
}

pub const TRADEOFF_HEADER: &str = "strategy,dictionary_size,recovery_fraction";

pub fn tradeoff_csv(points: &[TradeoffPoint]) -> String {
    let mut out = format!("{TRADEOFF_HEADER}\n");
    for p in points {
        out.push_str(&format!(
            "{},{},{}\n",
            p.strategy, p.dictionary_size, p.recovery_fraction
        ));
    }
    out
}

/// Evaluates each strategy against a corpus of known placements.
///
/// The dictionary size of a strategy is the sum of its raw expansion factor
/// over the usable words. Words that cannot be placed on the corpus grid are
/// ignored. Points are sorted by dictionary size, ties keeping input order.
pub fn tradeoff_curve(
    corpus: &[Placement],
    words: &[String],
    strategies: &[StrategyKind],
    exec: &Executor,
) -> Result<Vec<TradeoffPoint>, CrackError> {
    let dims = corpus.first().ok_or(CrackError::EmptyCorpus)?.dims();
    if let Some(p) = corpus.iter().find(|p| p.dims() != dims) {
        return Err(CrackError::MixedGrids(dims, p.dims()));
    }
    let words: Vec<&String> = words
        .iter()
        .filter(|w| check_word(dims, &w.chars().collect::<Vec<_>>()).is_ok())
        .collect();
    if words.is_empty() {
        return Err(CrackError::EmptyDictionary);
    }

    let mut index: HashMap<&Placement, Vec<usize>> = HashMap::new();
    for (i, p) in corpus.iter().enumerate() {
        index.entry(p).or_default().push(i);
    }

    let mut points = Vec::with_capacity(strategies.len());
    for &kind in strategies {
        let strategy = AttackStrategy::new(kind, dims).with_budget(DEFAULT_SNAKE_BUDGET);
        let mut size = BigUint::zero();
        for w in &words {
            size += expansion_factor(&strategy, w.chars().count())?;
        }
        let hit = if kind.is_enumerable() {
            enumerated_hits(&strategy, &words, &index, corpus.len(), exec)?
        } else {
            multiset_hits(corpus, &words)
        };
        let recovered = hit.iter().filter(|&&h| h).count();
        points.push(TradeoffPoint {
            strategy: kind,
            dictionary_size: size,
            recovered,
            corpus_size: corpus.len(),
            recovery_fraction: recovered as f64 / corpus.len() as f64,
        });
    }
    points.sort_by(|a, b| a.dictionary_size.cmp(&b.dictionary_size));
    Ok(points)
}

fn enumerated_hits(
    strategy: &AttackStrategy,
    words: &[&String],
    index: &HashMap<&Placement, Vec<usize>>,
    n: usize,
    exec: &Executor,
) -> Result<Vec<bool>, CrackError> {
    let (hit, err) = exec.fold_reduce(
        words,
        || (vec![false; n], None::<CrackError>),
        |(mut hit, err), w| {
            if err.is_some() {
                return (hit, err);
            }
            match generate_candidates(strategy, w) {
                Ok(set) => {
                    for p in set.placements() {
                        if let Some(ids) = index.get(p) {
                            ids.iter().for_each(|&i| hit[i] = true);
                        }
                    }
                    (hit, None)
                }
                Err(e) => (hit, Some(e)),
            }
        },
        |(mut a, ea), (b, eb)| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x |= y);
            (a, ea.or(eb))
        },
    );
    match err {
        Some(e) => Err(e),
        None => Ok(hit),
    }
}

/// Arbitrary-cell placement recovers exactly the passwords whose characters
/// form the same multiset as some word.
fn multiset_hits(corpus: &[Placement], words: &[&String]) -> Vec<bool> {
    let sorted = |it: &mut dyn Iterator<Item = char>| {
        let mut v: Vec<char> = it.collect();
        v.sort_unstable();
        v
    };
    let keys: std::collections::HashSet<Vec<char>> =
        words.iter().map(|w| sorted(&mut w.chars())).collect();
    corpus
        .iter()
        .map(|p| keys.contains(&sorted(&mut p.entries().iter().map(|e| e.1))))
        .collect()
}
