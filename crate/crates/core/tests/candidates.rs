use std::collections::HashSet;

use num_bigint::BigUint;
use proptest::prelude::*;
use spartan_core::crack::{expansion_factor, generate_candidates, AttackStrategy, StrategyKind};
use spartan_core::entropy::perm_count;
use spartan_core::grid::{Coord, Dims, Direction, EntrySession, GridSpec};
use spartan_core::Placement;

type Case = (StrategyKind, Vec<Coord>, Vec<Vec<Direction>>, bool);

/// Types `word` through an entry session for every allowed start and
/// direction sequence, keeping only walks that never revisit a cell when
/// `simple` is set.
fn brute_force(
    dims: Dims,
    word: &str,
    starts: &[Coord],
    seqs: &[Vec<Direction>],
    simple: bool,
) -> (u64, HashSet<Placement>) {
    let grid = GridSpec::with_dims(dims, 0);
    let mut raw = 0;
    let mut out = HashSet::new();
    for &start in starts {
        for seq in seqs {
            let mut s = EntrySession::new(grid.clone());
            s.set_cursor(start).unwrap();
            for (i, ch) in word.chars().enumerate() {
                if let Some(&d) = seq.get(i) {
                    s.set_direction(d);
                }
                s.input_char(ch).unwrap();
            }
            let p = s.placement().unwrap();
            if simple && p.len() != word.chars().count() {
                continue;
            }
            raw += 1;
            out.insert(p);
        }
    }
    (raw, out)
}

fn all_sequences(steps: usize) -> Vec<Vec<Direction>> {
    let mut seqs = vec![Vec::new()];
    for _ in 0..steps {
        seqs = seqs
            .into_iter()
            .flat_map(|s| {
                Direction::ALL.into_iter().map(move |d| {
                    let mut t = s.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    seqs
}

fn turns(seq: &[Direction]) -> usize {
    seq.windows(2).filter(|w| w[0] != w[1]).count()
}

/// One word per repetition pattern of length 1..=4 (the generator only sees
/// whether two characters are equal), plus a few concrete spellings.
fn words() -> Vec<String> {
    fn grow(prefix: String, distinct: u8, len: usize, out: &mut Vec<String>) {
        if prefix.len() == len {
            out.push(prefix);
            return;
        }
        for c in 0..=distinct {
            let next = distinct.max(c + 1);
            grow(format!("{prefix}{}", (b'a' + c) as char), next, len, out);
        }
    }
    let mut out = Vec::new();
    for len in 1..=4 {
        grow(String::new(), 0, len, &mut out);
    }
    out.extend(["dcba", "x!~x", "Zz9Z"].map(String::from));
    out
}

#[test]
fn generator_matches_brute_force_on_small_grids() {
    let words = words();
    for rows in 2..=4 {
        for cols in 2..=4 {
            let dims = Dims::new(rows, cols).unwrap();
            let every: Vec<Coord> = dims.coords().collect();
            for word in &words {
                let n = word.chars().count();
                if n > dims.cells() {
                    continue;
                }
                let steps = n - 1;
                let seqs_all = all_sequences(steps);
                let cases: Vec<Case> = vec![
                    (
                        StrategyKind::FixedTopLeftHorizontal,
                        vec![Coord::new(0, 0)],
                        vec![vec![Direction::E; steps]],
                        false,
                    ),
                    (
                        StrategyKind::HorizontalAnyStartLR,
                        every.clone(),
                        vec![vec![Direction::E; steps]],
                        false,
                    ),
                    (
                        StrategyKind::HorizontalAnyStartBothDir,
                        every.clone(),
                        vec![vec![Direction::E; steps], vec![Direction::W; steps]],
                        false,
                    ),
                    (
                        StrategyKind::StraightAnyDirection,
                        every.clone(),
                        Direction::ALL.iter().map(|&d| vec![d; steps]).collect(),
                        false,
                    ),
                ]
                .into_iter()
                .chain((0..=3).map(|k| {
                    let seqs = seqs_all.iter().filter(|s| turns(s) <= k).cloned().collect();
                    (
                        StrategyKind::SnakeBounded { max_turns: k },
                        every.clone(),
                        seqs,
                        true,
                    )
                }))
                .collect();
                for (kind, starts, seqs, simple) in cases {
                    let strategy = AttackStrategy::new(kind, dims);
                    let set = generate_candidates(&strategy, word).unwrap();
                    let (raw, expected) = brute_force(dims, word, &starts, &seqs, simple);
                    let got: HashSet<Placement> = set.placements().cloned().collect();
                    assert_eq!(
                        got.len(),
                        set.len(),
                        "{kind} {dims} {word}: duplicates emitted"
                    );
                    assert_eq!(got, expected, "{kind} {dims} {word}");
                    assert_eq!(set.raw_count(), raw, "{kind} {dims} {word}");
                    assert_eq!(
                        expansion_factor(&strategy, n).unwrap(),
                        BigUint::from(raw),
                        "{kind} {dims} {word}"
                    );
                }
            }
        }
    }
}

#[test]
fn partitions_are_disjoint_and_cover() {
    let strategy =
        AttackStrategy::new(StrategyKind::StraightAnyDirection, Dims::new(6, 7).unwrap());
    let set = generate_candidates(&strategy, "abab").unwrap();
    let parts = set.partitions();
    let mut starts = HashSet::new();
    let mut total = 0;
    for part in &parts {
        assert!(part.iter().all(|c| c.start == part[0].start));
        assert!(starts.insert(part[0].start));
        total += part.len();
    }
    assert_eq!(total, set.len());
}

#[test]
fn distinct_letters_hit_the_factor_exactly() {
    let dims = Dims::new(12, 12).unwrap();
    for kind in [
        StrategyKind::HorizontalAnyStartLR,
        StrategyKind::HorizontalAnyStartBothDir,
        StrategyKind::StraightAnyDirection,
    ] {
        let s = AttackStrategy::new(kind, dims);
        let set = generate_candidates(&s, "password").unwrap();
        assert_eq!(
            BigUint::from(set.len()),
            expansion_factor(&s, 8).unwrap(),
            "{kind}"
        );
    }
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, k| acc * k)
}

proptest! {
    #[test]
    fn perm_count_matches_factorial_ratio(n in 0u64..=200, k in 0u64..=20) {
        prop_assume!(k <= n);
        prop_assert_eq!(perm_count(n, k).unwrap(), factorial(n) / factorial(n - k));
    }

    #[test]
    fn points_factor_is_perm(rows in 2usize..=12, cols in 2usize..=12, len in 1usize..=10) {
        let dims = Dims::new(rows, cols).unwrap();
        prop_assume!(len <= dims.cells());
        let s = AttackStrategy::new(StrategyKind::PointsCountOnly, dims);
        prop_assert_eq!(
            expansion_factor(&s, len).unwrap(),
            perm_count(dims.cells() as u64, len as u64).unwrap()
        );
    }
}
