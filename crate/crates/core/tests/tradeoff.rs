use spartan_core::crack::{tradeoff_csv, tradeoff_curve, CrackError, StrategyKind};
use spartan_core::grid::{Coord, Dims, Direction, EntrySession, GridSpec};
use spartan_core::{Executor, Placement};

const WORDS: [&str; 20] = [
    "monkey", "dragon", "shadow", "master", "sunshine", "princess", "football", "charlie",
    "welcome", "jordan", "hunter", "ranger", "buster", "thomas", "tigger", "robert", "soccer",
    "batman", "andrew", "harley",
];

fn typed(word: &str, start: Coord, dirs: &[Direction]) -> Placement {
    let mut s = EntrySession::new(GridSpec::standard(0));
    s.set_cursor(start).unwrap();
    for (i, ch) in word.chars().enumerate() {
        s.set_direction(dirs[i.min(dirs.len() - 1)]);
        s.input_char(ch).unwrap();
    }
    s.placement().unwrap()
}

fn scattered(word: &str, offset: usize) -> Placement {
    let cells = word.chars().enumerate().map(|(i, ch)| {
        let k = offset + 3 * i;
        (Coord::new((k / 6 * 2) % 12, (k % 6) * 2), ch)
    });
    Placement::new(&GridSpec::standard(0), cells).unwrap()
}

struct Planted {
    corpus: Vec<Placement>,
    top_left: usize,
    lr: usize,
    rl: usize,
    other_straight: usize,
    snakes: usize,
    points: usize,
}

/// 100 placements with known membership per strategy class.
fn planted() -> Planted {
    use Direction::*;
    let mut corpus = Vec::new();
    let w = |i: usize| WORDS[i % WORDS.len()];
    for i in 0..10 {
        corpus.push(typed(w(i), Coord::new(0, 0), &[E]));
    }
    for i in 0..15 {
        corpus.push(typed(w(i + 3), Coord::new(1 + i % 11, 1 + i % 9), &[E]));
    }
    for i in 0..8 {
        corpus.push(typed(w(i + 5), Coord::new(i, 11), &[W]));
    }
    for i in 0..12 {
        let dir = [S, N, SE, NE, SW, NW][i % 6];
        corpus.push(typed(w(i + 7), Coord::new(i, i % 12), &[dir]));
    }
    for i in 0..5 {
        // three east, the rest south: one turn
        corpus.push(typed(w(i + 2), Coord::new(2 * i, 1), &[E, E, E, S]));
    }
    for i in 0..20 {
        corpus.push(scattered(w(i), i));
    }
    for i in 0..30 {
        let word = format!("Q{}Z{}", w(i), i % 10);
        corpus.push(typed(&word, Coord::new(i % 12, (i * 5) % 12), &[E]));
    }
    Planted {
        corpus,
        top_left: 10,
        lr: 15,
        rl: 8,
        other_straight: 12,
        snakes: 5,
        points: 20,
    }
}

#[test]
fn recovered_fractions_equal_planted_fractions() {
    let p = planted();
    assert_eq!(p.corpus.len(), 100);
    let words: Vec<String> = WORDS.map(String::from).to_vec();
    let kinds = [
        StrategyKind::PointsCountOnly,
        StrategyKind::SnakeBounded { max_turns: 1 },
        StrategyKind::StraightAnyDirection,
        StrategyKind::HorizontalAnyStartBothDir,
        StrategyKind::HorizontalAnyStartLR,
        StrategyKind::FixedTopLeftHorizontal,
    ];
    let pts = tradeoff_curve(&p.corpus, &words, &kinds, &Executor::sequential()).unwrap();
    let by = |k: StrategyKind| pts.iter().find(|x| x.strategy == k).unwrap();

    let mut expected = p.top_left;
    assert_eq!(by(StrategyKind::FixedTopLeftHorizontal).recovered, expected);
    expected += p.lr;
    assert_eq!(by(StrategyKind::HorizontalAnyStartLR).recovered, expected);
    expected += p.rl;
    assert_eq!(
        by(StrategyKind::HorizontalAnyStartBothDir).recovered,
        expected
    );
    expected += p.other_straight;
    assert_eq!(by(StrategyKind::StraightAnyDirection).recovered, expected);
    expected += p.snakes;
    assert_eq!(
        by(StrategyKind::SnakeBounded { max_turns: 1 }).recovered,
        expected
    );
    expected += p.points;
    assert_eq!(by(StrategyKind::PointsCountOnly).recovered, expected);
    for pt in &pts {
        assert_eq!(pt.recovery_fraction, pt.recovered as f64 / 100.0);
    }

    assert!(pts
        .windows(2)
        .all(|w| w[0].dictionary_size <= w[1].dictionary_size));
    assert!(pts
        .windows(2)
        .all(|w| w[0].recovery_fraction <= w[1].recovery_fraction));
    let order: Vec<StrategyKind> = pts.iter().map(|x| x.strategy).collect();
    assert_eq!(order, kinds.iter().rev().copied().collect::<Vec<_>>());

    let csv = tradeoff_csv(&pts);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("strategy,dictionary_size,recovery_fraction")
    );
    assert_eq!(lines.next(), Some("fixed-top-left,20,0.1"));
    assert_eq!(lines.next(), Some("horizontal-lr,2880,0.25"));
}

#[test]
fn parallel_curve_equals_sequential() {
    let p = planted();
    let words: Vec<String> = WORDS.map(String::from).to_vec();
    let kinds = [
        StrategyKind::StraightAnyDirection,
        StrategyKind::HorizontalAnyStartLR,
    ];
    let seq = tradeoff_curve(&p.corpus, &words, &kinds, &Executor::sequential()).unwrap();
    let par = tradeoff_curve(
        &p.corpus,
        &words,
        &kinds,
        &Executor::new(spartan_core::Execution::with_workers(3)).unwrap(),
    )
    .unwrap();
    assert_eq!(seq, par);
}

#[test]
fn corpus_errors() {
    let words = vec!["abc".to_string()];
    assert!(matches!(
        tradeoff_curve(
            &[],
            &words,
            &[StrategyKind::HorizontalAnyStartLR],
            &Executor::sequential()
        ),
        Err(CrackError::EmptyCorpus)
    ));
    let small = GridSpec::with_dims(Dims::new(3, 3).unwrap(), 0);
    let a = Placement::new(&small, [(Coord::new(0, 0), 'a')]).unwrap();
    let b = typed("abc", Coord::new(0, 0), &[Direction::E]);
    assert!(matches!(
        tradeoff_curve(
            &[a, b],
            &words,
            &[StrategyKind::HorizontalAnyStartLR],
            &Executor::sequential()
        ),
        Err(CrackError::MixedGrids(..))
    ));
}
