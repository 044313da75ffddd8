use proptest::prelude::*;
use spartan_core::grid::{advance, Coord, Dims, Direction, EntrySession, GridError, GridSpec};

fn dims() -> impl Strategy<Value = Dims> {
    (2usize..=16, 2usize..=16).prop_map(|(r, c)| Dims::new(r, c).unwrap())
}

fn direction() -> impl Strategy<Value = Direction> {
    prop::sample::select(Direction::ALL.to_vec())
}

proptest! {
    #[test]
    fn advance_stays_on_grid_and_wraps(d in dims(), r in 0usize..16, c in 0usize..16, dir in direction(), n in 0usize..40) {
        let start = Coord::new(r % d.rows(), c % d.cols());
        let mut at = start;
        for _ in 0..n {
            at = advance(d, at, dir);
            prop_assert!(d.contains(at));
        }
        let (dr, dc) = dir.delta();
        let rows = d.rows() as i64;
        let cols = d.cols() as i64;
        let er = (start.row as i64 + dr as i64 * n as i64).rem_euclid(rows);
        let ec = (start.col as i64 + dc as i64 * n as i64).rem_euclid(cols);
        prop_assert_eq!(at, Coord::new(er as usize, ec as usize));
    }

    #[test]
    fn full_cycle_returns_home(d in dims(), r in 0usize..16, c in 0usize..16, dir in direction()) {
        let start = Coord::new(r % d.rows(), c % d.cols());
        let period = match dir.delta() {
            (0, _) => d.cols(),
            (_, 0) => d.rows(),
            _ => num_lcm(d.rows(), d.cols()),
        };
        let mut at = start;
        for _ in 0..period {
            at = advance(d, at, dir);
        }
        prop_assert_eq!(at, start);
    }

    #[test]
    fn opposite_undoes_a_step(d in dims(), r in 0usize..16, c in 0usize..16, dir in direction()) {
        let start = Coord::new(r % d.rows(), c % d.cols());
        prop_assert_eq!(advance(d, advance(d, start, dir), dir.opposite()), start);
    }

    #[test]
    fn typed_text_lands_on_the_walked_cells(
        d in dims(), r in 0usize..16, c in 0usize..16, dir in direction(),
        text in "[a-z0-9]{1,12}",
    ) {
        let grid = GridSpec::with_dims(d, 1);
        let mut s = EntrySession::new(grid);
        let start = Coord::new(r % d.rows(), c % d.cols());
        s.set_cursor(start).unwrap();
        s.set_direction(dir);
        s.type_str(&text).unwrap();
        let mut at = start;
        let mut expected = std::collections::HashMap::new();
        for ch in text.chars() {
            expected.insert(at, ch);
            at = advance(d, at, dir);
        }
        prop_assert_eq!(s.cursor(), Some(at));
        let p = s.placement().unwrap();
        prop_assert_eq!(p.len(), expected.len());
        for (cell, ch) in p.entries() {
            prop_assert_eq!(expected.get(cell), Some(ch));
        }
    }
}

fn num_lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

#[test]
fn typing_needs_a_cursor() {
    let mut s = EntrySession::new(GridSpec::standard(0));
    assert!(matches!(s.input_char('a'), Err(GridError::NoCursor)));
    assert_eq!(s.filled(), 0);
}

#[test]
fn later_characters_overwrite() {
    let mut s = EntrySession::new(GridSpec::with_dims(Dims::new(2, 3).unwrap(), 0));
    s.set_cursor(Coord::new(1, 1)).unwrap();
    s.type_str("abcd").unwrap();
    let p = s.placement().unwrap();
    assert_eq!(p.text(), "cdb");
    assert_eq!(p.get(Coord::new(1, 1)), Some('d'));
    assert_eq!(p.get(Coord::new(1, 2)), Some('b'));
    assert_eq!(p.get(Coord::new(1, 0)), Some('c'));
}

#[test]
fn rejected_input_leaves_the_grid_untouched() {
    let mut s = EntrySession::new(GridSpec::standard(0));
    s.set_cursor(Coord::new(0, 0)).unwrap();
    assert!(s.type_str("ab c").is_err());
    assert_eq!(s.filled(), 0);
    assert_eq!(s.cursor(), Some(Coord::new(0, 0)));
    assert!(s.set_cursor(Coord::new(12, 0)).is_err());
}
