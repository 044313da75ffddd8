//! Geometric classification of placements and corpus statistics.
//!
//! Classes are tried in a fixed order and the first match wins:
//!
//! 1. **StraightLine** - cells are consecutive along one direction.
//! 2. **Block** - cells fill an `h x w` rectangle, both sides at least 2.
//! 3. **Snake** - cells can be visited as one path of 8-adjacent steps. The
//!    reported path is the one with the fewest direction changes.
//! 4. **Segments** - two or more mutually non-adjacent straight runs, each at
//!    least 2 long.
//! 5. **Points** - everything else.
//!
//! Adjacency is 8-directional and wraps around the grid edges, the same way
//! the entry cursor does.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Executor;
use crate::grid::{advance, Coord, Dims, Direction};
use crate::placement::Placement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("need at least 2 cells to classify, got {0}")]
    TooShort(usize),
    #[error("start inference needs a straight line or snake, got {0}")]
    NotAPath(&'static str),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("corpus mixes grid sizes {0} and {1}")]
    MixedGrids(Dims, Dims),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Horizontal,
    Vertical,
    Diagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "class")]
pub enum ShapeClass {
    StraightLine { orientation: Orientation },
    Block { height: usize, width: usize },
    Snake { direction_changes: usize },
    Segments { segment_count: usize },
    Points,
}

impl ShapeClass {
    pub fn name(&self) -> &'static str {
        match self {
            ShapeClass::StraightLine { .. } => "StraightLine",
            ShapeClass::Block { .. } => "Block",
            ShapeClass::Snake { .. } => "Snake",
            ShapeClass::Segments { .. } => "Segments",
            ShapeClass::Points => "Points",
        }
    }
}

/// A classification together with the visiting order of path-like shapes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub class: ShapeClass,
    /// Cell order for straight lines and snakes, empty otherwise.
    pub path: Vec<Coord>,
}

/// Node budget for the fewest-turns path search. Past it the best path
/// found so far is kept.
pub const SNAKE_SEARCH_BUDGET: u64 = 2_000_000;

pub fn classify(p: &Placement) -> Result<ShapeClass, ShapeError> {
    analyze(p).map(|s| s.class)
}

pub fn analyze(p: &Placement) -> Result<Shape, ShapeError> {
    if p.len() < 2 {
        return Err(ShapeError::TooShort(p.len()));
    }
    let cells: Vec<Coord> = p.cells().collect();
    let g = CellSet::new(p.dims(), &cells);

    if let Some((orientation, path)) = straight_line(&g, &cells) {
        return Ok(Shape {
            class: ShapeClass::StraightLine { orientation },
            path,
        });
    }
    if let Some((height, width)) = block(p.dims(), &cells) {
        return Ok(Shape {
            class: ShapeClass::Block { height, width },
            path: Vec::new(),
        });
    }
    if let Some((turns, path)) = snake(&g, &cells) {
        return Ok(Shape {
            class: ShapeClass::Snake {
                direction_changes: turns,
            },
            path,
        });
    }
    let comps = components(&g, &cells);
    if comps.len() >= 2
        && comps
            .iter()
            .all(|c| c.len() >= 2 && straight_line(&CellSet::new(p.dims(), c), c).is_some())
    {
        return Ok(Shape {
            class: ShapeClass::Segments {
                segment_count: comps.len(),
            },
            path: Vec::new(),
        });
    }
    Ok(Shape {
        class: ShapeClass::Points,
        path: Vec::new(),
    })
}

/// Likely first-typed cell of a straight line or snake: whichever path end
/// is topmost, then leftmost.
pub fn infer_start(p: &Placement, class: &ShapeClass) -> Result<Coord, ShapeError> {
    match class {
        ShapeClass::StraightLine { .. } | ShapeClass::Snake { .. } => {}
        other => return Err(ShapeError::NotAPath(other.name())),
    }
    let shape = analyze(p)?;
    if shape.class.name() != class.name() {
        return Err(ShapeError::NotAPath(shape.class.name()));
    }
    let first = *shape.path.first().expect("paths are non-empty");
    let last = *shape.path.last().expect("paths are non-empty");
    Ok(first.min(last))
}

/// Membership lookup over a fixed set of cells.
struct CellSet {
    dims: Dims,
    slot: Vec<Option<usize>>,
}

impl CellSet {
    fn new(dims: Dims, cells: &[Coord]) -> Self {
        let mut slot = vec![None; dims.cells()];
        for (i, &c) in cells.iter().enumerate() {
            slot[dims.index(c)] = Some(i);
        }
        CellSet { dims, slot }
    }

    fn get(&self, c: Coord) -> Option<usize> {
        self.slot[self.dims.index(c)]
    }

    fn contains(&self, c: Coord) -> bool {
        self.get(c).is_some()
    }

    /// Distinct in-set neighbors of `c` with the step taken to reach them.
    fn neighbors(&self, c: Coord) -> Vec<(usize, Direction)> {
        let mut out: Vec<(usize, Direction)> = Vec::with_capacity(8);
        for d in Direction::ALL {
            let n = advance(self.dims, c, d);
            if n == c {
                continue;
            }
            if let Some(i) = self.get(n) {
                if !out.iter().any(|&(j, _)| j == i) {
                    out.push((i, step_between(self.dims, c, n).unwrap_or(d)));
                }
            }
        }
        out
    }
}

/// The step from `a` to an adjacent `b`, preferring the non-wrapping reading
/// when an axis has only two cells.
fn step_between(dims: Dims, a: Coord, b: Coord) -> Option<Direction> {
    let axis = |from: u16, to: u16, n: usize| -> Option<i32> {
        let diff = (to as i64 - from as i64).rem_euclid(n as i64) as usize;
        match diff {
            0 => Some(0),
            1 if n == 2 => Some(if to > from { 1 } else { -1 }),
            1 => Some(1),
            d if d == n - 1 => Some(-1),
            _ => None,
        }
    };
    let dr = axis(a.row, b.row, dims.rows())?;
    let dc = axis(a.col, b.col, dims.cols())?;
    Direction::from_delta(dr, dc)
}

fn straight_line(g: &CellSet, cells: &[Coord]) -> Option<(Orientation, Vec<Coord>)> {
    let n = cells.len();
    let axes = [
        (Direction::E, Orientation::Horizontal),
        (Direction::S, Orientation::Vertical),
        (Direction::SE, Orientation::Diagonal),
        (Direction::NE, Orientation::Diagonal),
    ];
    for (dir, orientation) in axes {
        let back = dir.opposite();
        let heads: Vec<Coord> = cells
            .iter()
            .copied()
            .filter(|&c| !g.contains(advance(g.dims, c, back)))
            .collect();
        let start = match heads.len() {
            1 => heads[0],
            // the whole orbit is filled
            0 => *cells.iter().min().expect("non-empty"),
            _ => continue,
        };
        let mut path = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut at = start;
        let mut ok = true;
        for _ in 0..n {
            match g.get(at) {
                Some(i) if !seen[i] => {
                    seen[i] = true;
                    path.push(at);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
            at = advance(g.dims, at, dir);
        }
        if ok {
            return Some((orientation, path));
        }
    }
    None
}

/// Rows and columns must each form a contiguous (possibly wrapping) band and
/// every cell of the band product must be filled.
fn block(dims: Dims, cells: &[Coord]) -> Option<(usize, usize)> {
    let mut rows: Vec<usize> = cells.iter().map(|c| c.row as usize).collect();
    let mut cols: Vec<usize> = cells.iter().map(|c| c.col as usize).collect();
    rows.sort_unstable();
    rows.dedup();
    cols.sort_unstable();
    cols.dedup();
    let (h, w) = (rows.len(), cols.len());
    if h < 2 || w < 2 || h * w != cells.len() {
        return None;
    }
    (cyclic_interval(&rows, dims.rows()) && cyclic_interval(&cols, dims.cols())).then_some((h, w))
}

fn cyclic_interval(sorted: &[usize], n: usize) -> bool {
    if sorted.len() == n {
        return true;
    }
    let mut gaps = sorted.windows(2).filter(|w| w[1] - w[0] > 1).count();
    if sorted[0] + n - sorted[sorted.len() - 1] > 1 {
        gaps += 1;
    }
    gaps <= 1
}

fn components(g: &CellSet, cells: &[Coord]) -> Vec<Vec<Coord>> {
    let n = cells.len();
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = Vec::new();
        let mut queue = VecDeque::from([s]);
        comp[s] = id;
        while let Some(i) = queue.pop_front() {
            members.push(cells[i]);
            for (j, _) in g.neighbors(cells[i]) {
                if comp[j] == usize::MAX {
                    comp[j] = id;
                    queue.push_back(j);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Fewest-turns Hamiltonian path over the adjacency graph, if any exists.
fn snake(g: &CellSet, cells: &[Coord]) -> Option<(usize, Vec<Coord>)> {
    let n = cells.len();
    let adj: Vec<Vec<(usize, Direction)>> = cells.iter().map(|&c| g.neighbors(c)).collect();
    if adj.iter().any(Vec::is_empty) || components(g, cells).len() != 1 {
        return None;
    }
    let leaves: Vec<usize> = (0..n).filter(|&i| adj[i].len() == 1).collect();
    if leaves.len() > 2 {
        return None;
    }
    // a degree-1 cell must be an end of the path; paths read the same both ways
    let starts: Vec<usize> = if leaves.is_empty() {
        (0..n).collect()
    } else {
        vec![leaves[0]]
    };

    let mut search = PathSearch {
        adj: &adj,
        visited: vec![false; n],
        stack: Vec::with_capacity(n),
        best: None,
        budget: SNAKE_SEARCH_BUDGET,
    };
    for s in starts {
        search.visited[s] = true;
        search.stack.push(s);
        search.extend(s, None, 0);
        search.stack.pop();
        search.visited[s] = false;
        if search.budget == 0 || matches!(search.best, Some((1, _))) {
            break;
        }
    }
    search
        .best
        .map(|(turns, order)| (turns, order.into_iter().map(|i| cells[i]).collect()))
}

struct PathSearch<'a> {
    adj: &'a [Vec<(usize, Direction)>],
    visited: Vec<bool>,
    stack: Vec<usize>,
    best: Option<(usize, Vec<usize>)>,
    budget: u64,
}

impl PathSearch<'_> {
    fn extend(&mut self, at: usize, last: Option<Direction>, turns: usize) {
        if self.budget == 0 {
            return;
        }
        self.budget -= 1;
        if let Some((best, _)) = &self.best {
            if turns >= *best {
                return;
            }
        }
        if self.stack.len() == self.visited.len() {
            self.best = Some((turns, self.stack.clone()));
            return;
        }
        // straight continuation first so cheap paths are found early
        let mut next: Vec<(usize, Direction)> = self.adj[at]
            .iter()
            .copied()
            .filter(|&(j, _)| !self.visited[j])
            .collect();
        next.sort_by_key(|&(j, d)| (Some(d) != last, j));
        for (j, d) in next {
            let t = turns + usize::from(last.is_some_and(|l| l != d));
            self.visited[j] = true;
            self.stack.push(j);
            self.extend(j, Some(d), t);
            self.stack.pop();
            self.visited[j] = false;
        }
    }
}

/// Aggregate statistics over a set of placements on one grid size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub rows: usize,
    pub cols: usize,
    pub placements: usize,
    /// Occupancy count per cell, row-major rows.
    pub heatmap: Vec<Vec<u64>>,
    /// Count per class name; placements with fewer than two cells are
    /// counted as `Unclassified`.
    pub class_histogram: BTreeMap<String, u64>,
    /// Number of straight-line and snake placements with an inferred start.
    pub starts: u64,
    /// Top-left, top-right, bottom-left, bottom-right.
    pub start_quadrant_fractions: Option<[f64; 4]>,
    /// Outermost ring, everything else.
    pub edge_vs_center_fractions: Option<[f64; 2]>,
    pub mean_direction_changes: Option<f64>,
    pub mean_segment_count: Option<f64>,
}

impl CorpusStats {
    pub fn heatmap_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.heatmap {
            let line: Vec<String> = row.iter().map(u64::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Quadrant index of a cell: 0 top-left, 1 top-right, 2 bottom-left,
/// 3 bottom-right. On odd dimensions the middle line belongs to the top or
/// left half.
pub fn quadrant(dims: Dims, c: Coord) -> usize {
    let bottom = 2 * c.row as usize >= dims.rows() + dims.rows() % 2;
    let right = 2 * c.col as usize >= dims.cols() + dims.cols() % 2;
    usize::from(bottom) * 2 + usize::from(right)
}

pub fn is_edge(dims: Dims, c: Coord) -> bool {
    c.row == 0
        || c.col == 0
        || c.row as usize == dims.rows() - 1
        || c.col as usize == dims.cols() - 1
}

#[derive(Debug, Clone)]
struct Tally {
    heatmap: Vec<u64>,
    classes: BTreeMap<&'static str, u64>,
    quadrants: [u64; 4],
    edge: [u64; 2],
    turns: (u64, u64),
    segments: (u64, u64),
}

impl Tally {
    fn new(cells: usize) -> Self {
        Tally {
            heatmap: vec![0; cells],
            classes: BTreeMap::new(),
            quadrants: [0; 4],
            edge: [0; 2],
            turns: (0, 0),
            segments: (0, 0),
        }
    }

    fn add(mut self, p: &Placement) -> Self {
        let dims = p.dims();
        for c in p.cells() {
            self.heatmap[dims.index(c)] += 1;
        }
        let shape = match analyze(p) {
            Ok(s) => s,
            Err(_) => {
                *self.classes.entry("Unclassified").or_default() += 1;
                return self;
            }
        };
        *self.classes.entry(shape.class.name()).or_default() += 1;
        match shape.class {
            ShapeClass::Snake { direction_changes } => {
                self.turns.0 += direction_changes as u64;
                self.turns.1 += 1;
            }
            ShapeClass::Segments { segment_count } => {
                self.segments.0 += segment_count as u64;
                self.segments.1 += 1;
            }
            _ => {}
        }
        if !shape.path.is_empty() {
            let start = (*shape.path.first().unwrap()).min(*shape.path.last().unwrap());
            self.quadrants[quadrant(dims, start)] += 1;
            self.edge[usize::from(!is_edge(dims, start))] += 1;
        }
        self
    }

    fn merge(mut self, other: Tally) -> Self {
        for (a, b) in self.heatmap.iter_mut().zip(other.heatmap) {
            *a += b;
        }
        for (k, v) in other.classes {
            *self.classes.entry(k).or_default() += v;
        }
        for i in 0..4 {
            self.quadrants[i] += other.quadrants[i];
        }
        self.edge[0] += other.edge[0];
        self.edge[1] += other.edge[1];
        self.turns.0 += other.turns.0;
        self.turns.1 += other.turns.1;
        self.segments.0 += other.segments.0;
        self.segments.1 += other.segments.1;
        self
    }
}

pub fn corpus_stats(corpus: &[Placement]) -> Result<CorpusStats, ShapeError> {
    corpus_stats_with(corpus, &Executor::sequential())
}

pub fn corpus_stats_with(corpus: &[Placement], exec: &Executor) -> Result<CorpusStats, ShapeError> {
    let dims = corpus.first().ok_or(ShapeError::EmptyCorpus)?.dims();
    if let Some(p) = corpus.iter().find(|p| p.dims() != dims) {
        return Err(ShapeError::MixedGrids(dims, p.dims()));
    }
    let t = exec.fold_reduce(
        corpus,
        || Tally::new(dims.cells()),
        |t, p| t.add(p),
        Tally::merge,
    );
    let starts: u64 = t.quadrants.iter().sum();
    let frac = |x: u64| x as f64 / starts as f64;
    let mean = |(sum, n): (u64, u64)| (n > 0).then(|| sum as f64 / n as f64);
    Ok(CorpusStats {
        rows: dims.rows(),
        cols: dims.cols(),
        placements: corpus.len(),
        heatmap: t.heatmap.chunks(dims.cols()).map(<[u64]>::to_vec).collect(),
        class_histogram: t
            .classes
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        starts,
        start_quadrant_fractions: (starts > 0).then(|| t.quadrants.map(frac)),
        edge_vs_center_fractions: (starts > 0).then(|| t.edge.map(frac)),
        mean_direction_changes: mean(t.turns),
        mean_segment_count: mean(t.segments),
    })
}
