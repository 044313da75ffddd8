//! Per-account block colorization.
//!
//! The grid is cut by seed-driven guillotine splits into rectangles whose
//! sides are between 2 and 4 cells, and each block gets a palette color that
//! differs from every orthogonally adjacent block whenever the palette is
//! large enough (six colors always suffice for this kind of tiling).

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{Dims, GridError, GridSpec};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    bytes
        .into_iter()
        .fold(FNV_OFFSET, |h, b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// 64-bit FNV-1a over the UTF-8 username followed by the row and column
/// counts, each as a single byte (low 8 bits).
pub fn seed_from_username(username: &str, dims: Dims) -> Result<u64, GridError> {
    if username.is_empty() {
        return Err(GridError::EmptyUsername);
    }
    let tail = [dims.rows() as u8, dims.cols() as u8];
    Ok(fnv1a(username.bytes().chain(tail)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
}

/// Color index of every cell, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Colorization {
    dims: Dims,
    colors: Vec<u8>,
    blocks: Vec<Block>,
}

impl Colorization {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn color(&self, row: usize, col: usize) -> u8 {
        self.colors[row * self.dims.cols() + col]
    }

    /// The rectangles produced by subdivision, before coloring.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }
}

struct Rng(ChaCha8Rng);

impl Rng {
    fn below(&mut self, n: usize) -> usize {
        // modulo bias is irrelevant at these ranges; a fixed reduction keeps
        // the output stable across rand releases
        (self.0.next_u64() % n as u64) as usize
    }
}

pub fn colorize(grid: &GridSpec) -> Colorization {
    let dims = grid.dims();
    let mut rng = Rng(ChaCha8Rng::seed_from_u64(grid.color_seed()));
    let blocks = subdivide(dims, &mut rng);

    let mut owner = vec![0usize; dims.cells()];
    for (id, b) in blocks.iter().enumerate() {
        for r in b.row..b.row + b.height {
            for c in b.col..b.col + b.width {
                owner[r * dims.cols() + c] = id;
            }
        }
    }
    let adjacency = block_adjacency(dims, &owner, blocks.len());
    let block_colors = color_blocks(&adjacency, grid.palette_size() as usize, &mut rng);
    let colors = owner.iter().map(|&b| block_colors[b]).collect();
    Colorization {
        dims,
        colors,
        blocks,
    }
}

fn subdivide(dims: Dims, rng: &mut Rng) -> Vec<Block> {
    let mut out = Vec::new();
    let mut stack = vec![Block {
        row: 0,
        col: 0,
        height: dims.rows(),
        width: dims.cols(),
    }];
    while let Some(b) = stack.pop() {
        // which axes may be cut into two parts of at least 2
        let can_rows = b.height >= 4;
        let can_cols = b.width >= 4;
        let must = b.height > 4 || b.width > 4;
        let split = must || ((can_rows || can_cols) && rng.below(3) == 0);
        if !split {
            out.push(b);
            continue;
        }
        let cut_rows = if must {
            match (b.height > 4, b.width > 4) {
                (true, true) => rng.below(2) == 0,
                (h, _) => h,
            }
        } else {
            match (can_rows, can_cols) {
                (true, true) => rng.below(2) == 0,
                (h, _) => h,
            }
        };
        let span = if cut_rows { b.height } else { b.width };
        let at = 2 + rng.below(span - 3);
        let (first, second) = if cut_rows {
            (
                Block { height: at, ..b },
                Block {
                    row: b.row + at,
                    height: b.height - at,
                    ..b
                },
            )
        } else {
            (
                Block { width: at, ..b },
                Block {
                    col: b.col + at,
                    width: b.width - at,
                    ..b
                },
            )
        };
        stack.push(second);
        stack.push(first);
    }
    out
}

fn block_adjacency(dims: Dims, owner: &[usize], n: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    let mut link = |a: usize, b: usize| {
        if a != b && !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    };
    for r in 0..dims.rows() {
        for c in 0..dims.cols() {
            let here = owner[r * dims.cols() + c];
            if c + 1 < dims.cols() {
                link(here, owner[r * dims.cols() + c + 1]);
            }
            if r + 1 < dims.rows() {
                link(here, owner[(r + 1) * dims.cols() + c]);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// Greedy coloring in smallest-last order. Each block prefers the next color
/// of a seed-offset round robin and moves on only on conflict.
fn color_blocks(adj: &[Vec<usize>], palette: usize, rng: &mut Rng) -> Vec<u8> {
    let n = adj.len();
    let mut removed = vec![false; n];
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (degree[v], v))
            .expect("a block remains");
        removed[v] = true;
        order.push(v);
        for &u in &adj[v] {
            if !removed[u] {
                degree[u] -= 1;
            }
        }
    }
    order.reverse();

    let base = rng.below(palette);
    let mut color: Vec<Option<usize>> = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        let preferred = (base + i) % palette;
        let taken = |c: usize| adj[v].iter().any(|&u| color[u] == Some(c));
        let pick = (0..palette)
            .map(|k| (preferred + k) % palette)
            .find(|&c| !taken(c))
            .unwrap_or(preferred);
        color[v] = Some(pick);
    }
    color
        .into_iter()
        .map(|c| c.expect("all blocks colored") as u8)
        .collect()
}
