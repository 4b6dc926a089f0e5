//! The p-adic hierarchical tile set.
//!
//! Tiles are read off the canonical configuration on `N^2`. For a
//! coordinate `x` let `level(x)` be one plus the number of trailing base-p
//! digits equal to 1, and `label(x)` the first digit that is not 1. A cell
//! `(x, y)` holds
//!
//! * `B(label x, label y)` if both levels are 1,
//! * `W(label x, label y)` if both levels agree and exceed 1,
//! * `Up(label x, seg(y, level x))` if the column level is larger,
//! * `Right(seg(x, level y), label y)` if the row level is larger,
//!
//! where `seg(z, L)` is digit `L - 1` of the last `z' <= z` of level at
//! least `L`. The rule set is the set of neighbour pairs occurring in that
//! configuration. Every `Up` also remembers the plain tile to its left and
//! every `Right` the plain tile below it, which turns the distance-2 rules
//! into nearest-neighbour ones.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::sft::{Alphabet, Relation, Sft2d, SftError, Sym};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TileKind {
    B,
    W,
    Up,
    Right,
}

impl TileKind {
    pub fn is_node(self) -> bool {
        matches!(self, TileKind::B | TileKind::W)
    }

    pub fn is_arrow(self) -> bool {
        !self.is_node()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlainTile {
    pub kind: TileKind,
    pub n: u8,
    pub m: u8,
}

impl fmt::Display for PlainTile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            TileKind::B => 'B',
            TileKind::W => 'W',
            TileKind::Up => 'U',
            TileKind::Right => 'R',
        };
        write!(f, "{k}{}.{}", self.n, self.m)
    }
}

/// A symbol of the tile set: a plain tile plus, for arrows, the plain tile
/// it crossed (left neighbour of `Up`, lower neighbour of `Right`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PAdicTile {
    pub plain: PlainTile,
    pub memory: Option<PlainTile>,
}

impl PAdicTile {
    pub fn kind(&self) -> TileKind {
        self.plain.kind
    }

    pub fn labels(&self) -> (u8, u8) {
        (self.plain.n, self.plain.m)
    }
}

impl fmt::Display for PAdicTile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.memory {
            Some(mem) => write!(f, "{}/{}", self.plain, mem),
            None => write!(f, "{}", self.plain),
        }
    }
}

/// Generated tile set with per-symbol tile data, index-aligned with the
/// alphabet of `sft`.
#[derive(Debug, Clone)]
pub struct PadicTileset {
    pub p: u8,
    pub sft: Sft2d,
    pub tiles: Vec<PAdicTile>,
}

fn digits_level(mut z: u64, p: u64) -> (u32, u8) {
    let mut level = 1;
    while z % p == 1 {
        z /= p;
        level += 1;
    }
    (level, (z % p) as u8)
}

fn seg(z: u64, level: u32, p: u64) -> u8 {
    let period = p.pow(level - 1);
    let r: u64 = (0..level - 1).map(|i| p.pow(i)).sum();
    let last = z - (z + period - r % period) % period;
    ((last / period) % p) as u8
}

/// Plain tile of the canonical configuration at `(x, y)`. Coordinates must
/// be large enough that every `seg` lookup stays nonnegative.
pub fn canonical_tile(x: u64, y: u64, p: u8) -> PlainTile {
    let p64 = p as u64;
    let (lx, ax) = digits_level(x, p64);
    let (ly, ay) = digits_level(y, p64);
    let (kind, n, m) = if lx == ly {
        (if lx == 1 { TileKind::B } else { TileKind::W }, ax, ay)
    } else if lx > ly {
        (TileKind::Up, ax, seg(y, lx, p64))
    } else {
        (TileKind::Right, seg(x, ly, p64), ay)
    };
    PlainTile { kind, n, m }
}

/// Canonical configuration with memory components on a window.
pub(crate) fn canonical_window(p: u8, origin: u64, size: usize) -> Vec<Vec<PAdicTile>> {
    let plain: Vec<Vec<PlainTile>> = (0..size as u64)
        .map(|r| {
            (0..size as u64)
                .map(|c| canonical_tile(origin + c, origin + r, p))
                .collect()
        })
        .collect();
    (0..size)
        .map(|r| {
            (0..size)
                .map(|c| {
                    let t = plain[r][c];
                    let memory = match t.kind {
                        TileKind::Up if c > 0 => Some(plain[r][c - 1]),
                        TileKind::Right if r > 0 => Some(plain[r - 1][c]),
                        TileKind::Up => Some(canonical_tile(origin + c as u64 - 1, origin + r as u64, p)),
                        TileKind::Right => Some(canonical_tile(origin + c as u64, origin + r as u64 - 1, p)),
                        _ => None,
                    };
                    PAdicTile { plain: t, memory }
                })
                .collect()
        })
        .collect()
}

fn window_size(p: u8) -> usize {
    match p {
        3 => 243,
        _ => (p as usize).pow(4),
    }
}

fn window_origin(p: u8) -> u64 {
    (p as u64).pow(7)
}

/// Tile set read off a `size x size` window of the canonical configuration.
pub(crate) fn tiles_from_window(p: u8, size: usize) -> PadicTileset {
    let grid = canonical_window(p, window_origin(p), size);
    let mut set = BTreeSet::new();
    for row in &grid {
        set.extend(row.iter().copied());
    }
    let tiles: Vec<PAdicTile> = set.into_iter().collect();
    let index: BTreeMap<PAdicTile, Sym> = tiles
        .iter()
        .enumerate()
        .map(|(i, t)| (*t, i as Sym))
        .collect();
    let n = tiles.len();
    let mut h = Relation::empty(n);
    let mut v = Relation::empty(n);
    for r in 0..size {
        for c in 0..size {
            let a = index[&grid[r][c]];
            if c + 1 < size {
                h.insert(a, index[&grid[r][c + 1]]);
            }
            if r + 1 < size {
                v.insert(a, index[&grid[r + 1][c]]);
            }
        }
    }
    let names = tiles.iter().map(|t| t.to_string()).collect();
    let sft = Sft2d::new(Alphabet::new(names).expect("tile names are valid"), h, v)
        .expect("relations sized from alphabet")
        .with_metadata(format!("generator=p-adic\np={p}"));
    PadicTileset { p, sft, tiles }
}

pub fn p_adic_tiles(p: u8) -> Result<PadicTileset, SftError> {
    if p < 3 {
        return Err(SftError::InvalidParameter(format!("p must be at least 3, got {p}")));
    }
    if p > 16 {
        return Err(SftError::InvalidParameter(format!("p above 16 is not supported, got {p}")));
    }
    Ok(tiles_from_window(p, window_size(p)))
}

pub fn p_adic_xp(p: u8) -> Result<Sft2d, SftError> {
    Ok(p_adic_tiles(p)?.sft)
}

/// Per-cell constraint used to pin known cluster tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellPin {
    /// Any node (`B` or `W`) with these labels.
    Node(u8, u8),
    AnyNode,
    Up,
    Right,
}

impl CellPin {
    pub fn admits(&self, t: &PAdicTile) -> bool {
        match *self {
            CellPin::Node(n, m) => t.kind().is_node() && t.labels() == (n, m),
            CellPin::AnyNode => t.kind().is_node(),
            CellPin::Up => t.kind() == TileKind::Up,
            CellPin::Right => t.kind() == TileKind::Right,
        }
    }
}

/// Parse a cluster table given top row first. Cells: `(n,m)` node,
/// `t` unlabelled node, `^` up arrow, `>` right arrow.
pub fn parse_cluster(rows_top_down: &[&str]) -> Vec<Vec<CellPin>> {
    let mut rows: Vec<Vec<CellPin>> = rows_top_down
        .iter()
        .map(|row| {
            row.split_whitespace()
                .map(|cell| match cell {
                    "^" => CellPin::Up,
                    ">" => CellPin::Right,
                    "t" => CellPin::AnyNode,
                    _ => {
                        let inner = cell.trim_start_matches('(').trim_end_matches(')');
                        let (a, b) = inner.split_once(',').expect("node cell");
                        CellPin::Node(a.parse().unwrap(), b.parse().unwrap())
                    }
                })
                .collect()
        })
        .collect();
    rows.reverse();
    rows
}

/// The 1-cluster for p = 3, top row first.
pub const CLUSTER1_P3: [&str; 3] = ["(0,2) ^ (2,2)", "> t >", "(0,0) ^ (2,0)"];

/// The 2-cluster for p = 3, top row first.
pub const CLUSTER2_P3: [&str; 9] = [
    "(0,2) ^ (2,2) (0,2) ^ (2,2) (0,2) ^ (2,2)",
    "> (0,2) > > ^ > > (2,2) >",
    "(0,0) ^ (2,0) (0,0) ^ (2,0) (0,0) ^ (2,0)",
    "(0,2) ^ (2,2) (0,2) ^ (2,2) (0,2) ^ (2,2)",
    "> > > > t > > > >",
    "(0,0) ^ (2,0) (0,0) ^ (2,0) (0,0) ^ (2,0)",
    "(0,2) ^ (2,2) (0,2) ^ (2,2) (0,2) ^ (2,2)",
    "> (0,0) > > ^ > > (2,0) >",
    "(0,0) ^ (2,0) (0,0) ^ (2,0) (0,0) ^ (2,0)",
];
