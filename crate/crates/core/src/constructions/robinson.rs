//! Robinson's aperiodic tile set with a `(Z/2)^2` parity layer, as Wang
//! tiles.
//!
//! Tiles are read off the ideal hierarchical tiling. With `a = v2(x)` and
//! `b = v2(y)` the cell `(x, y)` is a cross when `a == b` and an arm
//! otherwise. Every edge carries a principal arrow:
//!
//! * a cross points out of all four edges;
//! * an arm with `a > b` is crossed by a vertical arrow pointing away from
//!   the nearest cross of column `x` with row valuation `a`, and its east
//!   and west edges point in; `b > a` is the transpose.
//!
//! Square sides add thin lines. Row `y` with `b = v2(y) = m` is a side of
//! the squares of half-size `2^m` centred at `(cx, cy)` with
//! `v2(cx) = v2(cy) = m + 1` and `cy = y +- 2^m`; the line covers
//! `|x - cx| <= 2^m`, remembers on which side the centre lies and points
//! toward the midpoint of the side. Columns are the transpose.
//!
//! Parity `(x + 1, y + 1) mod 2` puts `(0, 0)` on the level-1 crosses.

use std::collections::BTreeSet;
use std::fmt;

use crate::sft::{Alphabet, Relation, Sft2d, Sym};

/// Thin square-side line crossing an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SideLine {
    /// Centre lies on the positive side (north for rows, east for columns).
    pub inner_positive: bool,
    /// Points in the positive direction (east for rows, north for columns).
    pub forward: bool,
}

/// Label of an edge in absolute terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    /// Principal arrow points in the positive direction (east across a
    /// vertical edge, north across a horizontal one).
    pub forward: bool,
    pub side: Option<SideLine>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RobinsonTile {
    pub north: Edge,
    pub east: Edge,
    pub south: Edge,
    pub west: Edge,
    pub parity: (u8, u8),
}

impl RobinsonTile {
    /// Crosses point out of every edge.
    pub fn is_cross(&self) -> bool {
        self.north.forward && self.east.forward && !self.south.forward && !self.west.forward
    }

    /// Mirror in the vertical axis (`x -> -x`).
    pub fn mirror_x(&self) -> Self {
        let flip_across = |e: Edge| Edge {
            forward: !e.forward,
            side: e.side.map(|s| SideLine {
                inner_positive: s.inner_positive,
                forward: !s.forward,
            }),
        };
        let flip_along = |e: Edge| Edge {
            forward: e.forward,
            side: e.side.map(|s| SideLine {
                inner_positive: !s.inner_positive,
                forward: s.forward,
            }),
        };
        RobinsonTile {
            north: flip_along(self.north),
            south: flip_along(self.south),
            east: flip_across(self.west),
            west: flip_across(self.east),
            parity: self.parity,
        }
    }

    /// Reflect in the diagonal (`(x, y) -> (y, x)`).
    pub fn transpose(&self) -> Self {
        RobinsonTile {
            north: self.east,
            east: self.north,
            south: self.west,
            west: self.south,
            parity: (self.parity.1, self.parity.0),
        }
    }
}

fn fmt_edge(e: &Edge, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    write!(f, "{}", if e.forward { '+' } else { '-' })?;
    match e.side {
        None => write!(f, "."),
        Some(s) => write!(
            f,
            "{}{}",
            if s.inner_positive { 'p' } else { 'n' },
            if s.forward { '+' } else { '-' }
        ),
    }
}

impl fmt::Display for RobinsonTile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (tag, e) in [('N', &self.north), ('E', &self.east), ('S', &self.south), ('W', &self.west)] {
            write!(f, "{tag}")?;
            fmt_edge(e, f)?;
        }
        write!(f, "P{}{}", self.parity.0, self.parity.1)
    }
}

fn v2(z: i64) -> u32 {
    z.trailing_zeros()
}

/// Direction of the through-arrow of an arm along the axis where the cell
/// has the smaller valuation: away from the nearest cross, i.e. from the
/// nearest `z'` with `v2(z') = a`.
fn away_from_cross(z: i64, a: u32) -> bool {
    let period = 1i64 << (a + 1);
    let half = 1i64 << a;
    let u = z.rem_euclid(period);
    let down = (u - half).rem_euclid(period);
    let up = (half - u).rem_euclid(period);
    down < up
}

/// Side line of the row through `(x, y)` crossing the vertical edge between
/// `x` and `x + 1`. Columns use the same function with swapped arguments.
fn side_between(x: i64, y: i64) -> Option<SideLine> {
    let m = v2(y);
    let half = 1i64 << m;
    let cy_up = v2(y + half) == m + 1;
    let period = 1i64 << (m + 2);
    let offset = 1i64 << (m + 1);
    // nearest centre column cx = offset (mod period)
    let cx = x - (x - offset).rem_euclid(period);
    let cands = [cx, cx + period];
    for c in cands {
        if x >= c - half && x < c + half {
            return Some(SideLine {
                inner_positive: cy_up,
                forward: x < c,
            });
        }
    }
    None
}

/// Edge labels of the ideal tiling around `(x, y)`.
pub fn ideal_tile(x: i64, y: i64) -> RobinsonTile {
    let (a, b) = (v2(x), v2(y));
    let (vert_fwd_n, vert_fwd_s, hor_fwd_e, hor_fwd_w) = if a == b {
        (true, false, true, false)
    } else if a > b {
        let up = away_from_cross(y, a);
        (up, up, false, true)
    } else {
        let right = away_from_cross(x, b);
        (false, true, right, right)
    };
    RobinsonTile {
        north: Edge { forward: vert_fwd_n, side: side_between(y, x) },
        south: Edge { forward: vert_fwd_s, side: side_between(y - 1, x) },
        east: Edge { forward: hor_fwd_e, side: side_between(x, y) },
        west: Edge { forward: hor_fwd_w, side: side_between(x - 1, y) },
        parity: (((x + 1).rem_euclid(2)) as u8, ((y + 1).rem_euclid(2)) as u8),
    }
}

/// Tile inventory of a window of the ideal tiling, closed under the eight
/// symmetries of the square.
pub fn robinson_tiles() -> Vec<RobinsonTile> {
    const ORIGIN: i64 = 1 << 20;
    const SIZE: i64 = 128;
    let mut set = BTreeSet::new();
    for y in ORIGIN..ORIGIN + SIZE {
        for x in ORIGIN..ORIGIN + SIZE {
            let t = ideal_tile(x, y);
            debug_assert_eq!(t.east, ideal_tile(x + 1, y).west);
            debug_assert_eq!(t.north, ideal_tile(x, y + 1).south);
            set.insert(t);
        }
    }
    let mut closed = set.clone();
    for t in set {
        let mut u = t;
        for _ in 0..4 {
            // rotation by a quarter turn is transpose then mirror
            u = u.transpose().mirror_x();
            closed.insert(u);
            closed.insert(u.mirror_x());
        }
    }
    closed.into_iter().collect()
}

/// Wang tiling rule plus parity steps `(1, 0)` to the right and `(0, 1)`
/// upward.
pub fn robinson_x2() -> Sft2d {
    let tiles = robinson_tiles();
    let n = tiles.len();
    let h = Relation::from_fn(n, |a, b| {
        let (ta, tb) = (&tiles[a as usize], &tiles[b as usize]);
        ta.east == tb.west && tb.parity == ((ta.parity.0 + 1) % 2, ta.parity.1)
    });
    let v = Relation::from_fn(n, |a, b| {
        let (ta, tb) = (&tiles[a as usize], &tiles[b as usize]);
        ta.north == tb.south && tb.parity == (ta.parity.0, (ta.parity.1 + 1) % 2)
    });
    let names = tiles.iter().map(|t| t.to_string()).collect();
    Sft2d::new(Alphabet::new(names).expect("tile names are valid"), h, v)
        .expect("relations sized from alphabet")
        .with_metadata(format!("generator=robinson\ntiles={n}"))
}

/// Index of a tile in the generated alphabet.
pub fn tile_index(tiles: &[RobinsonTile], t: &RobinsonTile) -> Option<Sym> {
    tiles.binary_search(t).ok().map(|i| i as Sym)
}
