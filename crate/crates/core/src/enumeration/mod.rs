//! Exact counting of admissible blocks, central block counts and periodic
//! points. All counts are `BigUint`.

mod blocks;
mod periodic;
mod rect;
mod sample;

pub use blocks::{count_blocks, count_blocks_with, BlockCount};
pub use periodic::{periodic_points, periodic_points_with};
pub use rect::{count_rect, count_rect_pinned, count_rect_with};
pub use sample::{sample_pattern, sample_pattern_with};

use thiserror::Error;

use crate::sft::{iter_bits, Sft2d, Sym};

/// Marker for "no neighbour" in a frontier.
pub(crate) const NONE: Sym = Sym::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("state budget exceeded: {states} frontier states (limit {limit})")]
    ResourceCap { states: usize, limit: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Budget for the sweep engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_states: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 2_000_000,
        }
    }
}

impl Limits {
    pub fn unlimited() -> Self {
        Limits {
            max_states: usize::MAX,
        }
    }

    pub(crate) fn check(&self, states: usize) -> Result<(), EnumError> {
        if states > self.max_states {
            Err(EnumError::ResourceCap {
                states,
                limit: self.max_states,
            })
        } else {
            Ok(())
        }
    }
}

/// Packed row of symbols carried by the sweep. Positions before the
/// current column hold the current row, the rest the row below.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrontierState(pub Box<[Sym]>);

impl FrontierState {
    pub fn blank(width: usize) -> Self {
        FrontierState(vec![NONE; width].into_boxed_slice())
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub(crate) fn with(&self, col: usize, s: Sym) -> Self {
        let mut v = self.0.clone();
        v[col] = s;
        FrontierState(v)
    }
}

/// Symbols that may be placed with the given left and lower neighbours.
pub(crate) fn candidates(x: &Sft2d, left: Sym, below: Sym, out: &mut Vec<Sym>) {
    out.clear();
    let n = x.num_symbols();
    match (left == NONE, below == NONE) {
        (true, true) => out.extend(0..n as Sym),
        (false, true) => out.extend(iter_bits(x.h().row(left))),
        (true, false) => out.extend(iter_bits(x.v().row(below))),
        (false, false) => {
            let a = x.h().row(left);
            let b = x.v().row(below);
            for (wi, (wa, wb)) in a.iter().zip(b).enumerate() {
                let mut w = wa & wb;
                while w != 0 {
                    let t = w.trailing_zeros() as usize;
                    out.push((wi * 64 + t) as Sym);
                    w &= w - 1;
                }
            }
        }
    }
}

/// Distinct rows that can top an admissible block of the given height.
pub(crate) fn reachable_rows(
    x: &Sft2d,
    width: usize,
    height: usize,
    limits: &Limits,
) -> Result<Vec<FrontierState>, EnumError> {
    use rustc_hash::FxHashSet;
    let mut states: FxHashSet<FrontierState> = FxHashSet::default();
    states.insert(FrontierState::blank(width));
    let mut buf = Vec::new();
    for row in 0..height {
        for col in 0..width {
            let mut next = FxHashSet::default();
            for st in &states {
                let left = if col > 0 { st.0[col - 1] } else { NONE };
                let below = if row > 0 { st.0[col] } else { NONE };
                candidates(x, left, below, &mut buf);
                for &s in &buf {
                    next.insert(st.with(col, s));
                }
            }
            limits.check(next.len())?;
            states = next;
        }
    }
    let mut v: Vec<_> = states.into_iter().collect();
    v.sort();
    Ok(v)
}
