use num_bigint::BigUint;
use num_traits::Zero;
use rustc_hash::FxHashMap;

use super::{candidates, EnumError, FrontierState, Limits, NONE};
use crate::sft::{Sft2d, Sym};

/// Number of locally admissible `w x h` patterns.
pub fn count_rect(x: &Sft2d, w: usize, h: usize) -> BigUint {
    count_rect_with(x, w, h, &Limits::unlimited()).expect("unlimited sweep")
}

pub fn count_rect_with(
    x: &Sft2d,
    w: usize,
    h: usize,
    limits: &Limits,
) -> Result<BigUint, EnumError> {
    count_rect_pinned(x, w, h, &|_, _, _| true, limits)
}

/// Count admissible patterns whose cells all satisfy `allow(col, row, sym)`.
pub fn count_rect_pinned(
    x: &Sft2d,
    w: usize,
    h: usize,
    allow: &dyn Fn(usize, usize, Sym) -> bool,
    limits: &Limits,
) -> Result<BigUint, EnumError> {
    if w == 0 || h == 0 {
        return Err(EnumError::InvalidArgument(format!(
            "rectangle {w}x{h} has an empty side"
        )));
    }
    if x.is_empty() {
        return Ok(BigUint::zero());
    }
    let layers = sweep(x, w, h, allow, limits, false)?;
    Ok(layers.last().unwrap().values().sum())
}

pub(crate) type Layer = FxHashMap<FrontierState, BigUint>;

/// Cell-by-cell transfer sweep. Returns the final layer, or every layer
/// (index 0 is the blank start) when `keep` is set.
pub(crate) fn sweep(
    x: &Sft2d,
    w: usize,
    h: usize,
    allow: &dyn Fn(usize, usize, Sym) -> bool,
    limits: &Limits,
    keep: bool,
) -> Result<Vec<Layer>, EnumError> {
    let mut cur: Layer = FxHashMap::default();
    cur.insert(FrontierState::blank(w), BigUint::from(1u8));
    let mut kept = Vec::new();
    let mut buf = Vec::new();
    for row in 0..h {
        for col in 0..w {
            let mut next: Layer = FxHashMap::default();
            for (st, cnt) in &cur {
                let left = if col > 0 { st.0[col - 1] } else { NONE };
                let below = if row > 0 { st.0[col] } else { NONE };
                candidates(x, left, below, &mut buf);
                for &s in &buf {
                    if !allow(col, row, s) {
                        continue;
                    }
                    *next.entry(st.with(col, s)).or_default() += cnt;
                }
            }
            limits.check(next.len())?;
            if keep {
                kept.push(std::mem::replace(&mut cur, next));
            } else {
                cur = next;
            }
        }
    }
    kept.push(cur);
    Ok(kept)
}
