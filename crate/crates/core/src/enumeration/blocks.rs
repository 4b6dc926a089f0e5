use num_bigint::BigUint;
use rustc_hash::FxHashSet;

use super::{candidates, reachable_rows, EnumError, FrontierState, Limits, NONE};
use crate::sft::{Sft2d, Sym};

/// Number of distinct `k x k` blocks sitting at the centre of some locally
/// admissible `j x j` block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCount {
    pub k: usize,
    pub j: usize,
    pub value: BigUint,
}

pub fn count_blocks(x: &Sft2d, k: usize, j: usize) -> Result<BlockCount, EnumError> {
    count_blocks_with(x, k, j, &Limits::unlimited())
}

/// The k-block sits at offset `(j - k) / 2` (rounded down) in both axes.
pub fn count_blocks_with(
    x: &Sft2d,
    k: usize,
    j: usize,
    limits: &Limits,
) -> Result<BlockCount, EnumError> {
    if k == 0 || j < k {
        return Err(EnumError::InvalidArgument(format!(
            "need 1 <= k <= j, got k={k} j={j}"
        )));
    }
    let done = |value| Ok(BlockCount { k, j, value });
    if x.is_empty() {
        return done(BigUint::from(0u8));
    }
    if j == k {
        return done(super::count_rect_with(x, k, k, limits)?);
    }
    let off = (j - k) / 2;
    let above = j - off - k;

    let starts = if off == 0 {
        vec![FrontierState::blank(j)]
    } else {
        reachable_rows(x, j, off, limits)?
    };
    let tops: Option<FxHashSet<FrontierState>> = if above == 0 {
        None
    } else {
        Some(
            reachable_rows(&x.flip_vertical(), j, above + 1, limits)?
                .into_iter()
                .collect(),
        )
    };

    let mut states: FxHashSet<(FrontierState, Box<[Sym]>)> = starts
        .into_iter()
        .map(|f| (f, Vec::new().into_boxed_slice()))
        .collect();
    let mut buf = Vec::new();
    for _row in 0..k {
        for col in 0..j {
            let inside = (off..off + k).contains(&col);
            let mut next = FxHashSet::default();
            for (st, central) in &states {
                let left = if col > 0 { st.0[col - 1] } else { NONE };
                candidates(x, left, st.0[col], &mut buf);
                for &s in &buf {
                    let c = if inside {
                        let mut v = central.to_vec();
                        v.push(s);
                        v.into_boxed_slice()
                    } else {
                        central.clone()
                    };
                    next.insert((st.with(col, s), c));
                }
            }
            limits.check(next.len())?;
            states = next;
        }
    }
    let blocks: FxHashSet<&[Sym]> = states
        .iter()
        .filter(|(f, _)| tops.as_ref().is_none_or(|t| t.contains(f)))
        .map(|(_, c)| &c[..])
        .collect();
    done(BigUint::from(blocks.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::oracle::brute_blocks;
    use crate::sft::Relation;

    fn n(x: &Sft2d, k: usize, j: usize) -> BigUint {
        count_blocks(x, k, j).unwrap().value
    }

    #[test]
    fn full_shift_blocks_all_extend() {
        let f = Sft2d::full_shift(2);
        assert_eq!(n(&f, 2, 4), BigUint::from(16u8));
        assert_eq!(n(&f, 1, 4), BigUint::from(2u8));
    }

    #[test]
    fn hard_square_examples() {
        let hs = Sft2d::hard_square();
        assert_eq!(n(&hs, 1, 3), BigUint::from(2u8));
        assert_eq!(n(&hs, 2, 2), BigUint::from(7u8));
        assert_eq!(n(&hs, 2, 5), BigUint::from(7u8));
    }

    #[test]
    fn bad_arguments() {
        assert!(count_blocks(&Sft2d::hard_square(), 3, 2).is_err());
        assert!(count_blocks(&Sft2d::hard_square(), 0, 2).is_err());
        assert_eq!(n(&Sft2d::empty(), 1, 3), BigUint::from(0u8));
    }

    /// Symbols 0 and 1 with `1` only allowed to the right of `0` and the
    /// vertical relation full: rows must read `0 1` at most once, so the
    /// symbol `1` can't sit at the left edge of a wide block.
    #[test]
    fn extension_prunes_blocks() {
        let h = Relation::from_fn(2, |a, b| a == 0 && b == 1 || a == 0 && b == 0);
        let x = Sft2d::new(crate::sft::Alphabet::numbered(2), h, Relation::full(2)).unwrap();
        for (k, j) in [(1, 1), (1, 2), (1, 3), (2, 3), (2, 4), (1, 4)] {
            assert_eq!(n(&x, k, j), brute_blocks(&x, k, j), "k={k} j={j}");
        }
    }

    #[test]
    fn agrees_with_listing_for_hard_square() {
        let hs = Sft2d::hard_square();
        for (k, j) in [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (1, 5), (3, 5)] {
            assert_eq!(n(&hs, k, j), brute_blocks(&hs, k, j), "k={k} j={j}");
        }
    }
}
