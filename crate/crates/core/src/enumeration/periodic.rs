use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{candidates, EnumError, FrontierState, Limits, NONE};
use crate::sft::{iter_bits, LatticeBasis, Sft2d, Sym};

/// Number of configurations invariant under the sublattice `l`.
pub fn periodic_points(x: &Sft2d, l: &LatticeBasis) -> BigUint {
    periodic_points_with(x, l, &Limits::unlimited()).expect("unlimited sweep")
}

/// Works on the Hermite box `(a, 0), (s, b)`: rows are cyclic of length `a`
/// and the row above the top row is the bottom row shifted by `s`.
pub fn periodic_points_with(
    x: &Sft2d,
    l: &LatticeBasis,
    limits: &Limits,
) -> Result<BigUint, EnumError> {
    if x.is_empty() {
        return Ok(BigUint::zero());
    }
    let shape = l.torus_shape();
    let (a, b, s) = (shape.width, shape.height, shape.shift);
    let bottoms = cyclic_rows(x, a, limits)?;
    let closes = |top: &[Sym], bottom: &[Sym]| {
        (0..a).all(|i| x.v_allowed(top[i], bottom[(i + a - s) % a]))
    };
    if b == 1 {
        let n = bottoms.iter().filter(|r| closes(r, r)).count();
        return Ok(BigUint::from(n));
    }
    let parts: Vec<Result<BigUint, EnumError>> = bottoms
        .par_iter()
        .map(|r0| {
            let mut cur: FxHashMap<FrontierState, BigUint> = FxHashMap::default();
            cur.insert(FrontierState(r0.clone().into_boxed_slice()), BigUint::from(1u8));
            let mut buf = Vec::new();
            for _row in 1..b {
                for col in 0..a {
                    let mut next: FxHashMap<FrontierState, BigUint> = FxHashMap::default();
                    for (st, cnt) in &cur {
                        let left = if col > 0 { st.0[col - 1] } else { NONE };
                        candidates(x, left, st.0[col], &mut buf);
                        for &sym in &buf {
                            if col == a - 1 {
                                let first = if a == 1 { sym } else { st.0[0] };
                                if !x.h_allowed(sym, first) {
                                    continue;
                                }
                            }
                            *next.entry(st.with(col, sym)).or_default() += cnt;
                        }
                    }
                    limits.check(next.len())?;
                    cur = next;
                }
            }
            Ok(cur
                .iter()
                .filter(|(st, _)| closes(&st.0, r0))
                .map(|(_, c)| c)
                .sum())
        })
        .collect();
    let mut total = BigUint::zero();
    for p in parts {
        total += p?;
    }
    Ok(total)
}

/// Rows of length `a` that are admissible when read cyclically.
fn cyclic_rows(x: &Sft2d, a: usize, limits: &Limits) -> Result<Vec<Vec<Sym>>, EnumError> {
    let n = x.num_symbols() as Sym;
    let mut out = Vec::new();
    let mut row = Vec::with_capacity(a);
    fn rec(
        x: &Sft2d,
        a: usize,
        row: &mut Vec<Sym>,
        out: &mut Vec<Vec<Sym>>,
        limits: &Limits,
    ) -> Result<(), EnumError> {
        if row.len() == a {
            if x.h_allowed(row[a - 1], row[0]) {
                out.push(row.clone());
                limits.check(out.len())?;
            }
            return Ok(());
        }
        let last = *row.last().unwrap();
        for s in iter_bits(x.h().row(last)) {
            row.push(s);
            rec(x, a, row, out, limits)?;
            row.pop();
        }
        Ok(())
    }
    for s0 in 0..n {
        row.push(s0);
        rec(x, a, &mut row, &mut out, limits)?;
        row.pop();
    }
    Ok(out)
}
