use num_bigint::{BigUint, RandBigInt};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::rect::sweep;
use super::{EnumError, FrontierState, Limits, NONE};
use crate::sft::{iter_bits, Pattern, Sft2d, Sym};

/// Uniformly random admissible `w x h` pattern, or `None` if there is none.
pub fn sample_pattern(x: &Sft2d, w: usize, h: usize, seed: u64) -> Option<Pattern> {
    sample_pattern_with(x, w, h, seed, &Limits::default()).ok().flatten()
}

pub fn sample_pattern_with(
    x: &Sft2d,
    w: usize,
    h: usize,
    seed: u64,
    limits: &Limits,
) -> Result<Option<Pattern>, EnumError> {
    if w == 0 || h == 0 {
        return Err(EnumError::InvalidArgument(format!(
            "rectangle {w}x{h} has an empty side"
        )));
    }
    if x.is_empty() {
        return Ok(None);
    }
    let layers = sweep(x, w, h, &|_, _, _| true, limits, true)?;
    let last = layers.last().unwrap();
    let total: BigUint = last.values().sum();
    if total.is_zero() {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut finals: Vec<(&FrontierState, &BigUint)> = last.iter().collect();
    finals.sort();
    let mut st = pick(&mut rng, &total, finals.into_iter()).clone();

    let vt = x.v().transpose();
    let mut cells = vec![0 as Sym; w * h];
    for t in (1..=w * h).rev() {
        let (col, row) = ((t - 1) % w, (t - 1) / w);
        let s = st.0[col];
        cells[t - 1] = s;
        if t == 1 {
            break;
        }
        let prev = &layers[t - 1];
        let weight = &layers[t][&st];
        st = if row == 0 {
            st.with(col, NONE)
        } else {
            let mut opts = Vec::new();
            for b in iter_bits(vt.row(s)) {
                let p = st.with(col, b);
                if let Some(c) = prev.get(&p) {
                    opts.push((p, c));
                }
            }
            let chosen = pick(&mut rng, weight, opts.iter().map(|(p, c)| (p, *c)));
            chosen.clone()
        };
    }
    Ok(Some(Pattern::new(w, h, cells).expect("sized pattern")))
}

fn pick<'a>(
    rng: &mut ChaCha8Rng,
    total: &BigUint,
    items: impl Iterator<Item = (&'a FrontierState, &'a BigUint)>,
) -> &'a FrontierState {
    let mut r = rng.gen_biguint_below(total);
    let mut last = None;
    for (st, c) in items {
        if &r < c {
            return st;
        }
        r -= c;
        last = Some(st);
    }
    last.expect("weights sum to total")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn samples_are_admissible_and_deterministic() {
        let hs = Sft2d::hard_square();
        for seed in 0..20 {
            let p = sample_pattern(&hs, 5, 4, seed).unwrap();
            assert!(hs.is_locally_admissible(&p).unwrap());
            assert_eq!(Some(p), sample_pattern(&hs, 5, 4, seed));
        }
        let f = sample_pattern(&Sft2d::full_shift(2), 3, 3, 9).unwrap();
        assert!(Sft2d::full_shift(2).is_locally_admissible(&f).unwrap());
    }

    #[test]
    fn empty_sft_gives_none() {
        assert_eq!(sample_pattern(&Sft2d::empty(), 2, 2, 1), None);
        let dead = Sft2d::from_pairs(
            crate::sft::Alphabet::numbered(1),
            &[],
            &[],
        )
        .unwrap();
        assert_eq!(sample_pattern(&dead, 2, 1, 1), None);
    }

    #[test]
    fn hard_square_blocks_are_uniform() {
        let hs = Sft2d::hard_square();
        let n = 100_000u64;
        let mut freq: HashMap<Pattern, u64> = HashMap::new();
        for seed in 0..n {
            *freq.entry(sample_pattern(&hs, 2, 2, seed).unwrap()).or_default() += 1;
        }
        assert_eq!(freq.len(), 7);
        for (p, c) in freq {
            let f = c as f64 / n as f64;
            assert!((f - 1.0 / 7.0).abs() <= 0.01, "{p:?}: {f}");
        }
    }
}
