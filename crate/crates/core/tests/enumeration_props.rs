use num_bigint::BigUint;
use proptest::prelude::*;
use sftlab::enumeration::{count_blocks, count_rect, periodic_points};
use sftlab::sft::{Alphabet, LatticeBasis, Pattern, Relation, Sft2d, Sym};

fn arb_sft(max: usize) -> impl Strategy<Value = Sft2d> {
    (1..=max).prop_flat_map(|n| {
        (
            proptest::collection::vec(any::<bool>(), n * n),
            proptest::collection::vec(any::<bool>(), n * n),
        )
            .prop_map(move |(h, v)| {
                let hr = Relation::from_fn(n, |a, b| h[a as usize * n + b as usize]);
                let vr = Relation::from_fn(n, |a, b| v[a as usize * n + b as usize]);
                Sft2d::new(Alphabet::numbered(n), hr, vr).unwrap()
            })
    })
}

fn brute(x: &Sft2d, w: usize, h: usize) -> BigUint {
    let n = x.num_symbols();
    let mut count = 0u64;
    for mut code in 0..n.pow((w * h) as u32) {
        let mut cells = vec![0 as Sym; w * h];
        for c in cells.iter_mut() {
            *c = (code % n) as Sym;
            code /= n;
        }
        if x.is_locally_admissible(&Pattern::new(w, h, cells).unwrap()).unwrap() {
            count += 1;
        }
    }
    BigUint::from(count)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rect_count_matches_exhaustive(x in arb_sft(4), w in 1usize..=3, h in 1usize..=3) {
        prop_assert_eq!(count_rect(&x, w, h), brute(&x, w, h));
    }

    #[test]
    fn rect_count_is_sweep_direction_free(x in arb_sft(4), w in 1usize..=4, h in 1usize..=4) {
        prop_assert_eq!(count_rect(&x, w, h), count_rect(&x.transpose(), h, w));
        prop_assert_eq!(count_rect(&x, w, h), count_rect(&x.flip_vertical(), w, h));
    }

    #[test]
    fn submultiplicative(x in arb_sft(3), k in 1usize..=2) {
        let small = count_rect(&x, k, k);
        prop_assert!(count_rect(&x, 2 * k, 2 * k) <= small.pow(4));
    }

    #[test]
    fn central_counts_decrease(x in arb_sft(3), k in 1usize..=2) {
        let mut prev = count_blocks(&x, k, k).unwrap().value;
        for j in [k + 2, k + 4] {
            let cur = count_blocks(&x, k, j).unwrap().value;
            prop_assert!(cur <= prev);
            prev = cur;
        }
    }

    #[test]
    fn periodic_points_restrict_to_blocks(x in arb_sft(3), k in 1i64..=3) {
        let l = LatticeBasis::square(k).unwrap();
        let k = k as usize;
        prop_assert!(periodic_points(&x, &l) <= count_rect(&x, k, k));
    }

    #[test]
    fn higher_block_margins(x in arb_sft(3), w in 1usize..=2, h in 1usize..=2) {
        // admissible (w+1)x(h+1) blocks of X are admissible wxh blocks of X^[2]
        let y = x.higher_block(2).unwrap();
        prop_assert_eq!(count_rect(&y, w, h), count_rect(&x, w + 1, h + 1));
    }
}

#[test]
fn counts_are_thread_count_independent() {
    let x = Sft2d::hard_square().product(&Sft2d::full_shift(2)).unwrap();
    let l = LatticeBasis::new(3, 1, 0, 3).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| periodic_points(&x, &l));
    let b = four.install(|| periodic_points(&x, &l));
    assert_eq!(a, b);
}
