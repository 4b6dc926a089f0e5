//! Acceptance suite: one PASS/FAIL line per criterion on stderr (written
//! directly, so it shows even when output is captured), then a single
//! assertion over all of them.

use std::io::Write;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sftlab::constructions::padic::{parse_cluster, CLUSTER1_P3, CLUSTER2_P3};
use sftlab::constructions::tm::{tm_cells, Marker, Move, Origin, TmCell};
use sftlab::constructions::{
    p_adic_tiles, p_adic_xp, poly_growth_x, robinson_x2, tm_spacetime_sft, traffic_light_xp,
    tsirelson_y, TsirelsonParams, TuringMachine,
};
use sftlab::dsl;
use sftlab::enumeration::{
    count_blocks, count_blocks_with, count_rect, count_rect_pinned, periodic_points, EnumError,
    Limits,
};
use sftlab::hierarchy::{encode_density, verify_block_bound, RationalFn};
use sftlab::invariants::{ln_big, recurrence_entdim};
use sftlab::sft::{Alphabet, LatticeBasis, Pattern, Relation, Sft2d, Sym};

/// Slope tolerance for the polynomial growth trends.
const SLOPE_TOL: f64 = 0.3;
/// Ratio windows for the recurrence.
const RATIO_ONES: (f64, f64) = (1.9, 2.0);
const RATIO_ALT: (f64, f64) = (0.85, 1.15);
/// Frontier budget for the growth counts that are attempted but may not fit.
const GROWTH_BUDGET: usize = 2_000_000;
/// Closed-form block count expected for X_3 at k = 3; compared, without
/// failing, against the stabilized N_{3,j}.
const CLOSED_FORM_P3_K3: u64 = 90;

struct Report {
    results: Vec<(u32, bool)>,
}

impl Report {
    fn line(&mut self, id: u32, name: &str, pass: bool, detail: String, started: Instant) {
        let tag = if pass { "PASS" } else { "FAIL" };
        let mut err = std::io::stderr();
        let _ = writeln!(
            err,
            "{tag} {id:>2} {name}: {detail} [{:.1}s]",
            started.elapsed().as_secs_f64()
        );
        self.results.push((id, pass));
    }

    fn note(&self, text: String) {
        let _ = writeln!(std::io::stderr(), "   REPORT {text}");
    }
}

fn random_sft(rng: &mut ChaCha8Rng, max_symbols: usize) -> Sft2d {
    let n = rng.gen_range(1..=max_symbols);
    let density: f64 = rng.gen_range(0.2..0.9);
    let h = Relation::from_fn(n, |_, _| rng.gen_bool(density));
    let v = Relation::from_fn(n, |_, _| rng.gen_bool(density));
    Sft2d::new(Alphabet::numbered(n), h, v).unwrap()
}

/// Checks every assignment of symbols to a `w x h` box.
fn exhaustive_rect(x: &Sft2d, w: usize, h: usize) -> BigUint {
    let n = x.num_symbols();
    let cells = w * h;
    let mut digits = vec![0usize; cells];
    let mut count = 0u64;
    if n == 0 {
        return BigUint::zero();
    }
    loop {
        let at = |c: usize, r: usize| digits[r * w + c] as Sym;
        let ok = (0..h).all(|r| {
            (0..w).all(|c| {
                (c + 1 >= w || x.h_allowed(at(c, r), at(c + 1, r)))
                    && (r + 1 >= h || x.v_allowed(at(c, r), at(c, r + 1)))
            })
        });
        if ok {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == cells {
                return count.into();
            }
            digits[i] += 1;
            if digits[i] < n {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn criterion_1(rep: &mut Report) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = Vec::new();
    for i in 0..50 {
        let x = random_sft(&mut rng, 4);
        for w in 1..=3 {
            for h in 1..=3 {
                if count_rect(&x, w, h) != exhaustive_rect(&x, w, h) {
                    mismatches.push((i, w, h));
                }
            }
        }
    }
    let pass = mismatches.is_empty() && t.elapsed().as_secs() < 60;
    rep.line(1, "oracle equivalence", pass, format!("50 SFTs x 9 sizes, mismatches {mismatches:?}"), t);
}

fn criterion_2(rep: &mut Report) {
    let t = Instant::now();
    let mut bad = Vec::new();
    for s in [2u32, 3] {
        let x = Sft2d::full_shift(s as usize);
        for k in 1..=4 {
            let expect = BigUint::from(s).pow((k * k) as u32);
            if count_blocks(&x, k, k).unwrap().value != expect || count_rect(&x, k, k) != expect {
                bad.push(format!("full({s}) k={k}"));
            }
        }
    }
    let hs = Sft2d::hard_square();
    for (k, v) in [(1, 2u32), (2, 7), (3, 63), (4, 1234)] {
        if count_blocks(&hs, k, k).unwrap().value != BigUint::from(v) {
            bad.push(format!("hard-square k={k}"));
        }
    }
    let f2 = Sft2d::full_shift(2);
    for (a, b) in [(&hs, &f2), (&hs, &hs)] {
        let prod = a.product(b).unwrap();
        for (w, h) in [(1, 1), (2, 3), (3, 3), (4, 2)] {
            if count_rect(&prod, w, h) != count_rect(a, w, h) * count_rect(b, w, h) {
                bad.push(format!("product {w}x{h}"));
            }
        }
    }
    rep.line(2, "exact fixtures", bad.is_empty(), format!("failures {bad:?}"), t);
}

fn criterion_3(rep: &mut Report) {
    let t = Instant::now();
    let x = robinson_x2();
    let counts: Vec<BigUint> = (1..=4)
        .map(|k| periodic_points(&x, &LatticeBasis::square(k).unwrap()))
        .collect();
    let pass = counts.iter().all(|c| c.is_zero()) && t.elapsed().as_secs() < 600;
    rep.line(
        3,
        "Robinson aperiodicity",
        pass,
        format!("{} symbols, P_1..P_4 = {counts:?}", x.num_symbols()),
        t,
    );
}

fn embeds(rows: &[&str]) -> bool {
    let ts = p_adic_tiles(3).unwrap();
    let pins = parse_cluster(rows);
    let (w, h) = (pins[0].len(), pins.len());
    count_rect_pinned(
        &ts.sft,
        w,
        h,
        &|c, r, s| pins[r][c].admits(&ts.tiles[s as usize]),
        &Limits::default(),
    )
    .unwrap()
        > BigUint::zero()
}

fn criterion_4(rep: &mut Report) {
    let t = Instant::now();
    let one = embeds(&CLUSTER1_P3);
    let two = embeds(&CLUSTER2_P3);
    let mut broken = CLUSTER1_P3;
    broken[0] = "(2,2) ^ (0,2)";
    let rejects = !embeds(&broken);
    let x3 = p_adic_xp(3).unwrap();
    let ns: Vec<(usize, BigUint)> = [3, 5, 7, 9]
        .iter()
        .map(|&j| (j, count_blocks(&x3, 3, j).unwrap().value))
        .collect();
    let last = &ns[ns.len() - 1].1;
    let stable = ns[ns.len() - 2].1 == *last;
    rep.note(format!(
        "N_(3,j)(X_3) for j=3,5,7,9: {:?} (stabilized: {stable}); closed form gives {CLOSED_FORM_P3_K3}; {}",
        ns.iter().map(|(_, v)| v.to_string()).collect::<Vec<_>>(),
        if *last == BigUint::from(CLOSED_FORM_P3_K3) { "match" } else { "mismatch, non-fatal" }
    ));
    rep.line(
        4,
        "X_p cluster embedding",
        one && two && rejects,
        format!("1-cluster {one}, 2-cluster {two}, perturbed cluster rejected {rejects}"),
        t,
    );
}

fn slope(a: (usize, &BigUint), b: (usize, &BigUint)) -> f64 {
    (ln_big(b.1) - ln_big(a.1)) / ((b.0 as f64).ln() - (a.0 as f64).ln())
}

fn attempt(x: &Sft2d, k: usize, j: usize) -> Result<BigUint, EnumError> {
    count_blocks_with(x, k, j, &Limits { max_states: GROWTH_BUDGET }).map(|b| b.value)
}

fn criterion_5(rep: &mut Report) {
    let t = Instant::now();
    // X_3: k = 3, 9 with an 8-cell margin; 27 is tried against the budget
    let x3 = p_adic_xp(3).unwrap();
    let n3 = attempt(&x3, 3, 11).unwrap();
    let n9 = attempt(&x3, 9, 17).unwrap();
    let s_x3 = slope((3, &n3), (9, &n9));
    let x3_ok = (s_x3 - 2.0).abs() <= SLOPE_TOL;
    let k27 = match attempt(&x3, 27, 27) {
        Ok(v) => format!("N_27 = {v}"),
        Err(e) => format!("k=27 infeasible ({e})"),
    };
    // poly_growth(5, 3): target 2 + ln 3 / ln 5
    let target = 2.0 + 3f64.ln() / 5f64.ln();
    let pg = poly_growth_x(5, 3).unwrap();
    let pg_detail = match (attempt(&pg, 5, 7), attempt(&pg, 25, 25)) {
        (Ok(a), Ok(b)) => {
            let s = slope((5, &a), (25, &b));
            (Some(s), format!("slope {s:.3} vs {target:.3}"))
        }
        (a, b) => (
            None,
            format!(
                "k=5,j=7: {}; k=25: {}",
                a.map_or_else(|e| e.to_string(), |v| v.to_string()),
                b.map_or_else(|e| e.to_string(), |v| v.to_string())
            ),
        ),
    };
    let pg_ok = pg_detail.0.is_some_and(|s| (s - target).abs() <= SLOPE_TOL);
    rep.line(
        5,
        "polynomial growth trends",
        x3_ok && pg_ok,
        format!(
            "X_3 N_3 = {n3}, N_9 = {n9}, slope {s_x3:.3} vs 2 ({}), {k27}; poly_growth(5,3): {} ({})",
            if x3_ok { "ok" } else { "out of tolerance" },
            pg_detail.1,
            if pg_ok { "ok" } else { "not attained" }
        ),
        t,
    );
}

fn criterion_6(rep: &mut Report) {
    let t = Instant::now();
    let ones = recurrence_entdim(&[true; 40], BigUint::from(2u8)).unwrap();
    let r40 = ones[39].ratio.unwrap();
    let alt: Vec<bool> = (0..60).map(|i| i % 2 == 1).collect();
    let alt_rows = recurrence_entdim(&alt, BigUint::from(2u8)).unwrap();
    let r60 = alt_rows[59].ratio.unwrap();
    let mut exact_pairs = 0;
    let mut ineq_ok = true;
    for w in ones.windows(2) {
        if let (Some(a), Some(b)) = (&w[0].s, &w[1].s) {
            let a4 = a.pow(4);
            ineq_ok &= *b >= a4 && *b <= BigUint::from(2u8) * a4 + BigUint::one();
            exact_pairs += 1;
        }
    }
    let pass = (RATIO_ONES.0..=RATIO_ONES.1).contains(&r40)
        && (RATIO_ALT.0..=RATIO_ALT.1).contains(&r60)
        && ineq_ok
        && exact_pairs > 0
        && t.elapsed().as_secs() < 60;
    rep.line(
        6,
        "recurrence entropy dimension",
        pass,
        format!("ratio(a=1, n=40) = {r40:.4}, ratio(alt, n=60) = {r60:.4}, integer bounds on {exact_pairs} exact steps: {ineq_ok}"),
        t,
    );
}

/// Plain simulator: configurations for `steps` steps, or `None` once the
/// head leaves the tape.
fn simulate(
    m: &TuringMachine,
    tape: &[usize],
    pos: usize,
    state: usize,
    steps: usize,
) -> Option<Vec<(Vec<usize>, usize, usize, Option<Move>)>> {
    let mut out = vec![(tape.to_vec(), pos, state, None)];
    let (mut t, mut p, mut s) = (tape.to_vec(), pos as i64, state);
    for _ in 0..steps {
        let mv = match m.step(s, t[p as usize]) {
            Some((s2, c2, d)) => {
                t[p as usize] = c2;
                p += if d == Move::Right { 1 } else { -1 };
                s = s2;
                Some(d)
            }
            None => None,
        };
        if p < 0 || p >= t.len() as i64 {
            return None;
        }
        out.push((t.clone(), p as usize, s, mv));
    }
    Some(out)
}

/// The space-time pattern of a simulated run.
fn run_pattern(m: &TuringMachine, run: &[(Vec<usize>, usize, usize, Option<Move>)]) -> Vec<Vec<Sym>> {
    let cells = tm_cells(m);
    let idx = |c: TmCell| cells.iter().position(|&x| x == c).unwrap() as Sym;
    run.iter()
        .map(|(tape, p, s, mv)| {
            (0..tape.len())
                .map(|i| {
                    let marker = if i == *p {
                        let from = match mv {
                            Some(Move::Right) => Origin::Left,
                            Some(Move::Left) => Origin::Right,
                            None => Origin::Still,
                        };
                        Marker::Head { state: *s, from }
                    } else if i < *p {
                        let vacated = (*mv == Some(Move::Right) && i + 1 == *p).then_some(*s);
                        Marker::ToRight(vacated)
                    } else {
                        let vacated = (*mv == Some(Move::Left) && i == *p + 1).then_some(*s);
                        Marker::ToLeft(vacated)
                    };
                    idx(TmCell { ch: tape[i], marker })
                })
                .collect()
        })
        .collect()
}

fn criterion_7(rep: &mut Report) {
    let t = Instant::now();
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/");
    let mut checked = 0u64;
    let mut bad = Vec::new();
    for name in ["right1.tm", "busy2.tm", "zigzag.tm"] {
        let m = TuringMachine::parse(&std::fs::read_to_string(format!("{dir}{name}")).unwrap()).unwrap();
        let x = tm_spacetime_sft(&m);
        for w in 1..=6usize {
            for h in 1..=6usize {
                for word in 0..(m.num_chars().pow(w as u32)) {
                    let tape: Vec<usize> = (0..w).map(|i| (word / m.num_chars().pow(i as u32)) % m.num_chars()).collect();
                    for pos in 0..w {
                        for state in 0..m.num_states() {
                            let Some(run) = simulate(&m, &tape, pos, state, h - 1) else {
                                continue;
                            };
                            let rows = run_pattern(&m, &run);
                            let n = count_rect_pinned(
                                &x,
                                w,
                                h,
                                &|c, r, s| r != 0 || rows[0][c] == s,
                                &Limits::default(),
                            )
                            .unwrap();
                            let top_down: Vec<Vec<Sym>> = rows.iter().rev().cloned().collect();
                            let p = Pattern::from_rows_top_down(&top_down).unwrap();
                            checked += 1;
                            if n != BigUint::one() || !x.is_locally_admissible(&p).unwrap() {
                                bad.push(format!("{name} {w}x{h} word {word} pos {pos} state {state}: {n}"));
                            }
                        }
                    }
                }
            }
        }
    }
    rep.line(
        7,
        "TM space-time determinism",
        bad.is_empty() && checked > 0,
        format!("{checked} pinned windows up to 6x6 with the head kept inside, failures {:?}", &bad[..bad.len().min(3)]),
        t,
    );
}

fn criterion_8(rep: &mut Report) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = Vec::new();
    for i in 0..20 {
        let x = random_sft(&mut rng, 3);
        let hb = x.higher_block(2).unwrap();
        for k in 1..=3 {
            if count_rect(&hb, k, k) != count_rect(&x, k + 1, k + 1) {
                bad.push((i, k));
            }
        }
    }
    rep.line(8, "conjugacy identity", bad.is_empty(), format!("20 SFTs, k <= 3, mismatches {bad:?}"), t);
}

fn criterion_9(rep: &mut Report) {
    let t = Instant::now();
    let r = |p: i64, q: i64| BigRational::new(p.into(), q.into());
    let mut bad = Vec::new();
    let mut printed_misses = Vec::new();
    for (name, g) in [
        ("0", RationalFn::constant(r(0, 1))),
        ("1", RationalFn::constant(r(1, 1))),
        ("1/2", RationalFn::constant(r(1, 2))),
        ("1/n", RationalFn::one_over_n()),
    ] {
        let bits = encode_density(&g).unwrap();
        for n in 3..=5 {
            let c = verify_block_bound(&bits, &g, n, 0).unwrap();
            if !c.pass {
                bad.push(format!("{name} n={n}"));
            }
            if !c.printed_pass {
                printed_misses.push(format!("{name} n={n}"));
            }
        }
    }
    rep.note(format!("printed indexing (average at t_n vs G(n,j)) misses: {printed_misses:?}"));
    rep.line(
        9,
        "encoder bound",
        bad.is_empty() && t.elapsed().as_secs() < 60,
        format!("G in {{0, 1, 1/2, 1/n}}, n = 3..5, failures {bad:?}"),
        t,
    );
}

fn corpus() -> Vec<(String, Sft2d)> {
    let mut out = vec![("robinson".to_string(), robinson_x2())];
    for p in [3, 4, 5] {
        out.push((format!("padic p={p}"), p_adic_xp(p).unwrap()));
    }
    out.push(("traffic p=4".into(), traffic_light_xp(4).unwrap()));
    out.push(("polygrowth 3,2".into(), poly_growth_x(3, 2).unwrap()));
    out.push(("polygrowth 5,3".into(), poly_growth_x(5, 3).unwrap()));
    let ts = TsirelsonParams { p: 5, q: 3, b_h: vec![0, 2], b_v: vec![0] };
    out.push(("tsirelson 5,3".into(), tsirelson_y(&ts).unwrap()));
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/");
    for name in ["right1.tm", "busy2.tm", "zigzag.tm"] {
        let m = TuringMachine::parse(&std::fs::read_to_string(format!("{dir}{name}")).unwrap()).unwrap();
        out.push((format!("tm {name}"), tm_spacetime_sft(&m)));
    }
    out
}

fn cli(args: &[&str], dir: &std::path::Path) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_sftlab")).current_dir(dir).args(args).output().unwrap();
    assert!(o.status.success(), "{args:?}");
    o.stdout
}

fn criterion_10(rep: &mut Report) {
    let t = Instant::now();
    let mut bad = Vec::new();
    let first: Vec<(String, String)> = corpus().into_iter().map(|(n, x)| (n, dsl::serialize(&x))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let second: Vec<(String, String)> =
        pool.install(|| corpus().into_iter().map(|(n, x)| (n, dsl::serialize(&x))).collect());
    for ((name, a), (_, b)) in first.iter().zip(&second) {
        if a != b {
            bad.push(format!("{name}: not reproducible"));
        }
        match dsl::parse(a) {
            Ok(y) if dsl::serialize(&y) == *a => {}
            _ => bad.push(format!("{name}: round trip")),
        }
    }
    for (name, x) in corpus() {
        if dsl::parse(&dsl::serialize(&x)).ok().as_ref() != Some(&x) {
            bad.push(format!("{name}: parse(serialize) differs"));
        }
    }
    let d = tempfile::tempdir().unwrap();
    let machine = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/busy2.tm");
    cli(&["gen", "padic", "--p", "3", "-o", "x3.sft"], d.path());
    std::fs::write(d.path().join("hs.sft"), dsl::serialize(&Sft2d::hard_square())).unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen", "robinson"],
        vec!["gen", "padic", "--p", "4"],
        vec!["gen", "tm", "--machine", machine],
        vec!["gen", "tsirelson", "--p", "5", "--q", "3", "--bh", "0,2", "--bv", "0"],
        vec!["count", "x3.sft", "--mode", "blocks", "--k", "3", "--j", "5"],
        vec!["count", "hs.sft", "--mode", "periodic", "--lattice", "4,1,0,3", "--format", "csv"],
        vec!["invariants", "hs.sft", "--k-list", "1,2,3,4,5"],
        vec!["render", "x3.sft", "--w", "6", "--h", "5", "--seed", "9", "--format", "svg"],
        vec!["encode", "--family", "alternating", "--params", "1/2,1/4", "--n-max", "5", "--format", "csv"],
    ];
    for args in &commands {
        let base = cli(args, d.path());
        for threads in ["1", "4"] {
            let mut with = args.clone();
            with.extend(["--threads", threads]);
            if cli(&with, d.path()) != base {
                bad.push(format!("cli {args:?} differs with {threads} threads"));
            }
        }
    }
    rep.line(
        10,
        "determinism and round trip",
        bad.is_empty(),
        format!("{} generated SFTs, {} CLI commands x 3 runs, failures {bad:?}", first.len(), commands.len()),
        t,
    );
}

#[test]
fn acceptance() {
    let mut rep = Report { results: Vec::new() };
    // libtest has already printed "test acceptance ... " without a newline
    let _ = writeln!(std::io::stderr());
    criterion_1(&mut rep);
    criterion_2(&mut rep);
    criterion_3(&mut rep);
    criterion_4(&mut rep);
    criterion_5(&mut rep);
    criterion_6(&mut rep);
    criterion_7(&mut rep);
    criterion_8(&mut rep);
    criterion_9(&mut rep);
    criterion_10(&mut rep);
    let failed: Vec<u32> = rep.results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    let _ = writeln!(
        std::io::stderr(),
        "acceptance: {} of {} criteria pass",
        rep.results.len() - failed.len(),
        rep.results.len()
    );
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
