//! Marked extensions of the p-adic tile set.
//!
//! Every symbol is a base tile with an [`Extra`]. Nodes use `own` only.
//! Arrows use `own` for the line they belong to and `perp` for a copy of
//! the value of the line crossing them: an `Up` tile sits on a row line, a
//! `Right` tile on a column line.

use std::fmt::Write as _;

use super::padic::{PAdicTile, PadicTileset, TileKind};
use crate::sft::{Alphabet, Relation, Sft2d, SftError, Sym};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Extra {
    pub own: u16,
    pub perp: u16,
}

impl Extra {
    pub fn node(v: u16) -> Self {
        Extra { own: v, perp: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct ExtendedTileset {
    pub sft: Sft2d,
    /// Base symbol of each extended symbol.
    pub base: Vec<Sym>,
    pub extras: Vec<Extra>,
    pub tiles: Vec<PAdicTile>,
}

impl ExtendedTileset {
    pub fn tile(&self, s: Sym) -> (&PAdicTile, Extra) {
        (&self.tiles[self.base[s as usize] as usize], self.extras[s as usize])
    }
}

type PairRule<'a> = &'a dyn Fn(&PAdicTile, Extra, &PAdicTile, Extra) -> bool;

/// Product of the base tiles with their extras, filtered by the horizontal
/// (`a` left of `b`) and vertical (`a` below `b`) rules.
pub(crate) fn extend(
    base: &PadicTileset,
    extras: &dyn Fn(&PAdicTile) -> Vec<Extra>,
    name: &dyn Fn(&PAdicTile, Extra) -> String,
    h_ok: PairRule,
    v_ok: PairRule,
    metadata: String,
) -> ExtendedTileset {
    let mut syms: Vec<(Sym, Extra)> = Vec::new();
    let mut first: Vec<usize> = Vec::with_capacity(base.tiles.len() + 1);
    for (i, t) in base.tiles.iter().enumerate() {
        first.push(syms.len());
        for e in extras(t) {
            syms.push((i as Sym, e));
        }
    }
    first.push(syms.len());
    let n = syms.len();
    let mut h = Relation::empty(n);
    let mut v = Relation::empty(n);
    for (rel, base_rel, ok) in [(&mut h, base.sft.h(), h_ok), (&mut v, base.sft.v(), v_ok)] {
        for (a, b) in base_rel.pairs() {
            let (ta, tb) = (&base.tiles[a as usize], &base.tiles[b as usize]);
            for i in first[a as usize]..first[a as usize + 1] {
                for j in first[b as usize]..first[b as usize + 1] {
                    if ok(ta, syms[i].1, tb, syms[j].1) {
                        rel.insert(i as Sym, j as Sym);
                    }
                }
            }
        }
    }
    let names = syms
        .iter()
        .map(|&(b, e)| name(&base.tiles[b as usize], e))
        .collect();
    let sft = Sft2d::new(Alphabet::new(names).expect("extended names are valid"), h, v)
        .expect("relations sized from alphabet")
        .with_metadata(metadata);
    ExtendedTileset {
        sft,
        base: syms.iter().map(|s| s.0).collect(),
        extras: syms.iter().map(|s| s.1).collect(),
        tiles: base.tiles.clone(),
    }
}

/// Value of the row line through a tile.
fn row_value(t: &PAdicTile, e: Extra) -> u16 {
    if t.kind() == TileKind::Up {
        e.perp
    } else {
        e.own
    }
}

/// Value of the column line through a tile.
fn col_value(t: &PAdicTile, e: Extra) -> u16 {
    if t.kind() == TileKind::Right {
        e.perp
    } else {
        e.own
    }
}

fn all_pairs(k: u16) -> Vec<Extra> {
    (0..k)
        .flat_map(|own| (0..k).map(move |perp| Extra { own, perp }))
        .collect()
}

/// Marks in `Z/M`, constant along every row and column line and shared by
/// each node with its lines: one mark per level.
pub fn poly_growth_tiles(p: u8, m: u16) -> Result<ExtendedTileset, SftError> {
    if m == 0 {
        return Err(SftError::InvalidParameter("M must be positive".into()));
    }
    let base = super::padic::p_adic_tiles(p)?;
    Ok(extend(
        &base,
        &|t| {
            if t.kind().is_node() {
                (0..m).map(|v| Extra { own: v, perp: v }).collect()
            } else {
                all_pairs(m)
            }
        },
        &|t, e| {
            if t.kind().is_node() {
                format!("{t}|{}", e.own)
            } else {
                format!("{t}|{}.{}", e.own, e.perp)
            }
        },
        &|a, ea, b, eb| row_value(a, ea) == row_value(b, eb),
        &|a, ea, b, eb| col_value(a, ea) == col_value(b, eb),
        format!("generator=poly-growth\np={p}\nM={m}"),
    ))
}

pub fn poly_growth_x(p: u8, m: u16) -> Result<Sft2d, SftError> {
    Ok(poly_growth_tiles(p, m)?.sft)
}

/// Label map `(i, j, c) -> c'` of a layered extension, stored as a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    p: u8,
    colors: Vec<String>,
    table: Vec<u16>,
}

impl LabelMap {
    /// Fails if `f` is undefined or out of range somewhere.
    pub fn new(
        p: u8,
        colors: Vec<String>,
        f: &dyn Fn(u8, u8, u16) -> Option<u16>,
    ) -> Result<Self, SftError> {
        let c = colors.len();
        if c == 0 || c > u16::MAX as usize {
            return Err(SftError::InvalidParameter("label set must be nonempty".into()));
        }
        let mut table = Vec::with_capacity(p as usize * p as usize * c);
        for i in 0..p {
            for j in 0..p {
                for col in 0..c as u16 {
                    match f(i, j, col) {
                        Some(v) if (v as usize) < c => table.push(v),
                        _ => {
                            return Err(SftError::InvalidParameter(format!(
                                "label map undefined at ({i}, {j}, {})",
                                colors[col as usize]
                            )))
                        }
                    }
                }
            }
        }
        Ok(LabelMap { p, colors, table })
    }

    pub fn apply(&self, i: u8, j: u8, c: u16) -> u16 {
        let k = self.colors.len();
        self.table[(i as usize * self.p as usize + j as usize) * k + c as usize]
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }
}

/// Every tile carries a label in `C`. Arrows pass their label on to the
/// next arrow of the same line; an arrow (or a `B` node) whose head meets
/// a perpendicular arrow with label `c'` must carry `A(i, j, c')` for its
/// own position labels `(i, j)`; a `W` node shares its label with its
/// outgoing arrows.
pub fn layered_extension_tiles(
    base: &PadicTileset,
    a: &LabelMap,
) -> Result<ExtendedTileset, SftError> {
    if a.p != base.p {
        return Err(SftError::InvalidParameter(format!(
            "label map is for p={}, tile set for p={}",
            a.p, base.p
        )));
    }
    let c = a.colors.len() as u16;
    let meets = |t: &PAdicTile, e: Extra, perp: Extra| {
        let (i, j) = t.labels();
        e.own == a.apply(i, j, perp.own)
    };
    let mut meta = format!("generator=layered\np={}\nC=", base.p);
    let _ = write!(meta, "{}", a.colors.join(","));
    Ok(extend(
        base,
        &|_| (0..c).map(Extra::node).collect(),
        &|t, e| format!("{t}|{}", a.colors[e.own as usize]),
        &|ta, ea, tb, eb| match (ta.kind(), tb.kind()) {
            (TileKind::Right, TileKind::Right) | (TileKind::W, TileKind::Right) => ea.own == eb.own,
            (TileKind::Right, TileKind::Up) | (TileKind::B, TileKind::Up) => meets(ta, ea, eb),
            _ => true,
        },
        &|ta, ea, tb, eb| match (ta.kind(), tb.kind()) {
            (TileKind::Up, TileKind::Up) | (TileKind::W, TileKind::Up) => ea.own == eb.own,
            (TileKind::Up, TileKind::Right) | (TileKind::B, TileKind::Right) => meets(ta, ea, eb),
            _ => true,
        },
        meta,
    ))
}

pub fn layered_extension(base: &PadicTileset, a: &LabelMap) -> Result<Sft2d, SftError> {
    Ok(layered_extension_tiles(base, a)?.sft)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Light {
    Red,
    Green,
    Yellow,
}

impl Light {
    pub const ALL: [Light; 3] = [Light::Red, Light::Green, Light::Yellow];

    fn letter(self) -> char {
        match self {
            Light::Red => 'r',
            Light::Green => 'g',
            Light::Yellow => 'y',
        }
    }
}

/// `F(p-1, c) = g`, `F(0, g) = g`, `F(2, g) = y`, `F(2, y) = r`, and red in
/// every remaining case.
pub fn traffic_light_f(p: u8, i: u8, c: Light) -> Light {
    if i == p - 1 {
        Light::Green
    } else {
        match (i, c) {
            (0, Light::Green) => Light::Green,
            (2, Light::Green) => Light::Yellow,
            _ => Light::Red,
        }
    }
}

/// Traffic-light extension with `C = {r,g,y}^2` and
/// `A(i, j, (a, b)) = (F(i, a), F(j, b))`.
pub fn traffic_light_tiles(p: u8) -> Result<ExtendedTileset, SftError> {
    if p < 4 {
        return Err(SftError::InvalidParameter(format!("p must be at least 4, got {p}")));
    }
    let colors: Vec<(Light, Light)> = Light::ALL
        .iter()
        .flat_map(|&a| Light::ALL.iter().map(move |&b| (a, b)))
        .collect();
    let names = colors
        .iter()
        .map(|(a, b)| format!("{}{}", a.letter(), b.letter()))
        .collect();
    let map = LabelMap::new(p, names, &|i, j, c| {
        let (a, b) = colors[c as usize];
        let out = (traffic_light_f(p, i, a), traffic_light_f(p, j, b));
        colors.iter().position(|&x| x == out).map(|x| x as u16)
    })?;
    let base = super::padic::p_adic_tiles(p)?;
    let mut ext = layered_extension_tiles(&base, &map)?;
    ext.sft = ext
        .sft
        .with_metadata(format!("generator=traffic-light\np={p}"));
    Ok(ext)
}

pub fn traffic_light_xp(p: u8) -> Result<Sft2d, SftError> {
    Ok(traffic_light_tiles(p)?.sft)
}

/// Blue/white colouring. Node extras: 0 white, 1 and 2 blue with free mark
/// 0 or 1. Arrow extras: colour of the own line and of the crossed line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TsirelsonParams {
    pub p: u8,
    pub q: usize,
    pub b_h: Vec<u8>,
    pub b_v: Vec<u8>,
}

impl TsirelsonParams {
    pub fn validate(&self) -> Result<(), SftError> {
        let bad = |msg: String| Err(SftError::InvalidParameter(msg));
        if self.p < 3 || self.p % 2 == 0 {
            return bad(format!("p must be odd and at least 3, got {}", self.p));
        }
        for set in [&self.b_h, &self.b_v] {
            for &b in set.iter() {
                if b % 2 == 1 || b >= self.p {
                    return bad(format!("blue label {b} must be even and below p"));
                }
            }
            let mut sorted = set.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != set.len() {
                return bad("blue label sets must not repeat values".into());
            }
        }
        if self.b_h.len() + self.b_v.len() != self.q {
            return bad(format!(
                "|B_h| + |B_v| = {} but q = {}",
                self.b_h.len() + self.b_v.len(),
                self.q
            ));
        }
        Ok(())
    }

    fn node_blue(&self, n: u8, m: u8) -> bool {
        self.b_h.contains(&n) && self.b_v.contains(&m)
    }

    /// Arrow labels compatible with a blue source; label 1 marks a segment
    /// that started at a crossing and stands for any source label.
    fn arrow_blue(&self, n: u8, m: u8) -> bool {
        !self.b_h.is_empty()
            && !self.b_v.is_empty()
            && (n == 1 || self.b_h.contains(&n))
            && (m == 1 || self.b_v.contains(&m))
    }
}

impl TsirelsonParams {
    /// Whether the line crossed by an arrow tile can be blue. The memory
    /// component holds the tile on that line next to the crossing.
    fn crossed_blue(&self, t: &PAdicTile) -> bool {
        match t.memory {
            Some(mem) if mem.kind.is_arrow() => self.arrow_blue(mem.n, mem.m),
            _ => false,
        }
    }
}

fn colour(t: &PAdicTile, v: u16) -> u16 {
    if t.kind().is_node() {
        (v > 0) as u16
    } else {
        v
    }
}

fn tsirelson_build(params: &TsirelsonParams, filtered: bool) -> Result<ExtendedTileset, SftError> {
    params.validate()?;
    let base = super::padic::p_adic_tiles(params.p)?;
    let extras = |t: &PAdicTile| -> Vec<Extra> {
        let (n, m) = t.labels();
        match t.kind() {
            TileKind::B => vec![Extra::node(0)],
            TileKind::W => {
                if !filtered || params.node_blue(n, m) {
                    (0..3).map(Extra::node).collect()
                } else {
                    vec![Extra::node(0)]
                }
            }
            _ => {
                let owns: &[u16] = if !filtered || params.arrow_blue(n, m) {
                    &[0, 1]
                } else {
                    &[0]
                };
                let perps: &[u16] = if !filtered || params.crossed_blue(t) {
                    &[0, 1]
                } else {
                    &[0]
                };
                owns.iter()
                    .flat_map(|&own| perps.iter().map(move |&perp| Extra { own, perp }))
                    .collect()
            }
        }
    };
    // `line(t, e)` is the colour of the line a neighbour sees.
    let rule = |line: fn(&PAdicTile, Extra) -> u16, crossing: TileKind, arrow: TileKind| {
        move |ta: &PAdicTile, ea: Extra, tb: &PAdicTile, eb: Extra| -> bool {
            let ca = colour(ta, line(ta, ea));
            if tb.kind() == TileKind::W {
                return true;
            }
            if tb.kind() == crossing {
                let forced = ta.kind() == arrow && ea.own == 1;
                return eb.perp == ca && (!forced || eb.own == 1);
            }
            colour(tb, line(tb, eb)) == ca
        }
    };
    let h_ok = rule(row_value, TileKind::Up, TileKind::Right);
    let v_ok = rule(col_value, TileKind::Right, TileKind::Up);
    let meta = format!(
        "generator=tsirelson\np={}\nq={}\nB_h={:?}\nB_v={:?}",
        params.p, params.q, params.b_h, params.b_v
    );
    Ok(extend(
        &base,
        &extras,
        &|t, e| {
            if t.kind().is_node() {
                let c = ["w", "b0", "b1"][e.own as usize];
                format!("{t}|{c}")
            } else {
                let c = |v: u16| if v == 1 { 'b' } else { 'w' };
                format!("{t}|{}{}", c(e.own), c(e.perp))
            }
        },
        &h_ok,
        &v_ok,
        meta,
    ))
}

/// Built from the unconstrained colouring, then restricted to symbols whose
/// labels allow blue.
pub fn tsirelson_tiles(params: &TsirelsonParams) -> Result<ExtendedTileset, SftError> {
    let full = tsirelson_build(params, false)?;
    let keep = |s: Sym| {
        let (t, e) = full.tile(s);
        let (n, m) = t.labels();
        match t.kind() {
            TileKind::B => true,
            TileKind::W => e.own == 0 || params.node_blue(n, m),
            _ => {
                (e.own == 0 || params.arrow_blue(n, m)) && (e.perp == 0 || params.crossed_blue(t))
            }
        }
    };
    let kept: Vec<Sym> = (0..full.sft.num_symbols() as Sym).filter(|&s| keep(s)).collect();
    let sft = full.sft.restrict(keep, &[], &[]);
    Ok(ExtendedTileset {
        sft,
        base: kept.iter().map(|&s| full.base[s as usize]).collect(),
        extras: kept.iter().map(|&s| full.extras[s as usize]).collect(),
        tiles: full.tiles,
    })
}

pub fn tsirelson_y(params: &TsirelsonParams) -> Result<Sft2d, SftError> {
    Ok(tsirelson_tiles(params)?.sft)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::padic::{p_adic_tiles, parse_cluster, CLUSTER1_P3};
    use crate::enumeration::{count_rect, count_rect_pinned, Limits};
    use num_bigint::BigUint;

    fn params(p: u8, b_h: &[u8], b_v: &[u8]) -> TsirelsonParams {
        TsirelsonParams {
            p,
            q: b_h.len() + b_v.len(),
            b_h: b_h.to_vec(),
            b_v: b_v.to_vec(),
        }
    }

    #[test]
    fn f_table_for_p5() {
        use Light::*;
        for c in Light::ALL {
            assert_eq!(traffic_light_f(5, 4, c), Green);
            assert_eq!(traffic_light_f(5, 1, c), Red);
            assert_eq!(traffic_light_f(5, 3, c), Red);
        }
        assert_eq!(traffic_light_f(5, 0, Green), Green);
        assert_eq!(traffic_light_f(5, 2, Green), Yellow);
        assert_eq!(traffic_light_f(5, 2, Yellow), Red);
        assert_eq!(traffic_light_f(5, 0, Yellow), Red);
        assert_eq!(traffic_light_f(5, 0, Red), Red);
        assert_eq!(traffic_light_f(5, 2, Red), Red);
    }

    #[test]
    fn label_map_must_be_total() {
        let colors = vec!["a".to_string(), "b".to_string()];
        assert!(LabelMap::new(3, colors.clone(), &|i, _, _| (i != 2).then_some(0)).is_err());
        assert!(LabelMap::new(3, colors.clone(), &|_, _, _| Some(2)).is_err());
        assert!(LabelMap::new(3, colors, &|_, _, c| Some(c)).is_ok());
    }

    #[test]
    fn singleton_layer_changes_nothing() {
        let base = p_adic_tiles(3).unwrap();
        let map = LabelMap::new(3, vec!["c".into()], &|_, _, _| Some(0)).unwrap();
        let ext = layered_extension(&base, &map).unwrap();
        for (w, h) in [(1, 1), (2, 2), (3, 3), (4, 3)] {
            assert_eq!(count_rect(&ext, w, h), count_rect(&base.sft, w, h));
        }
    }

    #[test]
    fn constant_map_multiplies_single_cells() {
        let base = p_adic_tiles(3).unwrap();
        let map =
            LabelMap::new(3, vec!["a".into(), "b".into(), "c".into()], &|_, _, _| Some(1)).unwrap();
        let ext = layered_extension(&base, &map).unwrap();
        assert_eq!(count_rect(&ext, 1, 1), count_rect(&base.sft, 1, 1) * BigUint::from(3u8));
    }

    #[test]
    fn poly_growth_with_one_mark_is_the_base() {
        let base = p_adic_tiles(3).unwrap();
        let x = poly_growth_x(3, 1).unwrap();
        for (w, h) in [(1, 1), (3, 3), (5, 4)] {
            assert_eq!(count_rect(&x, w, h), count_rect(&base.sft, w, h));
        }
        assert!(poly_growth_x(3, 0).is_err());
    }

    #[test]
    fn cluster_carries_each_mark() {
        let ext = poly_growth_tiles(3, 2).unwrap();
        let pins = parse_cluster(&CLUSTER1_P3);
        let with_mark = |mark: u16| {
            count_rect_pinned(
                &ext.sft,
                3,
                3,
                &|c, r, s| {
                    let (t, e) = ext.tile(s);
                    pins[r][c].admits(t) && ((c, r) != (0, 0) || e.own == mark)
                },
                &Limits::default(),
            )
            .unwrap()
        };
        let zero = with_mark(0);
        let one = with_mark(1);
        assert!(zero > BigUint::from(0u8) && one > BigUint::from(0u8));
        // the corner mark splits the cluster's completions evenly
        assert_eq!(zero, one);
    }

    #[test]
    fn tsirelson_validation() {
        assert!(tsirelson_y(&params(4, &[0], &[2])).is_err());
        assert!(tsirelson_y(&params(5, &[1], &[2])).is_err());
        assert!(tsirelson_y(&params(5, &[6], &[2])).is_err());
        let mut bad_q = params(5, &[0], &[2]);
        bad_q.q = 3;
        assert!(tsirelson_y(&bad_q).is_err());
    }

    #[test]
    fn tsirelson_without_blue_is_the_base() {
        let base = p_adic_tiles(3).unwrap();
        let y = tsirelson_y(&params(3, &[], &[0, 2])).unwrap();
        for (w, h) in [(1, 1), (3, 3), (4, 5)] {
            assert_eq!(count_rect(&y, w, h), count_rect(&base.sft, w, h));
        }
    }

    #[test]
    fn restricted_build_matches_direct_build() {
        let p = params(5, &[0, 2], &[4]);
        let direct = tsirelson_build(&p, true).unwrap();
        let restricted = tsirelson_tiles(&p).unwrap();
        assert_eq!(direct.sft, restricted.sft);
        assert_eq!(direct.extras, restricted.extras);
    }

    #[test]
    fn blue_heads_never_meet_white_tails() {
        let ext = tsirelson_tiles(&params(3, &[0, 2], &[0, 2])).unwrap();
        for (rel, arrow) in [(ext.sft.h(), TileKind::Right), (ext.sft.v(), TileKind::Up)] {
            for (a, b) in rel.pairs() {
                let (ta, ea) = ext.tile(a);
                let (tb, eb) = ext.tile(b);
                if ta.kind() == arrow && ea.own == 1 && tb.kind().is_arrow() {
                    assert_eq!(eb.own, 1, "{} {}", ta, tb);
                }
            }
        }
    }

    #[test]
    fn traffic_light_fixture_counts() {
        assert!(traffic_light_xp(3).is_err());
        let x = traffic_light_xp(4).unwrap();
        assert_eq!(x.num_symbols(), 162 * 9);
        assert_eq!(count_rect(&x, 2, 2), BigUint::from(125280u32));
        assert_eq!(count_rect(&x, 3, 3), BigUint::from(543178386u64));
    }
}
