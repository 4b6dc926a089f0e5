//! Nearest-neighbour shifts of finite type on `Z^2`.
//!
//! Every SFT in this crate is stored in Wang form: a finite alphabet plus
//! two binary relations saying which symbol may sit directly to the right
//! of (resp. directly above) which other symbol.  Coordinates are
//! `(column, row)` with the origin at the bottom-left cell.

use std::fmt;

use thiserror::Error;

/// Dense symbol index.  Alphabets are limited to `2^16` symbols.
pub type Sym = u16;

/// Largest alphabet the engine supports.
pub const MAX_SYMBOLS: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SftError {
    #[error("symbol index {index} out of range for alphabet of size {size}")]
    SymbolOutOfRange { index: usize, size: usize },
    #[error("invalid symbol name {0:?}")]
    InvalidName(String),
    #[error("duplicate symbol name {0:?}")]
    DuplicateName(String),
    #[error("alphabet of {0} symbols exceeds the supported maximum of 65536")]
    TooManySymbols(usize),
    #[error("pattern dimensions {width}x{height} do not match {len} cells")]
    BadPattern { width: usize, height: usize, len: usize },
    #[error("lattice basis is singular")]
    SingularLattice,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A symbol name is usable in `.sft` files when it is non-empty, has no
/// whitespace, and avoids the characters `#`, `=`, `[` and `]`.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '#' | '=' | '[' | ']'))
}

/// Ordered list of symbol names; symbol `i` is `names[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Result<Self, SftError> {
        if names.len() > MAX_SYMBOLS {
            return Err(SftError::TooManySymbols(names.len()));
        }
        let mut seen = std::collections::HashSet::with_capacity(names.len());
        for n in &names {
            if !is_valid_name(n) {
                return Err(SftError::InvalidName(n.clone()));
            }
            if !seen.insert(n.as_str()) {
                return Err(SftError::DuplicateName(n.clone()));
            }
        }
        Ok(Alphabet { names })
    }

    /// Symbols named `0`, `1`, ... `n-1`.
    pub fn numbered(n: usize) -> Self {
        Alphabet {
            names: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.names[s as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<Sym> {
        self.names.iter().position(|n| n == name).map(|i| i as Sym)
    }
}

/// A binary relation on `0..n` stored as one bitset row per left symbol.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Relation")
            .field("n", &self.n)
            .field("pairs", &self.count())
            .finish()
    }
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Relation {
            n,
            words,
            bits: vec![0; words * n],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut r = Relation::empty(n);
        for a in 0..n {
            for b in 0..n {
                r.insert(a as Sym, b as Sym);
            }
        }
        r
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(Sym, Sym) -> bool) -> Self {
        let mut r = Relation::empty(n);
        for a in 0..n {
            for b in 0..n {
                if f(a as Sym, b as Sym) {
                    r.insert(a as Sym, b as Sym);
                }
            }
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, a: Sym, b: Sym) -> bool {
        let (a, b) = (a as usize, b as usize);
        self.bits[a * self.words + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn insert(&mut self, a: Sym, b: Sym) {
        let (a, b) = (a as usize, b as usize);
        self.bits[a * self.words + b / 64] |= 1 << (b % 64);
    }

    pub fn remove(&mut self, a: Sym, b: Sym) {
        let (a, b) = (a as usize, b as usize);
        self.bits[a * self.words + b / 64] &= !(1 << (b % 64));
    }

    /// Bitset of all `b` with `(a, b)` in the relation.
    #[inline]
    pub fn row(&self, a: Sym) -> &[u64] {
        let a = a as usize;
        &self.bits[a * self.words..(a + 1) * self.words]
    }

    pub fn words(&self) -> usize {
        self.words
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (Sym, Sym)> + '_ {
        (0..self.n).flat_map(move |a| {
            let a = a as Sym;
            iter_bits(self.row(a)).map(move |b| (a, b))
        })
    }

    pub fn transpose(&self) -> Relation {
        let mut t = Relation::empty(self.n);
        for (a, b) in self.pairs() {
            t.insert(b, a);
        }
        t
    }
}

/// Iterate the set bit positions of a bitset.
pub fn iter_bits(words: &[u64]) -> impl Iterator<Item = Sym> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let t = w.trailing_zeros();
                w &= w - 1;
                Some((wi * 64 + t as usize) as Sym)
            }
        })
    })
}

/// A two-dimensional nearest-neighbour SFT.
///
/// `h` holds `(a, b)` when `b` may sit immediately right of `a`; `v` holds
/// `(a, b)` when `b` may sit immediately above `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sft2d {
    alphabet: Alphabet,
    h: Relation,
    v: Relation,
    metadata: String,
}

impl Sft2d {
    pub fn new(alphabet: Alphabet, h: Relation, v: Relation) -> Result<Self, SftError> {
        let n = alphabet.len();
        for r in [&h, &v] {
            if r.size() != n {
                return Err(SftError::SymbolOutOfRange {
                    index: r.size(),
                    size: n,
                });
            }
        }
        Ok(Sft2d {
            alphabet,
            h,
            v,
            metadata: String::new(),
        })
    }

    /// Build from explicit allowed pair lists.
    pub fn from_pairs(
        alphabet: Alphabet,
        h_pairs: &[(Sym, Sym)],
        v_pairs: &[(Sym, Sym)],
    ) -> Result<Self, SftError> {
        let n = alphabet.len();
        let mut h = Relation::empty(n);
        let mut v = Relation::empty(n);
        for (rel, pairs) in [(&mut h, h_pairs), (&mut v, v_pairs)] {
            for &(a, b) in pairs {
                for s in [a, b] {
                    if s as usize >= n {
                        return Err(SftError::SymbolOutOfRange {
                            index: s as usize,
                            size: n,
                        });
                    }
                }
                rel.insert(a, b);
            }
        }
        Sft2d::new(alphabet, h, v)
    }

    /// The SFT with no symbols.  Every count over it is zero.
    pub fn empty() -> Self {
        Sft2d {
            alphabet: Alphabet { names: Vec::new() },
            h: Relation::empty(0),
            v: Relation::empty(0),
            metadata: String::new(),
        }
    }

    /// Full shift on `n` symbols named `0..n`.
    pub fn full_shift(n: usize) -> Self {
        Sft2d {
            alphabet: Alphabet::numbered(n),
            h: Relation::full(n),
            v: Relation::full(n),
            metadata: format!("full-shift {n}"),
        }
    }

    /// Hard-square shift: symbols `0`, `1`; two `1`s may not be adjacent.
    pub fn hard_square() -> Self {
        let h = Relation::from_fn(2, |a, b| !(a == 1 && b == 1));
        Sft2d {
            alphabet: Alphabet::numbered(2),
            v: h.clone(),
            h,
            metadata: "hard-square".into(),
        }
    }

    pub fn with_metadata(mut self, metadata: impl Into<String>) -> Self {
        self.metadata = metadata.into();
        self
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_symbols(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn h(&self) -> &Relation {
        &self.h
    }

    pub fn v(&self) -> &Relation {
        &self.v
    }

    pub fn metadata(&self) -> &str {
        &self.metadata
    }

    #[inline]
    pub fn h_allowed(&self, a: Sym, b: Sym) -> bool {
        self.h.contains(a, b)
    }

    #[inline]
    pub fn v_allowed(&self, a: Sym, b: Sym) -> bool {
        self.v.contains(a, b)
    }

    /// Mirror top-to-bottom: the vertical relation is transposed.
    pub fn flip_vertical(&self) -> Sft2d {
        Sft2d {
            alphabet: self.alphabet.clone(),
            h: self.h.clone(),
            v: self.v.transpose(),
            metadata: self.metadata.clone(),
        }
    }

    /// Swap the roles of rows and columns.
    pub fn transpose(&self) -> Sft2d {
        Sft2d {
            alphabet: self.alphabet.clone(),
            h: self.v.clone(),
            v: self.h.clone(),
            metadata: self.metadata.clone(),
        }
    }

    /// True when no adjacent pair of cells in `p` violates a rule.
    pub fn is_locally_admissible(&self, p: &Pattern) -> Result<bool, SftError> {
        let n = self.num_symbols();
        if let Some(&bad) = p.cells.iter().find(|&&s| s as usize >= n) {
            return Err(SftError::SymbolOutOfRange {
                index: bad as usize,
                size: n,
            });
        }
        for r in 0..p.height {
            for c in 0..p.width {
                let s = p.get(c, r);
                if c + 1 < p.width && !self.h_allowed(s, p.get(c + 1, r)) {
                    return Ok(false);
                }
                if r + 1 < p.height && !self.v_allowed(s, p.get(c, r + 1)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Product SFT on `S_x × S_y`; symbol `(a, b)` has index `a * |S_y| + b`.
    pub fn product(&self, other: &Sft2d) -> Result<Sft2d, SftError> {
        let (nx, ny) = (self.num_symbols(), other.num_symbols());
        let n = nx * ny;
        if n > MAX_SYMBOLS {
            return Err(SftError::TooManySymbols(n));
        }
        let names = (0..nx)
            .flat_map(|a| {
                (0..ny).map(move |b| (a, b))
            })
            .map(|(a, b)| {
                format!(
                    "{}*{}",
                    self.alphabet.names[a], other.alphabet.names[b]
                )
            })
            .collect();
        let split = |s: Sym| ((s as usize / ny) as Sym, (s as usize % ny) as Sym);
        let rel = |rx: &Relation, ry: &Relation| {
            Relation::from_fn(n, |s, t| {
                let ((a1, b1), (a2, b2)) = (split(s), split(t));
                rx.contains(a1, a2) && ry.contains(b1, b2)
            })
        };
        let h = rel(&self.h, &other.h);
        let v = rel(&self.v, &other.v);
        Ok(Sft2d::new(Alphabet::new(names)?, h, v)?.with_metadata(format!(
            "product of [{}] and [{}]",
            self.metadata.replace('\n', "; "),
            other.metadata.replace('\n', "; ")
        )))
    }

    /// Sub-SFT keeping the symbols accepted by `keep` and additionally
    /// forbidding the listed horizontal and vertical pairs.  Surviving
    /// symbols keep their relative order.
    pub fn restrict(
        &self,
        keep: impl Fn(Sym) -> bool,
        forbid_h: &[(Sym, Sym)],
        forbid_v: &[(Sym, Sym)],
    ) -> Sft2d {
        let kept: Vec<Sym> = (0..self.num_symbols() as Sym).filter(|&s| keep(s)).collect();
        let mut h = self.h.clone();
        let mut v = self.v.clone();
        for &(a, b) in forbid_h {
            if (a as usize) < self.num_symbols() && (b as usize) < self.num_symbols() {
                h.remove(a, b);
            }
        }
        for &(a, b) in forbid_v {
            if (a as usize) < self.num_symbols() && (b as usize) < self.num_symbols() {
                v.remove(a, b);
            }
        }
        let n = kept.len();
        let names = kept
            .iter()
            .map(|&s| self.alphabet.names[s as usize].clone())
            .collect();
        let hr = Relation::from_fn(n, |i, j| h.contains(kept[i as usize], kept[j as usize]));
        let vr = Relation::from_fn(n, |i, j| v.contains(kept[i as usize], kept[j as usize]));
        Sft2d {
            alphabet: Alphabet { names },
            h: hr,
            v: vr,
            metadata: self.metadata.clone(),
        }
    }

    /// Higher-block presentation: symbols are the locally admissible `m×m`
    /// patterns of `self` (in lexicographic order of their row-major cells),
    /// neighbours must agree on their `m×(m-1)` overlap.
    pub fn higher_block(&self, m: usize) -> Result<Sft2d, SftError> {
        if m == 0 {
            return Err(SftError::InvalidParameter("block size must be >= 1".into()));
        }
        if m == 1 {
            return Ok(self.clone());
        }
        let blocks = enumerate_patterns(self, m, m);
        if blocks.len() > MAX_SYMBOLS {
            return Err(SftError::TooManySymbols(blocks.len()));
        }
        let n = blocks.len();
        let names = blocks
            .iter()
            .map(|p| {
                let cells: Vec<String> = p.cells.iter().map(|c| c.to_string()).collect();
                format!("b{}", cells.join("_"))
            })
            .collect();
        // overlap keys: drop first / last column, drop first / last row
        let mut by_left: std::collections::HashMap<Vec<Sym>, Vec<Sym>> = Default::default();
        let mut by_bottom: std::collections::HashMap<Vec<Sym>, Vec<Sym>> = Default::default();
        for (i, p) in blocks.iter().enumerate() {
            by_left.entry(p.columns(0..m - 1)).or_default().push(i as Sym);
            by_bottom.entry(p.rows(0..m - 1)).or_default().push(i as Sym);
        }
        let mut h = Relation::empty(n);
        let mut v = Relation::empty(n);
        for (i, p) in blocks.iter().enumerate() {
            if let Some(js) = by_left.get(&p.columns(1..m)) {
                for &j in js {
                    h.insert(i as Sym, j);
                }
            }
            if let Some(js) = by_bottom.get(&p.rows(1..m)) {
                for &j in js {
                    v.insert(i as Sym, j);
                }
            }
        }
        Ok(Sft2d::new(Alphabet::new(names)?, h, v)?
            .with_metadata(format!("higher-block {m} of [{}]", self.metadata.replace('\n', "; "))))
    }
}

/// All locally admissible `w×h` patterns in lexicographic order of cells.
pub(crate) fn enumerate_patterns(x: &Sft2d, w: usize, h: usize) -> Vec<Pattern> {
    let mut out = Vec::new();
    let n = x.num_symbols();
    if n == 0 {
        return out;
    }
    let mut cells = vec![0 as Sym; w * h];
    fn rec(x: &Sft2d, w: usize, h: usize, i: usize, cells: &mut Vec<Sym>, out: &mut Vec<Pattern>) {
        if i == w * h {
            out.push(Pattern {
                width: w,
                height: h,
                cells: cells.clone(),
            });
            return;
        }
        let (c, r) = (i % w, i / w);
        for s in 0..x.num_symbols() as Sym {
            if c > 0 && !x.h_allowed(cells[i - 1], s) {
                continue;
            }
            if r > 0 && !x.v_allowed(cells[i - w], s) {
                continue;
            }
            cells[i] = s;
            rec(x, w, h, i + 1, cells, out);
        }
    }
    rec(x, w, h, 0, &mut cells, &mut out);
    out
}

/// Finite rectangular block, row-major from the bottom row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<Sym>,
}

impl Pattern {
    pub fn new(width: usize, height: usize, cells: Vec<Sym>) -> Result<Self, SftError> {
        if width == 0 || height == 0 || width * height != cells.len() {
            return Err(SftError::BadPattern {
                width,
                height,
                len: cells.len(),
            });
        }
        Ok(Pattern {
            width,
            height,
            cells,
        })
    }

    /// Build from rows listed top row first, as they are usually written.
    pub fn from_rows_top_down(rows: &[Vec<Sym>]) -> Result<Self, SftError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let cells: Vec<Sym> = rows.iter().rev().flatten().copied().collect();
        Pattern::new(width, height, cells)
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> Sym {
        self.cells[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, s: Sym) {
        self.cells[row * self.width + col] = s;
    }

    pub fn sub(&self, col: usize, row: usize, w: usize, h: usize) -> Pattern {
        let mut cells = Vec::with_capacity(w * h);
        for r in row..row + h {
            cells.extend_from_slice(&self.cells[r * self.width + col..r * self.width + col + w]);
        }
        Pattern {
            width: w,
            height: h,
            cells,
        }
    }

    fn columns(&self, cols: std::ops::Range<usize>) -> Vec<Sym> {
        let mut out = Vec::new();
        for r in 0..self.height {
            for c in cols.clone() {
                out.push(self.get(c, r));
            }
        }
        out
    }

    fn rows(&self, rows: std::ops::Range<usize>) -> Vec<Sym> {
        rows.flat_map(|r| self.cells[r * self.width..(r + 1) * self.width].iter().copied())
            .collect()
    }
}

/// Columns `(a, c)` and `(b, d)` of a 2×2 integer matrix generating a
/// full-rank sublattice of `Z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeBasis {
    pub m: [[i64; 2]; 2],
}

/// Fundamental box of a sublattice in Hermite form: generators `(width, 0)`
/// and `(shift, height)` with `0 <= shift < width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusShape {
    pub width: usize,
    pub height: usize,
    pub shift: usize,
}

impl LatticeBasis {
    /// Matrix given row by row: `[[a, b], [c, d]]` has columns `(a, c)`, `(b, d)`.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, SftError> {
        let l = LatticeBasis { m: [[a, b], [c, d]] };
        if l.det() == 0 {
            return Err(SftError::SingularLattice);
        }
        Ok(l)
    }

    /// `k Z^2`.
    pub fn square(k: i64) -> Result<Self, SftError> {
        LatticeBasis::new(k, 0, 0, k)
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Reduce to Hermite form.
    pub fn torus_shape(&self) -> TorusShape {
        let (u, v) = ((self.m[0][0], self.m[1][0]), (self.m[0][1], self.m[1][1]));
        // extended gcd on the second coordinates
        let (g, s, t) = ext_gcd(u.1, v.1);
        let det = self.det().abs();
        let (height, shift_x) = if g == 0 {
            (0, 0)
        } else {
            let gx = s * u.0 + t * v.0;
            let sign = if g < 0 { -1 } else { 1 };
            (g.abs(), gx * sign)
        };
        let width = det / height;
        TorusShape {
            width: width as usize,
            height: height as usize,
            shift: shift_x.rem_euclid(width) as usize,
        }
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}
