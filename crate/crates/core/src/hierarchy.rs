//! Densities of binary sequences encoding limits of rational functions.
//!
//! For a rational function `G(n, j)` with values in `[0, 1]`, monotone
//! non-increasing in `j`, the encoded bit function is zero up to `t_1` and,
//! for `t_n < k <= t_{n+1}`,
//!
//! ```text
//! g(k, j) = 1  iff  ((k - 1) mod n) + 1 <= K_{n,j},   K_{n,j} = floor(n G(n+1, j))
//! ```
//!
//! which is "k mod n in {1..K}" with residue 0 read as n, so `K = n` gives
//! all ones. Block sums are closed forms; no bits are materialized.
//!
//! Two indexings of the block bound are reported: the printed one compares
//! the prefix average at `t_n` with `G(n, j)`, the shifted one compares the
//! average at `t_{n+1}` (the end of the block built from `G(n+1, j)`) with
//! `G(n+1, j)`. Both use the bound `1/n`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest block index accepted; `t_n` has `n^2 + 1` bits.
pub const MAX_N: u64 = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HierarchyError {
    #[error("G({n},{j}) = {value} is outside [0,1]")]
    OutOfRange { n: u64, j: u64, value: String },
    #[error("block index {n} exceeds the limit {limit} (t_n would need about {bits} bits)")]
    TooLarge { n: u64, limit: u64, bits: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

type Callback = dyn Fn(u64, u64) -> BigRational + Send + Sync;

/// `G(n, j)` as a pure callback plus a declared monotonicity flag.
#[derive(Clone)]
pub struct RationalFn {
    f: Arc<Callback>,
    monotone: bool,
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RationalFn").field("monotone", &self.monotone).finish()
    }
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

impl RationalFn {
    pub fn new(monotone: bool, f: impl Fn(u64, u64) -> BigRational + Send + Sync + 'static) -> Self {
        RationalFn { f: Arc::new(f), monotone }
    }

    pub fn eval(&self, n: u64, j: u64) -> BigRational {
        (self.f)(n, j)
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// Evaluates and checks the range.
    pub fn checked(&self, n: u64, j: u64) -> Result<BigRational, HierarchyError> {
        let v = self.eval(n, j);
        if v.is_negative() || v > BigRational::one() {
            return Err(HierarchyError::OutOfRange { n, j, value: v.to_string() });
        }
        Ok(v)
    }

    /// Checks range everywhere and monotonicity (when declared) on
    /// `n <= n_max`, `j <= j_max`.
    pub fn spot_check(&self, n_max: u64, j_max: u64) -> Result<(), HierarchyError> {
        for n in 0..=n_max {
            let mut prev: Option<BigRational> = None;
            for j in 0..=j_max {
                let v = self.checked(n, j)?;
                if self.monotone {
                    if let Some(p) = &prev {
                        if &v > p {
                            return Err(HierarchyError::InvalidArgument(format!(
                                "declared monotone but G({n},{j}) > G({n},{})",
                                j - 1
                            )));
                        }
                    }
                }
                prev = Some(v);
            }
        }
        Ok(())
    }

    /// `G(n, j) = c`.
    pub fn constant(c: BigRational) -> Self {
        RationalFn::new(true, move |_, _| c.clone())
    }

    /// `G(n, j) = 1/n` (and 1 at n = 0).
    pub fn one_over_n() -> Self {
        RationalFn::new(true, |n, _| ratio(1, n.max(1) as i64))
    }

    /// `G(n, j) = c + (-1)^n d`.
    pub fn alternating(c: BigRational, d: BigRational) -> Self {
        RationalFn::new(true, move |n, _| if n % 2 == 0 { &c + &d } else { &c - &d })
    }

    /// Row `i` of `rows` gives `G(i + 1, j)` for `j = 0, 1, ...`; the last
    /// value of a row repeats for larger `j`, the last row for larger `n`,
    /// and `n = 0` reads row 0. Declared monotone when every row is.
    pub fn table(rows: Vec<Vec<BigRational>>) -> Result<Self, HierarchyError> {
        if rows.is_empty() || rows.iter().any(|r| r.is_empty()) {
            return Err(HierarchyError::InvalidArgument("empty table".into()));
        }
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                if v.is_negative() || v > &BigRational::one() {
                    return Err(HierarchyError::OutOfRange {
                        n: i as u64 + 1,
                        j: j as u64,
                        value: v.to_string(),
                    });
                }
            }
        }
        let monotone = rows.iter().all(|r| r.windows(2).all(|w| w[1] <= w[0]));
        Ok(RationalFn::new(monotone, move |n, j| {
            let r = &rows[(n.max(1) as usize - 1).min(rows.len() - 1)];
            r[(j as usize).min(r.len() - 1)].clone()
        }))
    }
}

/// `G'(n, j) = min_{k <= j} G(n, k)`.
pub fn monotonize(g: &RationalFn) -> RationalFn {
    if g.monotone {
        return g.clone();
    }
    let inner = g.clone();
    RationalFn::new(true, move |n, j| {
        (0..=j).map(|k| inner.eval(n, k)).min().expect("nonempty range")
    })
}

/// Block boundaries `t_1 < t_2 < ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    /// `t_n = 2^(n^2)`.
    Squares,
    /// Explicit `t_1, t_2, ...`.
    Table(Vec<BigUint>),
}

impl Schedule {
    pub fn table(ts: Vec<BigUint>) -> Result<Self, HierarchyError> {
        if ts.is_empty() || ts[0].is_zero() || ts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HierarchyError::InvalidArgument(
                "schedule must be positive and strictly increasing".into(),
            ));
        }
        Ok(Schedule::Table(ts))
    }

    /// `t_n` for `n >= 1`.
    pub fn t(&self, n: u64) -> Result<BigUint, HierarchyError> {
        if n == 0 {
            return Err(HierarchyError::InvalidArgument("blocks start at n = 1".into()));
        }
        match self {
            Schedule::Squares => {
                if n > MAX_N {
                    return Err(HierarchyError::TooLarge { n, limit: MAX_N, bits: n * n + 1 });
                }
                Ok(BigUint::one() << (n * n))
            }
            Schedule::Table(ts) => ts.get(n as usize - 1).cloned().ok_or(HierarchyError::TooLarge {
                n,
                limit: ts.len() as u64,
                bits: 0,
            }),
        }
    }
}

/// Bit function produced by [`encode_density`].
#[derive(Debug, Clone)]
pub struct BitFn {
    g: RationalFn,
    schedule: Schedule,
}

/// Ones among `1..=m` with modulus `n` and threshold `k`.
fn ones_upto(m: &BigUint, n: u64, k: u64) -> BigUint {
    let (q, r) = m.div_rem(&BigUint::from(n));
    let r = r.to_u64().expect("remainder below modulus");
    q * k + r.min(k)
}

pub fn encode_density(g: &RationalFn) -> Result<BitFn, HierarchyError> {
    encode_density_with(g, Schedule::Squares)
}

pub fn encode_density_with(g: &RationalFn, schedule: Schedule) -> Result<BitFn, HierarchyError> {
    if !g.is_monotone() {
        return Err(HierarchyError::InvalidArgument(
            "G must be monotone in j; apply monotonize first".into(),
        ));
    }
    Ok(BitFn { g: g.clone(), schedule })
}

impl BitFn {
    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// `K_{n,j} = floor(n G(n+1, j))`.
    pub fn threshold(&self, n: u64, j: u64) -> Result<u64, HierarchyError> {
        let v = self.g.checked(n + 1, j)? * BigRational::from_integer(n.into());
        Ok(v.floor().to_integer().to_u64().expect("0 <= K <= n"))
    }

    /// Single bit `g(k, j)` for `k >= 1`.
    pub fn bit(&self, k: &BigUint, j: u64) -> Result<bool, HierarchyError> {
        if *k <= self.schedule.t(1)? {
            return Ok(false);
        }
        let mut n = 1;
        while *k > self.schedule.t(n + 1)? {
            n += 1;
        }
        let r = ((k - 1u32) % n).to_u64().expect("below modulus") + 1;
        Ok(r <= self.threshold(n, j)?)
    }

    /// Ones in block `(t_n, t_{n+1}]` at threshold `k`.
    fn block_ones_at(&self, n: u64, k: u64) -> Result<BigUint, HierarchyError> {
        let (a, b) = (self.schedule.t(n)?, self.schedule.t(n + 1)?);
        Ok(ones_upto(&b, n, k) - ones_upto(&a, n, k))
    }

    /// Ones of `g(., j)` in block `(t_n, t_{n+1}]`.
    pub fn block_ones(&self, n: u64, j: u64) -> Result<BigUint, HierarchyError> {
        self.block_ones_at(n, self.threshold(n, j)?)
    }

    /// `sum_{k <= t_m} g(k, j)`.
    pub fn prefix_ones(&self, m: u64, j: u64) -> Result<BigUint, HierarchyError> {
        let mut s = BigUint::zero();
        for n in 1..m {
            s += self.block_ones(n, j)?;
        }
        Ok(s)
    }

    /// `(1/t_m) sum_{k <= t_m} g(k, j)`.
    pub fn prefix_average(&self, m: u64, j: u64) -> Result<BigRational, HierarchyError> {
        let t = self.schedule.t(m)?;
        Ok(BigRational::new(self.prefix_ones(m, j)?.into(), t.into()))
    }

    /// `(1/t_m) sum_{k <= t_m} min_{j <= j_max} g(k, j)`. Each bit is a
    /// threshold test, so the minimum over `j` is the test at the least
    /// threshold.
    pub fn prefix_average_inf(&self, m: u64, j_max: u64) -> Result<BigRational, HierarchyError> {
        let mut s = BigUint::zero();
        for n in 1..m {
            let mut k = u64::MAX;
            for j in 0..=j_max {
                k = k.min(self.threshold(n, j)?);
            }
            s += self.block_ones_at(n, k)?;
        }
        Ok(BigRational::new(s.into(), self.schedule.t(m)?.into()))
    }
}

/// Both readings of the block bound at `(n, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheck {
    pub n: u64,
    pub j: u64,
    /// Average at `t_n` against `G(n, j)`.
    pub printed_average: BigRational,
    pub printed_target: BigRational,
    pub printed_pass: bool,
    /// Average at `t_{n+1}` against `G(n+1, j)`.
    pub average: BigRational,
    pub target: BigRational,
    pub bound: BigRational,
    pub pass: bool,
}

pub fn verify_block_bound(
    g: &BitFn,
    big_g: &RationalFn,
    n: u64,
    j: u64,
) -> Result<BoundCheck, HierarchyError> {
    if n == 0 {
        return Err(HierarchyError::InvalidArgument("n must be >= 1".into()));
    }
    let bound = ratio(1, n as i64);
    let printed_average = g.prefix_average(n, j)?;
    let printed_target = big_g.checked(n, j)?;
    let printed_pass = (&printed_average - &printed_target).abs() < bound;
    let average = g.prefix_average(n + 1, j)?;
    let target = big_g.checked(n + 1, j)?;
    let pass = (&average - &target).abs() < bound;
    Ok(BoundCheck {
        n,
        j,
        printed_average,
        printed_target,
        printed_pass,
        average,
        target,
        bound,
        pass,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityRow {
    pub n: u64,
    /// `(1/t_n) sum_k inf_j g(k, j)`.
    pub inf_then_average: BigRational,
    /// `inf_j (1/t_n) sum_k g(k, j)`.
    pub average_then_inf: BigRational,
}

/// Prefix densities at `t_n` for `n = 1..=n_max`, with `j` ranging over
/// `0..=j_max`.
pub fn density_estimates(g: &BitFn, n_max: u64, j_max: u64) -> Result<Vec<DensityRow>, HierarchyError> {
    (1..=n_max)
        .map(|n| {
            let mut avg_inf: Option<BigRational> = None;
            for j in 0..=j_max {
                let a = g.prefix_average(n, j)?;
                avg_inf = Some(match avg_inf {
                    Some(b) if b <= a => b,
                    _ => a,
                });
            }
            Ok(DensityRow {
                n,
                inf_then_average: g.prefix_average_inf(n, j_max)?,
                average_then_inf: avg_inf.expect("j range nonempty"),
            })
        })
        .collect()
}
