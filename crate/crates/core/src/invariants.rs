//! Finite-stage estimators for growth invariants. Natural logarithms
//! throughout. Nothing here extrapolates to a limit.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::enumeration::{count_blocks_with, EnumError, Limits};
use crate::sft::Sft2d;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error("degenerate table: {usable} usable rows, need at least 3")]
    Degenerate { usable: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Natural log of a big integer. `-inf` for zero.
pub fn ln_big(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub k: usize,
    pub j_used: usize,
    pub n: BigUint,
    pub entropy_est: Option<f64>,
    pub poly_est: Option<f64>,
    pub entdim_est: Option<f64>,
    pub stabilized: bool,
}

impl GrowthRow {
    pub fn from_count(k: usize, j_used: usize, n: BigUint, stabilized: bool) -> Self {
        let kk = (k * k) as u32;
        let lnn = ln_big(&n);
        let entropy_est = if n.is_zero() {
            None
        } else {
            let r = n.nth_root(kk);
            if r.pow(kk) == n {
                Some(ln_big(&r))
            } else {
                Some(lnn / (k * k) as f64)
            }
        };
        let lnk = (k as f64).ln();
        let poly_est = (!n.is_zero() && k >= 2).then(|| lnn / lnk);
        let entdim_est = (n >= BigUint::from(3u8) && k >= 2).then(|| lnn.ln() / lnk);
        GrowthRow {
            k,
            j_used,
            n,
            entropy_est,
            poly_est,
            entdim_est,
            stabilized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
}

/// For every `k`, counts central k-blocks in j-blocks for
/// `j = k, k+2, ..., k + j_extra` and keeps the last value.
pub fn growth_table(
    x: &Sft2d,
    k_list: &[usize],
    j_extra: usize,
    limits: &Limits,
) -> Result<GrowthTable, InvariantError> {
    if k_list.is_empty() || k_list.windows(2).any(|w| w[0] >= w[1]) || k_list[0] == 0 {
        return Err(InvariantError::InvalidArgument(
            "k list must be nonempty, positive and strictly ascending".into(),
        ));
    }
    let rows: Vec<Result<GrowthRow, EnumError>> = k_list
        .par_iter()
        .map(|&k| {
            let mut values = Vec::new();
            for t in 0..=j_extra / 2 {
                values.push(count_blocks_with(x, k, k + 2 * t, limits)?.value);
            }
            let stabilized = values.len() >= 2 && values[values.len() - 1] == values[values.len() - 2];
            let n = values.pop().unwrap();
            Ok(GrowthRow::from_count(k, k + 2 * (j_extra / 2), n, stabilized))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(GrowthTable { rows })
}

impl GrowthTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,j,N,entropy_est,poly_est,entdim_est,stabilized\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.k,
                r.j_used,
                r.n,
                csv_opt(r.entropy_est),
                csv_opt(r.poly_est),
                csv_opt(r.entdim_est),
                r.stabilized
            );
        }
        out
    }

    pub fn to_text(&self) -> String {
        let head = ["k", "j", "N", "entropy_est", "poly_est", "entdim_est", "stabilized"];
        let body: Vec<[String; 7]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.k.to_string(),
                    r.j_used.to_string(),
                    r.n.to_string(),
                    fmt_opt(r.entropy_est),
                    fmt_opt(r.poly_est),
                    fmt_opt(r.entdim_est),
                    r.stabilized.to_string(),
                ]
            })
            .collect();
        let mut width = head.map(str::len);
        for row in &body {
            for (w, cell) in width.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let line = |cells: &[&str], out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .zip(width)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(&head, &mut out);
        for row in &body {
            let cells: Vec<&str> = row.iter().map(String::as_str).collect();
            line(&cells, &mut out);
        }
        out
    }
}

fn csv_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"))
}

/// Least-squares line with per-point residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

pub fn least_squares(pts: &[(f64, f64)]) -> Fit {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let residuals = pts.iter().map(|p| p.1 - (slope * p.0 + intercept)).collect();
    Fit {
        slope,
        intercept,
        residuals,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendReport {
    /// `k` values of rows used in the fits.
    pub ks: Vec<usize>,
    /// ln ln N against ln k.
    pub entdim: Fit,
    /// ln N against ln k.
    pub poly: Fit,
    pub unstabilized: Vec<usize>,
}

/// Rows with `N <= 2` or `k = 1` are skipped.
pub fn trend_report(t: &GrowthTable) -> Result<TrendReport, InvariantError> {
    let usable: Vec<&GrowthRow> = t.rows.iter().filter(|r| r.entdim_est.is_some()).collect();
    if usable.len() < 3 {
        return Err(InvariantError::Degenerate {
            usable: usable.len(),
        });
    }
    let lk = |r: &GrowthRow| (r.k as f64).ln();
    let entdim = least_squares(
        &usable
            .iter()
            .map(|r| (lk(r), ln_big(&r.n).ln()))
            .collect::<Vec<_>>(),
    );
    let poly = least_squares(&usable.iter().map(|r| (lk(r), ln_big(&r.n))).collect::<Vec<_>>());
    Ok(TrendReport {
        ks: usable.iter().map(|r| r.k).collect(),
        entdim,
        poly,
        unstabilized: t.rows.iter().filter(|r| !r.stabilized).map(|r| r.k).collect(),
    })
}

impl TrendReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "rows used: {:?}", self.ks);
        for (name, f) in [("lnlnN~lnk", &self.entdim), ("lnN~lnk", &self.poly)] {
            let res: Vec<String> = f.residuals.iter().map(|r| format!("{r:.4}")).collect();
            let _ = writeln!(
                out,
                "{name}: slope {:.6} intercept {:.6} residuals [{}]",
                f.slope,
                f.intercept,
                res.join(", ")
            );
        }
        let _ = writeln!(out, "unstabilized k: {:?}", self.unstabilized);
        out
    }
}

pub const RECURRENCE_MAX_N: usize = 64;
/// Past this many bits `s_n` is tracked through its logarithm only.
pub const RECURRENCE_EXACT_BITS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceRow {
    pub n: usize,
    /// Exact value while it stays under the bit budget.
    pub s: Option<BigUint>,
    pub ln_s: f64,
    /// `ln ln s_n / (n ln 2)`, undefined when `s_n <= 1`.
    pub ratio: Option<f64>,
}

/// `s_{n+1} = s_n + 1` if `a_n = 0`, else `2 s_n^4 + 1`; `a[0]` drives the
/// step from `s_1` to `s_2`.
pub fn recurrence_entdim(a: &[bool], s1: BigUint) -> Result<Vec<RecurrenceRow>, InvariantError> {
    let n_max = a.len();
    if n_max == 0 || n_max > RECURRENCE_MAX_N {
        return Err(InvariantError::InvalidArgument(format!(
            "sequence length {n_max} outside 1..={RECURRENCE_MAX_N}"
        )));
    }
    let row = |n: usize, s: Option<BigUint>, ln_s: f64| {
        let ratio = (ln_s > 0.0).then(|| ln_s.ln() / (n as f64 * std::f64::consts::LN_2));
        RecurrenceRow { n, s, ln_s, ratio }
    };
    let mut out = Vec::with_capacity(n_max);
    let mut exact = Some(s1.clone());
    let mut ln_s = ln_big(&s1);
    out.push(row(1, exact.clone(), ln_s));
    for (i, &bit) in a.iter().enumerate().take(n_max - 1) {
        match exact.take() {
            Some(s) => {
                let next = if bit {
                    BigUint::from(2u8) * s.pow(4) + BigUint::one()
                } else {
                    s + BigUint::one()
                };
                ln_s = ln_big(&next);
                if next.bits() <= RECURRENCE_EXACT_BITS {
                    exact = Some(next);
                }
            }
            None => {
                ln_s = if bit {
                    // ln(2 s^4 + 1), the +1 is far below f64 resolution here
                    std::f64::consts::LN_2 + 4.0 * ln_s
                } else {
                    ln_s + (-ln_s).exp()
                };
            }
        }
        out.push(row(i + 2, exact.clone(), ln_s));
    }
    Ok(out)
}

/// Bit sources for the recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityKind {
    /// Every bit equals `alpha`, which must be 0 or 1.
    Constant(Ratio<u64>),
    Beatty(Ratio<u64>),
    /// Beatty bits of density `lo` on odd blocks and `hi` on even blocks,
    /// block `m` covering indices in `(2^((m-1)^2), 2^(m^2)]`.
    TwoDensity(Ratio<u64>, Ratio<u64>),
}

impl DensityKind {
    pub fn validate(&self) -> Result<(), InvariantError> {
        let unit = |r: &Ratio<u64>| *r.numer() <= *r.denom();
        let ok = match self {
            DensityKind::Constant(a) => a.is_zero() || a.is_one(),
            DensityKind::Beatty(a) => unit(a),
            DensityKind::TwoDensity(lo, hi) => unit(lo) && unit(hi) && lo <= hi,
        };
        if ok {
            Ok(())
        } else {
            Err(InvariantError::InvalidArgument(format!(
                "density parameters out of range: {self:?}"
            )))
        }
    }
}

fn beatty(alpha: Ratio<u64>, n: u64) -> bool {
    let (p, q) = (*alpha.numer() as u128, *alpha.denom() as u128);
    let n = n as u128;
    ((n + 1) * p / q) - (n * p / q) == 1
}

/// Bit `n` (from 0) of the sequence.
pub fn density_sequence(kind: DensityKind, n: u64) -> Result<bool, InvariantError> {
    kind.validate()?;
    Ok(match kind {
        DensityKind::Constant(a) => a.is_one(),
        DensityKind::Beatty(a) => beatty(a, n),
        DensityKind::TwoDensity(lo, hi) => {
            let mut m = 1u32;
            while m < 8 && (n as u128) > 1u128 << (m * m) {
                m += 1;
            }
            beatty(if m % 2 == 1 { lo } else { hi }, n)
        }
    })
}

pub fn density_prefix(kind: DensityKind, len: usize) -> Result<Vec<bool>, InvariantError> {
    (0..len as u64).map(|n| density_sequence(kind, n)).collect()
}

/// Parse `p/q`, an integer or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Ratio<u64>, InvariantError> {
    let bad = || InvariantError::InvalidArgument(format!("not a finite rational: {s:?}"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(p, q));
    }
    if let Some((i, f)) = s.split_once('.') {
        if f.is_empty() || f.len() > 18 || !f.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let i: u64 = if i.is_empty() { 0 } else { i.parse().map_err(|_| bad())? };
        let d = 10u64.pow(f.len() as u32);
        let f: u64 = f.parse().map_err(|_| bad())?;
        let num = i.checked_mul(d).and_then(|v| v.checked_add(f)).ok_or_else(bad)?;
        return Ok(Ratio::new(num, d));
    }
    Ok(Ratio::from_integer(s.parse().map_err(|_| bad())?))
}
