//! Weil heights and subscheme heights `h_Y` of rational points.
//!
//! All integer work (maxima, generator values, gcds) is exact; natural logs
//! are taken once at the end.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::poly::Degree;
use crate::projgeom::{orbit, GeomError, Orbit, ProjPoint, RationalMap, SubschemeIdeal};

const LN_2: f64 = std::f64::consts::LN_2;

/// `(ln m, s)` with `|x| = m · 2^s`, `m` holding the top 64 bits.
fn split_log(x: &BigInt) -> (f64, u64) {
    let bits = x.bits();
    if bits <= 1000 {
        return (x.abs().to_f64().expect("finite below 1000 bits").ln(), 0);
    }
    let shift = bits - 64;
    let top = (x.magnitude() >> shift).to_u64().expect("64 bits");
    ((top as f64).ln(), shift)
}

/// Natural log of `|x|`; `-inf` for zero.
pub fn big_log(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (l, s) = split_log(x);
    l + s as f64 * LN_2
}

/// `ln(|a| / |b|)` without losing accuracy when both are huge and close.
pub fn big_log_ratio(a: &BigInt, b: &BigInt) -> f64 {
    let (la, sa) = split_log(a);
    let (lb, sb) = split_log(b);
    (la - lb) + (sa as i64 - sb as i64) as f64 * LN_2
}

/// Largest absolute coordinate.
pub fn sup_norm(x: &ProjPoint) -> BigInt {
    x.coords()
        .iter()
        .map(|c| c.abs())
        .max()
        .expect("points have coordinates")
}

/// `h(x) = log max |xᵢ|` for primitive coordinates.
pub fn weil_height(x: &ProjPoint) -> f64 {
    big_log(&sup_norm(x))
}

/// Height relative to a closed subscheme; `Infinite` exactly on the subscheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HeightValue {
    Infinite,
    Finite {
        total: f64,
        arch_part: f64,
        gcd_part: f64,
    },
}

impl HeightValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, HeightValue::Infinite)
    }

    pub fn total(&self) -> Option<f64> {
        match self {
            HeightValue::Infinite => None,
            HeightValue::Finite { total, .. } => Some(*total),
        }
    }

    pub fn arch_part(&self) -> Option<f64> {
        match self {
            HeightValue::Infinite => None,
            HeightValue::Finite { arch_part, .. } => Some(*arch_part),
        }
    }

    pub fn gcd_part(&self) -> Option<f64> {
        match self {
            HeightValue::Infinite => None,
            HeightValue::Finite { gcd_part, .. } => Some(*gcd_part),
        }
    }
}

/// Exact integers behind a finite `h_Y(x)`:
/// `arch = witness_degree · log norm − log witness_value`, `gcd_part = log gcd`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcdHeightParts {
    pub norm: BigInt,
    /// Index of the generator attaining the minimum in the archimedean term.
    pub witness: usize,
    pub witness_degree: u32,
    /// `|g_witness(x)|`, nonzero.
    pub witness_value: BigInt,
    pub gcd: BigInt,
}

impl GcdHeightParts {
    pub fn arch_part(&self) -> f64 {
        let scaled = if self.witness_degree == 1 {
            self.norm.clone()
        } else {
            Pow::pow(&self.norm, self.witness_degree)
        };
        big_log_ratio(&scaled, &self.witness_value)
    }

    pub fn gcd_part(&self) -> f64 {
        big_log(&self.gcd)
    }

    pub fn value(&self) -> HeightValue {
        let arch_part = self.arch_part();
        let gcd_part = self.gcd_part();
        HeightValue::Finite {
            total: arch_part + gcd_part,
            arch_part,
            gcd_part,
        }
    }
}

fn check_arity(y: &SubschemeIdeal, x: &ProjPoint) -> Result<(), GeomError> {
    if y.arity() != x.len() {
        return Err(GeomError::ArityMismatch {
            expected: y.arity(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Exact decomposition of `h_Y(x)`, or `None` when `x ∈ Y`.
pub fn subscheme_height_exact(
    y: &SubschemeIdeal,
    x: &ProjPoint,
) -> Result<Option<GcdHeightParts>, GeomError> {
    check_arity(y, x)?;
    let norm = sup_norm(x);
    let mut values = Vec::with_capacity(y.generators().len());
    for g in y.generators() {
        let d = match g.degree() {
            Degree::Finite(d) => d,
            Degree::ZeroPolynomial => unreachable!("ideal generators are nonzero"),
        };
        values.push((d, g.eval_int(x.coords())?.abs()));
    }
    let gcd = values
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .fold(BigInt::zero(), |acc, (_, v)| if acc.is_one() { acc } else { acc.gcd(v) });
    if gcd.is_zero() {
        return Ok(None);
    }
    // minimise d_j log‖x‖ − log|v_j|, i.e. maximise |v_j| · ‖x‖^(D − d_j)
    let top = values.iter().map(|(d, _)| *d).max().unwrap_or(0);
    let mut best: Option<(usize, BigInt)> = None;
    for (j, (d, v)) in values.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let key = if *d == top {
            v.clone()
        } else {
            v * Pow::pow(&norm, top - d)
        };
        if best.as_ref().is_none_or(|(_, k)| key > *k) {
            best = Some((j, key));
        }
    }
    let (witness, _) = best.expect("some value is nonzero");
    let (witness_degree, witness_value) = values.swap_remove(witness);
    Ok(Some(GcdHeightParts {
        norm,
        witness,
        witness_degree,
        witness_value,
        gcd,
    }))
}

/// `h_Y(x)` split into archimedean and gcd parts.
pub fn subscheme_height(y: &SubschemeIdeal, x: &ProjPoint) -> Result<HeightValue, GeomError> {
    Ok(match subscheme_height_exact(y, x)? {
        None => HeightValue::Infinite,
        Some(parts) => parts.value(),
    })
}

/// The explicit constant `-log max_j Σ|coefficients of g_j|`, below which
/// no finite `h_Y` value can fall.
pub fn subscheme_height_lower_bound(y: &SubschemeIdeal) -> f64 {
    let c = y
        .generators()
        .iter()
        .map(|g| g.terms().map(|(_, c)| c.abs()).sum::<BigInt>())
        .max()
        .expect("ideal has generators");
    -big_log(&c)
}

/// Whether `a^i = b^j` for some positive `i, j` (for `a, b ≥ 2`).
pub fn multiplicatively_dependent(a: u64, b: u64) -> bool {
    let (mut a, mut b) = (a.max(b), a.min(b));
    if b < 2 {
        return a == b;
    }
    loop {
        if a == b {
            return true;
        }
        if a % b != 0 {
            return false;
        }
        a /= b;
        if a < b {
            std::mem::swap(&mut a, &mut b);
        }
        if b == 1 {
            return false;
        }
    }
}

/// Heights of `(aⁿ : bⁿ : 1)` relative to the point `(1:1:1)`, evaluated
/// straight from the integers `aⁿ`, `bⁿ`, `aⁿ−1`, `bⁿ−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BczRow {
    pub n: u32,
    pub h: f64,
    pub h_y: f64,
    pub ratio: f64,
    /// `max(aⁿ, bⁿ)`
    pub norm: BigInt,
    /// `max(aⁿ − 1, bⁿ − 1)`
    pub arch_den: BigInt,
    /// `gcd(aⁿ − 1, bⁿ − 1)`
    pub gcd: BigInt,
    pub dependent: bool,
}

pub fn bcz_closed_form(a: u64, b: u64, n: u32) -> BczRow {
    assert!(a >= 2 && b >= 2 && n >= 1, "need a, b >= 2 and n >= 1");
    let an: BigInt = Pow::pow(&BigInt::from(a), n);
    let bn: BigInt = Pow::pow(&BigInt::from(b), n);
    let am1: BigInt = &an - 1u32;
    let bm1: BigInt = &bn - 1u32;
    let gcd = am1.gcd(&bm1);
    let norm = an.max(bn);
    let arch_den = am1.max(bm1);
    let h = big_log(&norm);
    let h_y = big_log_ratio(&norm, &arch_den) + big_log(&gcd);
    BczRow {
        n,
        h,
        h_y,
        ratio: h_y / h,
        norm,
        arch_den,
        gcd,
        dependent: multiplicatively_dependent(a, b),
    }
}

/// One iterate of a height-ratio series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub n: usize,
    pub bits: u64,
    pub h: f64,
    pub h_y: HeightValue,
    /// `h_Y / h`, present only when `h > 0` and `h_Y` is finite.
    pub ratio: Option<f64>,
    pub parts: Option<GcdHeightParts>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightSeries {
    pub rows: Vec<SeriesRow>,
    pub orbit: Orbit,
}

/// Height row for a single point.
pub fn series_row(n: usize, y: &SubschemeIdeal, x: &ProjPoint) -> Result<SeriesRow, GeomError> {
    let h = weil_height(x);
    let parts = subscheme_height_exact(y, x)?;
    let h_y = parts.as_ref().map_or(HeightValue::Infinite, GcdHeightParts::value);
    let ratio = match h_y.total() {
        Some(t) if h > 0.0 => Some(t / h),
        _ => None,
    };
    Ok(SeriesRow {
        n,
        bits: x.bits(),
        h,
        h_y,
        ratio,
        parts,
    })
}

/// `h(fⁿx)` and `h_Y(fⁿx)` for `n = 0..=n_max`. Rows stop early with the
/// orbit when an iterate lands in the indeterminacy locus.
pub fn height_ratio_series(
    f: &RationalMap,
    y: &SubschemeIdeal,
    start: &ProjPoint,
    n_max: usize,
) -> Result<HeightSeries, GeomError> {
    if y.arity() != f.arity() {
        return Err(GeomError::ArityMismatch {
            expected: f.arity(),
            got: y.arity(),
        });
    }
    let orbit = orbit(f, start, n_max)?;
    let rows = orbit
        .points
        .par_iter()
        .enumerate()
        .map(|(n, x)| series_row(n, y, x))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HeightSeries { rows, orbit })
}
