//! Arithmetic modulo a word-sized prime, polynomials over 𝔽_p, and
//! enumeration of ℙᴺ(𝔽_p).
//!
//! Everything here works on raw `u64` residues with 128-bit intermediate
//! products. Primes must stay below 2⁶² so that sums of two residues never
//! overflow.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::poly::BigPoly;

/// Largest modulus accepted by [`Prime::new`].
pub const MAX_PRIME: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds 2^62")]
    TooLarge(u64),
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("zero has no inverse")]
    ZeroInverse,
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse by Fermat's little theorem; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Reduce a big integer into `[0, p)`.
pub fn reduce_bigint(x: &BigInt, p: u64) -> u64 {
    let r = (x.magnitude() % p).to_u64().unwrap_or(0);
    if x.sign() == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

/// Miller–Rabin with the first twelve prime bases, which is deterministic for
/// every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A verified prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p >= MAX_PRIME {
            return Err(FieldError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of 𝔽_p carrying its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FpElement {
    value: u64,
    modulus: Prime,
}

impl FpElement {
    pub fn new(value: u64, modulus: Prime) -> Self {
        FpElement {
            value: value % modulus.0,
            modulus,
        }
    }

    pub fn from_bigint(x: &BigInt, modulus: Prime) -> Self {
        FpElement {
            value: reduce_bigint(x, modulus.0),
            modulus,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> Prime {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, exp: u64) -> Self {
        FpElement {
            value: pow_mod(self.value, exp, self.modulus.0),
            modulus: self.modulus,
        }
    }

    pub fn inv(self) -> Result<Self, FieldError> {
        if self.value == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(FpElement {
            value: inv_mod(self.value, self.modulus.0),
            modulus: self.modulus,
        })
    }

    fn check(self, other: Self) -> u64 {
        assert_eq!(
            self.modulus, other.modulus,
            "mixed moduli in 𝔽_p arithmetic"
        );
        self.modulus.0
    }
}

impl Add for FpElement {
    type Output = FpElement;
    fn add(self, rhs: Self) -> Self {
        let p = self.check(rhs);
        FpElement {
            value: add_mod(self.value, rhs.value, p),
            modulus: self.modulus,
        }
    }
}

impl Sub for FpElement {
    type Output = FpElement;
    fn sub(self, rhs: Self) -> Self {
        let p = self.check(rhs);
        FpElement {
            value: sub_mod(self.value, rhs.value, p),
            modulus: self.modulus,
        }
    }
}

impl Mul for FpElement {
    type Output = FpElement;
    fn mul(self, rhs: Self) -> Self {
        let p = self.check(rhs);
        FpElement {
            value: mul_mod(self.value, rhs.value, p),
            modulus: self.modulus,
        }
    }
}

impl Neg for FpElement {
    type Output = FpElement;
    fn neg(self) -> Self {
        FpElement {
            value: sub_mod(0, self.value, self.modulus.0),
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for FpElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// Sparse multivariate polynomial over 𝔽_p laid out for fast repeated
/// evaluation: a flat exponent table plus per-variable maximum exponents so
/// that a single power table per point serves every term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    arity: usize,
    modulus: u64,
    coeffs: Vec<u64>,
    // row-major, `arity` entries per term
    exps: Vec<u32>,
    max_exp: Vec<u32>,
}

impl FpPoly {
    pub fn zero(arity: usize, modulus: u64) -> Self {
        FpPoly {
            arity,
            modulus,
            coeffs: Vec::new(),
            exps: Vec::new(),
            max_exp: vec![0; arity],
        }
    }

    fn from_map(arity: usize, modulus: u64, map: std::collections::BTreeMap<Vec<u32>, u64>) -> Self {
        let mut out = FpPoly::zero(arity, modulus);
        for (e, c) in map.into_iter().rev() {
            if c == 0 {
                continue;
            }
            for (m, &x) in out.max_exp.iter_mut().zip(&e) {
                *m = (*m).max(x);
            }
            out.coeffs.push(c);
            out.exps.extend_from_slice(&e);
        }
        out
    }

    pub fn from_terms<I>(arity: usize, modulus: u64, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, u64)>,
    {
        let mut map = std::collections::BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), arity);
            let slot = map.entry(e).or_insert(0u64);
            *slot = add_mod(*slot, c % modulus, modulus);
        }
        FpPoly::from_map(arity, modulus, map)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], u64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (&self.exps[i * self.arity..(i + 1) * self.arity], c))
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms().map(|(e, _)| e.iter().sum()).max()
    }

    pub fn eval(&self, point: &[u64]) -> u64 {
        assert_eq!(point.len(), self.arity, "evaluation point has wrong length");
        let p = self.modulus;
        let tables: Vec<Vec<u64>> = point
            .iter()
            .zip(&self.max_exp)
            .map(|(&x, &m)| {
                let x = x % p;
                let mut t = Vec::with_capacity(m as usize + 1);
                let mut acc = 1 % p;
                t.push(acc);
                for _ in 0..m {
                    acc = mul_mod(acc, x, p);
                    t.push(acc);
                }
                t
            })
            .collect();
        self.eval_with_tables(&tables)
    }

    /// Evaluate using caller-provided power tables (`tables[i][e] = xᵢᵉ`).
    pub fn eval_with_tables(&self, tables: &[Vec<u64>]) -> u64 {
        let p = self.modulus;
        let mut sum = 0u64;
        for (e, c) in self.terms() {
            let mut t = c;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = mul_mod(t, tables[i][k as usize], p);
                }
            }
            sum = add_mod(sum, t, p);
        }
        sum
    }

    pub fn max_exponents(&self) -> &[u32] {
        &self.max_exp
    }

    pub fn add(&self, other: &FpPoly) -> FpPoly {
        assert_eq!(self.arity, other.arity);
        assert_eq!(self.modulus, other.modulus);
        FpPoly::from_terms(
            self.arity,
            self.modulus,
            self.terms()
                .chain(other.terms())
                .map(|(e, c)| (e.to_vec(), c)),
        )
    }

    pub fn scale(&self, c: u64) -> FpPoly {
        let p = self.modulus;
        FpPoly::from_terms(
            self.arity,
            p,
            self.terms().map(|(e, k)| (e.to_vec(), mul_mod(k, c % p, p))),
        )
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        assert_eq!(self.arity, other.arity);
        assert_eq!(self.modulus, other.modulus);
        let p = self.modulus;
        let mut map = std::collections::BTreeMap::new();
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let slot = map.entry(e).or_insert(0u64);
                *slot = add_mod(*slot, mul_mod(ca, cb, p), p);
            }
        }
        FpPoly::from_map(self.arity, p, map)
    }

    /// Substitute `xᵢ ↦ Σⱼ m[i][j]·yⱼ`.
    pub fn substitute_linear(&self, m: &[Vec<u64>]) -> FpPoly {
        let p = self.modulus;
        let n = self.arity;
        assert_eq!(m.len(), n);
        let linear: Vec<FpPoly> = m
            .iter()
            .map(|row| {
                FpPoly::from_terms(
                    n,
                    p,
                    row.iter().enumerate().map(|(j, &c)| {
                        let mut e = vec![0; n];
                        e[j] = 1;
                        (e, c)
                    }),
                )
            })
            .collect();
        let one = FpPoly::from_terms(n, p, [(vec![0; n], 1)]);
        let mut powers: Vec<Vec<FpPoly>> = Vec::with_capacity(n);
        for (i, l) in linear.iter().enumerate() {
            let mut pw = vec![one.clone()];
            for k in 0..self.max_exp[i] as usize {
                let next = pw[k].mul(l);
                pw.push(next);
            }
            powers.push(pw);
        }
        let mut acc = FpPoly::zero(n, p);
        for (e, c) in self.terms() {
            let mut t = one.scale(c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&powers[i][k as usize]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Restrict to the line `xₖ ↦ values` for every variable except `var`,
    /// giving a univariate polynomial in `x_var`.
    pub fn specialize_to_univariate(&self, var: usize, values: &[u64]) -> UniPolyFp {
        let p = self.modulus;
        let mut coeffs = vec![0u64; self.max_exp[var] as usize + 1];
        for (e, c) in self.terms() {
            let mut t = c;
            for (i, &k) in e.iter().enumerate() {
                if i != var && k > 0 {
                    t = mul_mod(t, pow_mod(values[i], k as u64, p), p);
                }
            }
            let slot = &mut coeffs[e[var] as usize];
            *slot = add_mod(*slot, t, p);
        }
        UniPolyFp::new(coeffs, p)
    }
}

/// Reduce an integer polynomial modulo a prime into evaluation form.
///
/// Any prime modulus is accepted here; the size restriction for fiber counting
/// lives with the fiber counter.
pub fn reduce_poly(poly: &BigPoly, prime: Prime) -> FpPoly {
    reduce_poly_raw(poly, prime.get())
}

/// [`reduce_poly`] for a modulus already known to be prime.
pub(crate) fn reduce_poly_raw(poly: &BigPoly, p: u64) -> FpPoly {
    FpPoly::from_terms(
        poly.arity(),
        p,
        poly.terms()
            .map(|(m, c)| (m.exponents().to_vec(), reduce_bigint(c, p))),
    )
}

/// Dense univariate polynomial over 𝔽_p; `coeffs[i]` multiplies `tⁱ`, with no
/// trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniPolyFp {
    coeffs: Vec<u64>,
    modulus: u64,
}

impl UniPolyFp {
    pub fn new(mut coeffs: Vec<u64>, modulus: u64) -> Self {
        for c in coeffs.iter_mut() {
            *c %= modulus;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UniPolyFp { coeffs, modulus }
    }

    pub fn zero(modulus: u64) -> Self {
        UniPolyFp {
            coeffs: Vec::new(),
            modulus,
        }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let p = self.modulus;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| add_mod(mul_mod(acc, x, p), c, p))
    }

    pub fn derivative(&self) -> UniPolyFp {
        let p = self.modulus;
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
            .collect();
        UniPolyFp::new(c, p)
    }

    pub fn monic(&self) -> UniPolyFp {
        if self.is_zero() {
            return self.clone();
        }
        let inv = inv_mod(self.leading(), self.modulus);
        let p = self.modulus;
        UniPolyFp::new(self.coeffs.iter().map(|&c| mul_mod(c, inv, p)).collect(), p)
    }

    pub fn rem(&self, d: &UniPolyFp) -> UniPolyFp {
        let p = self.modulus;
        let dd = d.degree().expect("division by zero polynomial");
        let inv = inv_mod(d.leading(), p);
        let mut r = self.coeffs.clone();
        while r.len() > dd {
            let top = r.len() - 1;
            let q = mul_mod(r[top], inv, p);
            if q != 0 {
                let shift = top - dd;
                for (i, &c) in d.coeffs.iter().enumerate() {
                    r[shift + i] = sub_mod(r[shift + i], mul_mod(q, c, p), p);
                }
            }
            r.pop();
        }
        UniPolyFp::new(r, p)
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, other: &UniPolyFp) -> UniPolyFp {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Number of distinct roots in the algebraic closure. Valid when every
    /// root multiplicity is below the characteristic, which holds whenever
    /// the degree is below it.
    pub fn distinct_root_count(&self) -> usize {
        match self.degree() {
            None | Some(0) => 0,
            Some(d) => {
                let g = self.gcd(&self.derivative());
                d - g.degree().unwrap_or(0)
            }
        }
    }

    /// Squarefree part (monic).
    pub fn squarefree(&self) -> UniPolyFp {
        if self.degree().unwrap_or(0) == 0 {
            return UniPolyFp::new(vec![1], self.modulus);
        }
        let g = self.gcd(&self.derivative());
        let (q, r) = self.monic().div_rem(&g);
        debug_assert!(r.is_zero());
        q.monic()
    }

    pub fn div_rem(&self, d: &UniPolyFp) -> (UniPolyFp, UniPolyFp) {
        let p = self.modulus;
        let dd = d.degree().expect("division by zero polynomial");
        let inv = inv_mod(d.leading(), p);
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UniPolyFp::zero(p), self.clone());
        }
        let mut q = vec![0u64; r.len() - dd];
        while r.len() > dd {
            let top = r.len() - 1;
            let c = mul_mod(r[top], inv, p);
            let shift = top - dd;
            q[shift] = c;
            if c != 0 {
                for (i, &dc) in d.coeffs.iter().enumerate() {
                    r[shift + i] = sub_mod(r[shift + i], mul_mod(c, dc, p), p);
                }
            }
            r.pop();
        }
        (UniPolyFp::new(q, p), UniPolyFp::new(r, p))
    }

    /// Resultant of `self` and `other`, taken with their actual degrees.
    pub fn resultant(&self, other: &UniPolyFp) -> u64 {
        let p = self.modulus;
        let (mut a, mut b) = (self.clone(), other.clone());
        if a.is_zero() || b.is_zero() {
            return 0;
        }
        let mut acc = 1u64;
        loop {
            let da = a.degree().unwrap();
            let db = b.degree().unwrap();
            if db == 0 {
                return mul_mod(acc, pow_mod(b.leading(), da as u64, p), p);
            }
            let r = a.rem(&b);
            if r.is_zero() {
                return 0;
            }
            let dr = r.degree().unwrap();
            if (da * db) % 2 == 1 {
                acc = sub_mod(0, acc, p);
            }
            acc = mul_mod(acc, pow_mod(b.leading(), (da - dr) as u64, p), p);
            a = b;
            b = r;
        }
    }

    /// Lagrange interpolation through `(xs[i], ys[i])` with distinct `xs`.
    pub fn interpolate(xs: &[u64], ys: &[u64], modulus: u64) -> UniPolyFp {
        let p = modulus;
        let n = xs.len();
        assert_eq!(n, ys.len());
        // Newton divided differences
        let mut dd: Vec<u64> = ys.iter().map(|&y| y % p).collect();
        for j in 1..n {
            for i in (j..n).rev() {
                let num = sub_mod(dd[i], dd[i - 1], p);
                let den = sub_mod(xs[i] % p, xs[i - j] % p, p);
                dd[i] = mul_mod(num, inv_mod(den, p), p);
            }
        }
        let mut coeffs = vec![0u64; n.max(1)];
        for k in (0..n).rev() {
            // coeffs = coeffs * (t - xs[k]) + dd[k]
            let mut next = vec![0u64; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] = add_mod(next[i + 1], c, p);
                next[i] = sub_mod(next[i], mul_mod(c, xs[k] % p, p), p);
            }
            next[0] = add_mod(next[0], dd[k], p);
            next.truncate(n);
            coeffs = next;
        }
        UniPolyFp::new(coeffs, p)
    }
}

/// Number of points of ℙᴺ(𝔽_p), i.e. `1 + p + … + pᴺ`.
pub fn proj_point_count(n: usize, p: u64) -> u64 {
    (0..=n).map(|k| p.pow(k as u32)).sum()
}

/// The point of ℙᴺ(𝔽_p) with the given index in `0..proj_point_count(n, p)`.
///
/// Points are normalized so the last nonzero coordinate is 1. Indices are
/// grouped by the position `k` of that coordinate (`k = 0` first), and within
/// a group the free coordinates `x₀ … x_{k−1}` are read as base-`p` digits
/// with `x₀` most significant.
pub fn point_at(n: usize, p: u64, mut index: u64) -> Vec<u64> {
    let mut k = 0;
    loop {
        let block = p.pow(k as u32);
        if index < block {
            break;
        }
        index -= block;
        k += 1;
        assert!(k <= n, "point index out of range");
    }
    let mut coords = vec![0u64; n + 1];
    coords[k] = 1;
    for i in (0..k).rev() {
        coords[i] = index % p;
        index /= p;
    }
    coords
}

/// Inverse of [`point_at`] for a vector whose last nonzero coordinate is 1.
pub fn point_index(v: &[u64], p: u64) -> u64 {
    let k = v.iter().rposition(|&x| x != 0).expect("nonzero vector");
    debug_assert_eq!(v[k], 1);
    let offset: u64 = (0..k).map(|j| p.pow(j as u32)).sum();
    offset + v[..k].iter().fold(0u64, |acc, &x| acc * p + x)
}

/// Canonical representatives of ℙᴺ(𝔽_p), last nonzero coordinate equal to 1.
///
/// Use [`point_at`] over a sub-range of indices to split a scan.
pub fn proj_points_fp(n: usize, p: u64) -> impl Iterator<Item = Vec<u64>> {
    (0..proj_point_count(n, p)).map(move |i| point_at(n, p, i))
}

/// Scale a nonzero vector so its last nonzero coordinate is 1. Returns `None`
/// for the zero vector.
pub fn normalize_projective(v: &mut [u64], p: u64) -> Option<()> {
    let k = v.iter().rposition(|&x| x != 0)?;
    let inv = inv_mod(v[k], p);
    for x in v.iter_mut() {
        *x = mul_mod(*x, inv, p);
    }
    Some(())
}
