//! Sparse multivariate polynomials with arbitrary-precision integer
//! coefficients.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose ordering is graded
//! lexicographic (total degree first, then exponents with `x0` most
//! significant). The map never stores a zero coefficient, so structural
//! equality is polynomial equality.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ffield::{self, UniPolyFp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("substitution component {index} is not homogeneous")]
    InhomogeneousSubstitution { index: usize },
    #[error("substitution components have unequal degrees ({first} and {other})")]
    UnequalSubstitutionDegrees { first: u32, other: u32 },
}

/// Exponent vector of fixed arity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn var(arity: usize, index: usize) -> Self {
        let mut e = vec![0; arity];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self / other`; caller guarantees divisibility.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree of a polynomial; the zero polynomial gets its own tag and sorts
/// below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    ZeroPolynomial,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::ZeroPolynomial => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BigPoly {
    arity: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl BigPoly {
    pub fn zero(arity: usize) -> Self {
        BigPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, BigInt::one())
    }

    pub fn constant(arity: usize, c: BigInt) -> Self {
        Self::from_term(Monomial::one(arity), c)
    }

    pub fn var(arity: usize, index: usize) -> Self {
        assert!(index < arity, "variable x{index} out of range for arity {arity}");
        Self::from_term(Monomial::var(arity, index), BigInt::one())
    }

    pub fn from_term(m: Monomial, c: BigInt) -> Self {
        let arity = m.arity();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        BigPoly { arity, terms }
    }

    /// Build from possibly repeated, possibly zero terms.
    pub fn from_terms<I>(arity: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.arity(), arity, "monomial arity mismatch");
            *acc.entry(m).or_insert_with(BigInt::zero) += c;
        }
        Self::from_accumulator(arity, acc)
    }

    fn from_accumulator(arity: usize, acc: HashMap<Monomial, BigInt>) -> Self {
        BigPoly {
            arity,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.total_degree() == 0)
    }

    pub fn degree(&self) -> Degree {
        match self.terms.keys().next_back() {
            Some(m) => Degree::Finite(m.total_degree()),
            None => Degree::ZeroPolynomial,
        }
    }

    /// Largest term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// `(true, d)` when every term has total degree `d`. The zero polynomial
    /// is vacuously homogeneous with the zero-polynomial degree tag.
    pub fn is_homogeneous(&self) -> (bool, Degree) {
        let mut degs = self.terms.keys().map(Monomial::total_degree);
        match degs.next() {
            None => (true, Degree::ZeroPolynomial),
            Some(d) => {
                if degs.all(|e| e == d) {
                    (true, Degree::Finite(d))
                } else {
                    (false, self.degree())
                }
            }
        }
    }

    /// Highest power of `x_var` occurring; 0 for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    fn check_arity(&self, other: &BigPoly) -> Result<(), PolyError> {
        if self.arity != other.arity {
            return Err(PolyError::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &BigPoly) -> Result<BigPoly, PolyError> {
        self.check_arity(other)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let slot = terms.entry(m.clone()).or_insert_with(BigInt::zero);
            *slot += c;
            if slot.is_zero() {
                terms.remove(m);
            }
        }
        Ok(BigPoly {
            arity: self.arity,
            terms,
        })
    }

    pub fn try_sub(&self, other: &BigPoly) -> Result<BigPoly, PolyError> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &BigPoly) -> Result<BigPoly, PolyError> {
        self.check_arity(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(BigPoly::zero(self.arity));
        }
        if other.terms.len() == 1 {
            let (m, c) = other.terms.iter().next().unwrap();
            return Ok(self.mul_term(m, c));
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            return Ok(other.mul_term(m, c));
        }
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len() * other.terms.len() / 2);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        Ok(Self::from_accumulator(self.arity, acc))
    }

    /// Multiply by a single term `c·m`. Monomial multiplication preserves the
    /// term order, so no re-sorting is required.
    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> BigPoly {
        if c.is_zero() {
            return BigPoly::zero(self.arity);
        }
        BigPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> BigPoly {
        self.mul_term(&Monomial::one(self.arity), c)
    }

    pub fn pow(&self, mut e: u32) -> BigPoly {
        let mut base = self.clone();
        let mut acc = BigPoly::one(self.arity);
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            let m = Monomial(m.0.iter().map(|x| x * e).collect());
            return BigPoly::from_term(m, Pow::pow(c, e));
        }
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact value at an integer point.
    pub fn eval_int(&self, point: &[BigInt]) -> Result<BigInt, PolyError> {
        if point.len() != self.arity {
            return Err(PolyError::LengthMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        let mut powers: HashMap<(usize, u32), BigInt> = HashMap::new();
        let mut sum = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = powers
                    .entry((i, e))
                    .or_insert_with(|| Pow::pow(&point[i], e));
                t *= &*pw;
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Substitute `subst[i]` for `xᵢ`. All nonzero substitution components
    /// must be homogeneous of one common degree; the result lives in their
    /// arity.
    pub fn compose(&self, subst: &[BigPoly]) -> Result<BigPoly, PolyError> {
        if subst.len() != self.arity {
            return Err(PolyError::LengthMismatch {
                expected: self.arity,
                got: subst.len(),
            });
        }
        let target_arity = subst.first().map(BigPoly::arity).unwrap_or(self.arity);
        let mut common: Option<u32> = None;
        for (i, s) in subst.iter().enumerate() {
            if s.arity != target_arity {
                return Err(PolyError::ArityMismatch {
                    left: target_arity,
                    right: s.arity,
                });
            }
            match s.is_homogeneous() {
                (false, _) => return Err(PolyError::InhomogeneousSubstitution { index: i }),
                (true, Degree::Finite(d)) => match common {
                    None => common = Some(d),
                    Some(c) if c != d => {
                        return Err(PolyError::UnequalSubstitutionDegrees { first: c, other: d })
                    }
                    _ => {}
                },
                (true, Degree::ZeroPolynomial) => {}
            }
        }

        // powers[i][e] = subst[i]^e for every exponent e that occurs
        let mut powers: Vec<BTreeMap<u32, BigPoly>> = vec![BTreeMap::new(); self.arity];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    powers[i].insert(e, BigPoly::zero(0));
                }
            }
        }
        for (i, table) in powers.iter_mut().enumerate() {
            let mut prev_e = 0u32;
            let mut prev = BigPoly::one(target_arity);
            for (&e, slot) in table.iter_mut() {
                let step = subst[i].pow(e - prev_e);
                prev = &prev * &step;
                prev_e = e;
                *slot = prev.clone();
            }
        }

        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in &self.terms {
            let mut factors: Vec<&BigPoly> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, e)| &powers[i][e])
                .collect();
            factors.sort_by_key(|p| p.num_terms());
            let mut prod = BigPoly::constant(target_arity, c.clone());
            let last = factors.pop();
            for f in factors {
                prod = &prod * f;
            }
            match last {
                None => {
                    for (k, v) in prod.terms {
                        *acc.entry(k).or_insert_with(BigInt::zero) += v;
                    }
                }
                Some(f) => {
                    for (ma, ca) in &prod.terms {
                        for (mb, cb) in &f.terms {
                            *acc.entry(ma.mul(mb)).or_insert_with(BigInt::zero) += ca * cb;
                        }
                    }
                }
            }
        }
        Ok(Self::from_accumulator(target_arity, acc))
    }

    /// Non-negative gcd of the coefficients; 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// `self / content`, leaving the sign untouched.
    pub fn primitive_part(&self) -> BigPoly {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        BigPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v / &c)).collect(),
        }
    }

    /// Flip the sign if needed so the leading coefficient is positive.
    pub fn normalize_sign(self) -> BigPoly {
        match self.leading_term() {
            Some((_, c)) if c.is_negative() => -&self,
            _ => self,
        }
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_exponents(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Monomial::one(self.arity);
        };
        let mut e = first.0.clone();
        for m in it {
            for (a, b) in e.iter_mut().zip(&m.0) {
                *a = (*a).min(*b);
            }
        }
        Monomial(e)
    }

    /// Divide by a monomial that divides every term.
    pub fn div_monomial(&self, m: &Monomial) -> BigPoly {
        BigPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(k, v)| (k.div(m), v.clone())).collect(),
        }
    }

    /// Exact quotient `self / d` over the integers, or `None` when `d` does not
    /// divide `self`.
    pub fn div_exact(&self, d: &BigPoly) -> Option<BigPoly> {
        if d.is_zero() || self.arity != d.arity {
            return None;
        }
        if self.is_zero() {
            return Some(BigPoly::zero(self.arity));
        }
        let (lm_d, lc_d) = d.leading_term()?;
        if d.terms.len() == 1 {
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                if !lm_d.divides(m) {
                    return None;
                }
                let (q, r) = c.div_rem(lc_d);
                if !r.is_zero() {
                    return None;
                }
                terms.insert(m.div(lm_d), q);
            }
            return Some(BigPoly {
                arity: self.arity,
                terms,
            });
        }
        let mut rem = self.clone();
        let mut quot: HashMap<Monomial, BigInt> = HashMap::new();
        while let Some((lm, lc)) = rem.leading_term() {
            if !lm_d.divides(lm) {
                return None;
            }
            let (qc, r) = lc.div_rem(lc_d);
            if !r.is_zero() {
                return None;
            }
            let qm = lm.div(lm_d);
            // subtract qc·qm·d term by term
            for (m, c) in &d.terms {
                let key = m.mul(&qm);
                let slot = rem.terms.entry(key.clone()).or_insert_with(BigInt::zero);
                *slot -= &qc * c;
                if slot.is_zero() {
                    rem.terms.remove(&key);
                }
            }
            quot.insert(qm, qc);
        }
        Some(Self::from_accumulator(self.arity, quot))
    }

    /// Coefficients in `x_var`: entry `i` multiplies `x_var^i` and is free of
    /// `x_var`.
    fn to_univariate(&self, var: usize) -> Vec<BigPoly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![BigPoly::zero(self.arity); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0[var] as usize;
            let mut k = m.0.clone();
            k[var] = 0;
            out[e].terms.insert(Monomial(k), c.clone());
        }
        out
    }

    fn from_univariate(arity: usize, var: usize, coeffs: &[BigPoly]) -> BigPoly {
        let mut terms = BTreeMap::new();
        for (e, c) in coeffs.iter().enumerate() {
            for (m, v) in &c.terms {
                let mut k = m.0.clone();
                k[var] += e as u32;
                terms.insert(Monomial(k), v.clone());
            }
        }
        BigPoly { arity, terms }
    }
}

impl Add for &BigPoly {
    type Output = BigPoly;
    fn add(self, rhs: &BigPoly) -> BigPoly {
        self.try_add(rhs).expect("polynomial arity mismatch")
    }
}

impl Sub for &BigPoly {
    type Output = BigPoly;
    fn sub(self, rhs: &BigPoly) -> BigPoly {
        self.try_sub(rhs).expect("polynomial arity mismatch")
    }
}

impl Mul for &BigPoly {
    type Output = BigPoly;
    fn mul(self, rhs: &BigPoly) -> BigPoly {
        self.try_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl Neg for &BigPoly {
    type Output = BigPoly;
    fn neg(self) -> BigPoly {
        BigPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

/// Renders in the grammar accepted by [`crate::polyparse`], highest term
/// first, e.g. `x0^2*x1 - 3*x2^3`.
impl fmt::Display for BigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(j, &e)| if e == 1 { format!("x{j}") } else { format!("x{j}^{e}") })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Primitive gcd with positive leading coefficient. `gcd(p, 0)` is the
/// normalized primitive part of `p`; `gcd(0, 0) = 0`.
pub fn gcd_multivar(p: &BigPoly, q: &BigPoly) -> Result<BigPoly, PolyError> {
    p.check_arity(q)?;
    let arity = p.arity;
    if p.is_zero() && q.is_zero() {
        return Ok(BigPoly::zero(arity));
    }
    if q.is_zero() {
        return Ok(p.primitive_part().normalize_sign());
    }
    if p.is_zero() {
        return Ok(q.primitive_part().normalize_sign());
    }
    let p1 = p.primitive_part();
    let q1 = q.primitive_part();
    let mp = p1.min_exponents();
    let mq = q1.min_exponents();
    let common = Monomial(mp.0.iter().zip(&mq.0).map(|(a, b)| *a.min(b)).collect());
    let p2 = p1.div_monomial(&mp);
    let q2 = q1.div_monomial(&mq);

    let core = if p2.is_constant() || q2.is_constant() || certify_coprime(&p2, &q2) {
        BigPoly::one(arity)
    } else {
        let top = (0..arity).rev().find(|&v| p2.degree_in(v) > 0 || q2.degree_in(v) > 0);
        let g = match top {
            Some(v) => gcd_recursive(&p2, &q2, v),
            None => BigPoly::one(arity),
        };
        g.primitive_part()
    };
    let g = core.mul_term(&common, &BigInt::one()).normalize_sign();
    debug_assert!(p.div_exact(&g).is_some() && q.div_exact(&g).is_some());
    Ok(g)
}

const CERT_PRIMES: [u64; 2] = [2_305_843_009_213_693_951, 4_611_686_018_427_387_847];

/// Rigorous coprimality certificate by restriction to a random line modulo a
/// large prime.
///
/// If `g` divides both inputs then `top(g)` divides `top(p)`; choosing the
/// line direction `b` with `top(p)(b) ≠ 0 (mod ℓ)` forces `g(a + b·t)` to keep
/// its full degree mod `ℓ`, so a constant univariate gcd proves `g` is
/// constant. Returns `false` when no certificate was found, which says
/// nothing about the true gcd.
fn certify_coprime(p: &BigPoly, q: &BigPoly) -> bool {
    let n = p.arity;
    let Some(dp) = p.degree().finite() else { return false };
    let Some(dq) = q.degree().finite() else { return false };
    let top_p = BigPoly {
        arity: n,
        terms: p
            .terms
            .iter()
            .filter(|(m, _)| m.total_degree() == dp)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x9cd_0f1e);
    for &ell in &CERT_PRIMES {
        let tp = ffield::reduce_poly_raw(&top_p, ell);
        let fp = ffield::reduce_poly_raw(p, ell);
        let fq = ffield::reduce_poly_raw(q, ell);
        for _ in 0..2 {
            let a: Vec<u64> = (0..n).map(|_| rng.gen_range(0..ell)).collect();
            let b: Vec<u64> = (0..n).map(|_| rng.gen_range(0..ell)).collect();
            if tp.eval(&b) == 0 {
                continue;
            }
            let line = |t: u64| -> Vec<u64> {
                a.iter()
                    .zip(&b)
                    .map(|(&x, &y)| ffield::add_mod(x, ffield::mul_mod(y, t, ell), ell))
                    .collect()
            };
            let restrict = |f: &ffield::FpPoly, d: u32| -> UniPolyFp {
                let xs: Vec<u64> = (0..=d as u64).collect();
                let ys: Vec<u64> = xs.iter().map(|&t| f.eval(&line(t))).collect();
                UniPolyFp::interpolate(&xs, &ys, ell)
            };
            let up = restrict(&fp, dp);
            let uq = restrict(&fq, dq);
            if up.gcd(&uq).degree() == Some(0) {
                return true;
            }
        }
    }
    false
}

/// Gcd of nonzero `p`, `q` involving only `x0..=x_var`, up to an integer
/// factor. Primitive-part recursion on `x_var` with a subresultant remainder
/// sequence over `ℤ[x0..x_{var−1}]`.
fn gcd_recursive(p: &BigPoly, q: &BigPoly, var: usize) -> BigPoly {
    let arity = p.arity;
    let dp = p.degree_in(var);
    let dq = q.degree_in(var);
    if dp == 0 && dq == 0 {
        return match var.checked_sub(1) {
            Some(v) => gcd_recursive(p, q, v),
            None => BigPoly::one(arity),
        };
    }
    let up = p.to_univariate(var);
    let uq = q.to_univariate(var);
    let cp = univariate_content(&up, var);
    let cq = univariate_content(&uq, var);
    let c = match var.checked_sub(1) {
        Some(v) => gcd_recursive(&cp, &cq, v),
        None => BigPoly::one(arity),
    };
    if dp == 0 || dq == 0 {
        return c.primitive_part();
    }
    let ap: Vec<BigPoly> = up.iter().map(|x| x.div_exact(&cp).expect("content divides")).collect();
    let aq: Vec<BigPoly> = uq.iter().map(|x| x.div_exact(&cq).expect("content divides")).collect();
    let g = subresultant_gcd(ap, aq);
    let g = if g.len() <= 1 {
        vec![BigPoly::one(arity)]
    } else {
        let cg = univariate_content(&g, var);
        g.iter().map(|x| x.div_exact(&cg).expect("content divides")).collect()
    };
    let g = BigPoly::from_univariate(arity, var, &g);
    (&c * &g).primitive_part()
}

/// Gcd of the coefficient list in `ℤ[x0..x_{var−1}]` (primitive, positive).
fn univariate_content(coeffs: &[BigPoly], var: usize) -> BigPoly {
    let arity = coeffs[0].arity;
    let mut nonzero = coeffs.iter().filter(|c| !c.is_zero());
    let Some(first) = nonzero.next() else {
        return BigPoly::zero(arity);
    };
    let mut g = first.primitive_part().normalize_sign();
    for c in nonzero {
        if g.is_constant() {
            break;
        }
        g = match var.checked_sub(1) {
            Some(v) => gcd_recursive(&g, c, v).primitive_part().normalize_sign(),
            None => BigPoly::one(arity),
        };
    }
    if g.is_constant() {
        BigPoly::one(arity)
    } else {
        g
    }
}

fn trim(mut a: Vec<BigPoly>) -> Vec<BigPoly> {
    while a.len() > 1 && a.last().is_some_and(BigPoly::is_zero) {
        a.pop();
    }
    if a.len() == 1 && a[0].is_zero() {
        a.clear();
    }
    a
}

/// Pseudo-remainder `lc(b)^(deg a − deg b + 1)·a mod b`.
fn pseudo_rem(a: &[BigPoly], b: &[BigPoly]) -> Vec<BigPoly> {
    let db = b.len() - 1;
    let lcb = &b[db];
    let mut r = a.to_vec();
    let mut e = (a.len() - 1) as i64 - db as i64 + 1;
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lcr = r[dr].clone();
        let shift = dr - db;
        for x in r.iter_mut() {
            *x = &*x * lcb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &(&lcr * bc);
        }
        r = trim(r);
        e -= 1;
    }
    if e > 0 {
        let f = lcb.pow(e as u32);
        for x in r.iter_mut() {
            *x = &*x * &f;
        }
    }
    r
}

/// Last nonzero element of the subresultant remainder sequence, as a
/// coefficient list. A single-element result means the gcd is free of the
/// main variable.
fn subresultant_gcd(a: Vec<BigPoly>, b: Vec<BigPoly>) -> Vec<BigPoly> {
    let arity = a[0].arity;
    let (mut a, mut b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut g = BigPoly::one(arity);
    let mut h = BigPoly::one(arity);
    loop {
        let delta = (a.len() - b.len()) as u32;
        let r = pseudo_rem(&a, &b);
        if r.is_empty() {
            return b;
        }
        if r.len() == 1 {
            return vec![BigPoly::one(arity)];
        }
        let divisor = &g * &h.pow(delta);
        let next: Vec<BigPoly> = r
            .iter()
            .map(|x| x.div_exact(&divisor).expect("subresultant division is exact"))
            .collect();
        a = b;
        b = next;
        g = a.last().unwrap().clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            d => g
                .pow(d)
                .div_exact(&h.pow(d - 1))
                .expect("subresultant division is exact"),
        };
    }
}
