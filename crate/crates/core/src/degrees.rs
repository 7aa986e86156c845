//! Dynamical degrees and arithmetic-degree estimates.
//!
//! * `d₁` from the degree sequence of reduced iterates.
//! * `d₂` (topological degree on ℙ²) by counting points in fibers over finite
//!   fields.
//! * All `dᵢ` of a monomial map from the eigenvalue moduli of its matrix.
//! * `α_f(x)` from a height sequence.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::ffield::{
    is_prime, mul_mod, normalize_projective, point_at, point_index, proj_point_count,
    reduce_bigint, reduce_poly_raw, sub_mod, FpPoly, UniPolyFp,
};
use crate::projgeom::{GeomError, ProjPoint, RationalMap};

/// Smallest prime accepted for fiber counting.
pub const MIN_FIBER_PRIME: u64 = 50;
pub const DEFAULT_PRIMES: [u64; 3] = [1009, 2003, 4001];
pub const DEFAULT_TARGETS_PER_PRIME: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegreeError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("prime {0} is below the minimum of {MIN_FIBER_PRIME}")]
    PrimeTooSmall(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime {p} is too small for a map of degree {degree}")]
    PrimeBelowBezout { p: u64, degree: u32 },
    #[error("fiber counting needs at least one prime and one target")]
    NoSamples,
    #[error("fiber counting is implemented on the projective plane only (got {0} coordinates)")]
    UnsupportedArity(usize),
    #[error("matrix must be square and nonempty")]
    NotSquare,
    #[error("matrix is singular")]
    Singular,
    #[error("need at least {need} finite heights, got {got}")]
    TooFewHeights { need: usize, got: usize },
}

fn big_to_string<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

// ---------------------------------------------------------------------------
// degree sequences

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeEntry {
    pub n: u32,
    pub degree: u32,
    /// `(deg fⁿ)^{1/n}`
    pub root: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeSequence {
    pub entries: Vec<DegreeEntry>,
    /// Set when the composition cap stopped the sequence before `n_max`.
    pub truncated: bool,
    /// Set when an iterate is constant, so the map is not dominant.
    pub collapsed: bool,
    /// `deg fⁿ / deg fⁿ⁻¹` at the last two entries, or the single root.
    pub d1_estimate: f64,
}

impl DegreeSequence {
    pub fn degrees(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.degree).collect()
    }
}

/// Degrees of the reduced iterates `f¹ … f^{n_max}`.
pub fn degree_sequence(f: &RationalMap, n_max: u32, cap: u64) -> Result<DegreeSequence, DegreeError> {
    let mut entries = Vec::new();
    let mut truncated = false;
    let mut collapsed = false;
    for step in f.iterates(cap).take(n_max as usize) {
        match step {
            Ok((n, g)) => entries.push(DegreeEntry {
                n,
                degree: g.degree(),
                root: (g.degree() as f64).powf(1.0 / n as f64),
            }),
            Err(GeomError::BudgetExceeded { .. }) => {
                truncated = true;
                break;
            }
            Err(GeomError::ConstantMap | GeomError::ZeroMap) => {
                collapsed = true;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let d1_estimate = match entries.as_slice() {
        [] => f.degree() as f64,
        [only] => only.root,
        [.., a, b] => b.degree as f64 / a.degree as f64,
    };
    Ok(DegreeSequence {
        entries,
        truncated,
        collapsed,
        d1_estimate,
    })
}

/// `deg f^{m+n} ≤ deg fᵐ · deg fⁿ` for every index pair in `degrees`
/// (entry `i` holding `deg f^{i+1}`).
pub fn is_submultiplicative(degrees: &[u32]) -> bool {
    let len = degrees.len();
    (1..=len).all(|m| {
        (1..=len - m).all(|n| degrees[m + n - 1] as u64 <= degrees[m - 1] as u64 * degrees[n - 1] as u64)
    })
}

// ---------------------------------------------------------------------------
// topological degree on ℙ² by fiber counting

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberOptions {
    pub primes: Vec<u64>,
    pub targets_per_prime: usize,
    pub seed: u64,
    /// Also count 𝔽_p-rational preimages by exhaustive scan (diagnostic).
    pub rational_scan: bool,
}

impl Default for FiberOptions {
    fn default() -> Self {
        FiberOptions {
            primes: DEFAULT_PRIMES.to_vec(),
            targets_per_prime: DEFAULT_TARGETS_PER_PRIME,
            seed: 0,
            rational_scan: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeFiberCounts {
    pub prime: u64,
    pub targets: Vec<[u64; 3]>,
    /// Distinct preimages over the algebraic closure; `None` when the fiber
    /// could not be resolved into finitely many points.
    pub counts: Vec<Option<u32>>,
    /// 𝔽_p-rational preimages, when the scan ran.
    pub rational_counts: Option<Vec<u32>>,
    pub modes: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub map_degree: u32,
    /// `deg(f)²`
    pub bezout_bound: u64,
    pub per_prime: Vec<PrimeFiberCounts>,
    pub histogram: BTreeMap<u32, usize>,
    pub rational_histogram: BTreeMap<u32, usize>,
    /// Every modal value of `histogram`.
    pub modes: Vec<u32>,
    /// The mode when it is unique.
    pub mode: Option<u32>,
    pub ambiguous: bool,
    /// Every prime has the same unique mode.
    pub stable_across_primes: bool,
    /// Unresolved fibers, or a mode carried by fewer than half the samples.
    pub degenerate: bool,
    /// Rational counts above the Bézout bound (positive-dimensional fibers).
    pub bezout_violations: usize,
    pub seed: u64,
}

fn modes_of(hist: &BTreeMap<u32, usize>) -> Vec<u32> {
    let top = hist.values().copied().max().unwrap_or(0);
    if top == 0 {
        return Vec::new();
    }
    hist.iter().filter(|(_, &c)| c == top).map(|(&k, _)| k).collect()
}

fn det3_mod(m: &[Vec<u64>], p: u64) -> u64 {
    let t = |a: u64, b: u64| mul_mod(a, b, p);
    let minor = |i: usize, j: usize, k: usize, l: usize| sub_mod(t(m[i][k], m[j][l]), t(m[i][l], m[j][k]), p);
    let a = t(m[0][0], minor(1, 2, 1, 2));
    let b = t(m[0][1], minor(1, 2, 0, 2));
    let c = t(m[0][2], minor(1, 2, 0, 1));
    (sub_mod(a, b, p) + c) % p
}

/// Binary resultant in `u0` of `F_a(Mu)`, `F_b(Mu)` dehomogenized at
/// `u2 = 1`. `None` unless both forms keep full degree in `u0` and the result
/// keeps full degree `d²` (no intersection point on `u2 = 0`).
fn projected_resultant(pair: &[FpPoly; 2], m: &[Vec<u64>], d: u32, p: u64) -> Option<UniPolyFp> {
    let col0: Vec<u64> = m.iter().map(|row| row[0]).collect();
    if pair.iter().any(|q| q.eval(&col0) == 0) {
        return None;
    }
    let moved: Vec<FpPoly> = pair.iter().map(|q| q.substitute_linear(m)).collect();
    let n = (d * d) as u64;
    let xs: Vec<u64> = (0..=n).collect();
    let ys: Vec<u64> = xs
        .iter()
        .map(|&c| {
            let a = moved[0].specialize_to_univariate(0, &[0, c, 1]);
            let b = moved[1].specialize_to_univariate(0, &[0, c, 1]);
            a.resultant(&b)
        })
        .collect();
    let r = UniPolyFp::interpolate(&xs, &ys, p);
    (r.degree() == Some(n as usize)).then_some(r)
}

/// `t_{i0}·g_j − t_j·g_{i0}` for the two `j ≠ i0`, where `t_{i0} ≠ 0`.
fn fiber_equations(g: &[FpPoly], t: &[u64], p: u64) -> [FpPoly; 2] {
    let i0 = t.iter().rposition(|&c| c != 0).expect("target is nonzero");
    let mut eqs = (0..3).filter(|&j| j != i0).map(|j| {
        g[j].scale(t[i0]).add(&g[i0].scale(sub_mod(0, t[j], p)))
    });
    [eqs.next().unwrap(), eqs.next().unwrap()]
}

/// Distinct points of the fiber over `t` in ℙ²(𝔽̄_p).
///
/// `V(F_a, F_b)` is the fiber together with the base locus of `g`. After a
/// random projective change of coordinates the points of `V(F_a, F_b)`
/// become the distinct roots of a resultant; base points are recognised as
/// the roots shared with the resultants of unrelated targets. A projection
/// can only merge points, so the larger of two independent projections is
/// kept.
fn geometric_fiber_count(
    g: &[FpPoly],
    t: &[u64],
    aux: &[Vec<u64>],
    d: u32,
    p: u64,
    rng: &mut ChaCha8Rng,
) -> Option<u32> {
    let target = fiber_equations(g, t, p);
    let aux_eqs: Vec<[FpPoly; 2]> = aux.iter().map(|a| fiber_equations(g, a, p)).collect();
    let mut best: Option<u32> = None;
    let mut successes = 0;
    for _ in 0..24 {
        let m: Vec<Vec<u64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(0..p)).collect()).collect();
        if det3_mod(&m, p) == 0 {
            continue;
        }
        let Some(rt) = projected_resultant(&target, &m, d, p) else {
            continue;
        };
        let mut base: Option<UniPolyFp> = None;
        let mut ok = true;
        for eqs in &aux_eqs {
            match projected_resultant(eqs, &m, d, p) {
                Some(r) => {
                    let sq = r.squarefree();
                    base = Some(match base {
                        None => sq,
                        Some(b) => b.gcd(&sq),
                    });
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let base = base.expect("at least one auxiliary target");
        let shared = rt.squarefree().gcd(&base).degree().unwrap_or(0);
        let count = (rt.distinct_root_count() - shared) as u32;
        best = Some(best.map_or(count, |b| b.max(count)));
        successes += 1;
        if successes == 2 {
            break;
        }
    }
    best
}

fn random_target(p: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    point_at(2, p, rng.gen_range(0..proj_point_count(2, p)))
}

/// 𝔽_p-rational preimage counts for each target, by one pass over ℙ²(𝔽_p).
fn rational_counts(g: &[FpPoly], targets: &[Vec<u64>], p: u64) -> Vec<u32> {
    let mut slots: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, t) in targets.iter().enumerate() {
        slots.entry(point_index(t, p)).or_default().push(i);
    }
    let total = proj_point_count(2, p);
    let chunk = 1 << 14;
    let chunks = total.div_ceil(chunk);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut local = vec![0u32; targets.len()];
            let mut img = [0u64; 3];
            for idx in c * chunk..((c + 1) * chunk).min(total) {
                let s = point_at(2, p, idx);
                for (v, q) in img.iter_mut().zip(g) {
                    *v = q.eval(&s);
                }
                if normalize_projective(&mut img, p).is_none() {
                    continue;
                }
                if let Some(hit) = slots.get(&point_index(&img, p)) {
                    for &i in hit {
                        local[i] += 1;
                    }
                }
            }
            local
        })
        .reduce(
            || vec![0u32; targets.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Estimate `d₂(f)` for a map of ℙ² as the modal fiber size over random
/// targets, for each prime in `opts.primes`.
pub fn topological_degree_ff(f: &RationalMap, opts: &FiberOptions) -> Result<FiberReport, DegreeError> {
    if f.arity() != 3 {
        return Err(DegreeError::UnsupportedArity(f.arity()));
    }
    if opts.primes.is_empty() || opts.targets_per_prime == 0 {
        return Err(DegreeError::NoSamples);
    }
    let d = f.degree();
    let bezout = (d as u64) * (d as u64);
    for &p in &opts.primes {
        if p < MIN_FIBER_PRIME {
            return Err(DegreeError::PrimeTooSmall(p));
        }
        if !is_prime(p) {
            return Err(DegreeError::NotPrime(p));
        }
        if p >= 1 << 62 || p <= bezout + 1 {
            return Err(DegreeError::PrimeBelowBezout { p, degree: d });
        }
    }
    let mut per_prime = Vec::new();
    let mut histogram = BTreeMap::new();
    let mut rational_histogram = BTreeMap::new();
    let mut unresolved = 0;
    let mut bezout_violations = 0;
    for &p in &opts.primes {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let g: Vec<FpPoly> = f.components().iter().map(|c| reduce_poly_raw(c, p)).collect();
        let targets: Vec<Vec<u64>> = (0..opts.targets_per_prime).map(|_| random_target(p, &mut rng)).collect();
        let aux: Vec<Vec<u64>> = (0..3).map(|_| random_target(p, &mut rng)).collect();
        let counts: Vec<Option<u32>> = if g.iter().all(FpPoly::is_zero) {
            vec![None; targets.len()]
        } else {
            targets
                .iter()
                .map(|t| geometric_fiber_count(&g, t, &aux, d, p, &mut rng))
                .collect()
        };
        let mut local = BTreeMap::new();
        for c in &counts {
            match c {
                Some(c) => {
                    *local.entry(*c).or_insert(0) += 1;
                    *histogram.entry(*c).or_insert(0) += 1;
                }
                None => unresolved += 1,
            }
        }
        let rational = opts.rational_scan.then(|| rational_counts(&g, &targets, p));
        if let Some(rc) = &rational {
            for &c in rc {
                *rational_histogram.entry(c).or_insert(0) += 1;
                if c as u64 > bezout {
                    bezout_violations += 1;
                }
            }
        }
        per_prime.push(PrimeFiberCounts {
            prime: p,
            targets: targets.iter().map(|t| [t[0], t[1], t[2]]).collect(),
            counts,
            rational_counts: rational,
            modes: modes_of(&local),
        });
    }
    let modes = modes_of(&histogram);
    let mode = (modes.len() == 1).then(|| modes[0]);
    let samples = opts.primes.len() * opts.targets_per_prime;
    let modal_share = mode.map_or(0, |m| histogram[&m]);
    let stable_across_primes = mode.is_some() && per_prime.iter().all(|pp| pp.modes.as_slice() == [mode.unwrap()]);
    Ok(FiberReport {
        map_degree: d,
        bezout_bound: bezout,
        per_prime,
        histogram,
        rational_histogram,
        ambiguous: modes.len() > 1,
        modes,
        mode,
        stable_across_primes,
        degenerate: unresolved > 0 || 2 * modal_share < samples,
        bezout_violations,
        seed: opts.seed,
    })
}

// ---------------------------------------------------------------------------
// monomial maps

/// Monomial self-map of the torus `x ↦ x^A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialMap {
    matrix: Vec<Vec<BigInt>>,
    det: BigInt,
}

impl MonomialMap {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self, DegreeError> {
        let n = matrix.len();
        if n == 0 || matrix.iter().any(|r| r.len() != n) {
            return Err(DegreeError::NotSquare);
        }
        let matrix: Vec<Vec<BigInt>> = matrix
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        let det = bareiss_det(&matrix);
        if det.is_zero() {
            return Err(DegreeError::Singular);
        }
        Ok(MonomialMap { matrix, det })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.matrix
    }

    pub fn det(&self) -> &BigInt {
        &self.det
    }

    /// Matrix of the composite map, `A · B`.
    pub fn compose(&self, other: &MonomialMap) -> MonomialMap {
        let matrix = mat_mul(&self.matrix, &other.matrix);
        MonomialMap {
            det: &self.det * &other.det,
            matrix,
        }
    }
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Fraction-free Gaussian elimination.
pub fn bareiss_det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Characteristic polynomial `det(xI − A)`, coefficients low to high.
pub fn char_poly(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = m.len();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut mk: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = mat_mul(m, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[n - k + 1];
        }
        mk = next;
        let am = mat_mul(m, &mk);
        let tr: BigInt = (0..n).map(|i| &am[i][i]).sum();
        c[n - k] = -(tr / BigInt::from(k));
    }
    c
}

// dense integer polynomials, low to high

fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn primitive(p: Vec<BigInt>) -> Vec<BigInt> {
    let p = trim(p);
    let Some(lead) = p.last() else {
        return p;
    };
    let mut g = p.iter().fold(BigInt::zero(), |a, c| a.gcd(c));
    if lead.is_negative() {
        g = -g;
    }
    p.into_iter().map(|c| c / &g).collect()
}

fn derivative(p: &[BigInt]) -> Vec<BigInt> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c *= lb;
        }
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &lr * bc;
        }
        r = trim(r);
    }
    r
}

fn int_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let (mut a, mut b) = (primitive(a.to_vec()), primitive(b.to_vec()));
    while !b.is_empty() {
        let r = primitive(pseudo_rem(&a, &b));
        a = b;
        b = r;
    }
    primitive(a)
}

/// Exact quotient `a / b` in ℤ[x]; `b` primitive and dividing `a`.
fn int_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let mut q = vec![BigInt::zero(); r.len().saturating_sub(db)];
    while r.len() > db {
        let top = r.len() - 1;
        let (c, rem) = r[top].div_rem(&b[db]);
        debug_assert!(rem.is_zero());
        for (i, bc) in b.iter().enumerate() {
            r[top - db + i] -= &c * bc;
        }
        q[top - db] = c;
        r.pop();
    }
    trim(q)
}

/// Squarefree factorization `p = Π fᵢ^i` (Yun), dropping constant factors.
pub fn squarefree_factors(p: &[BigInt]) -> Vec<(Vec<BigInt>, usize)> {
    let a = primitive(p.to_vec());
    if a.len() <= 1 {
        return Vec::new();
    }
    let mut c = int_gcd(&a, &derivative(&a));
    let mut w = int_div(&a, &c);
    let mut out = Vec::new();
    let mut i = 1;
    while w.len() > 1 {
        let y = int_gcd(&w, &c);
        let z = int_div(&w, &y);
        if z.len() > 1 {
            out.push((z, i));
        }
        c = int_div(&c, &y);
        w = y;
        i += 1;
    }
    out
}

fn horner(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        dv = dv * z + v;
        v = v * z + c;
    }
    (v, dv)
}

/// Roots of a squarefree polynomial by Aberth iteration, then Newton polish.
fn aberth_roots(p: &[BigInt]) -> Vec<Complex64> {
    let deg = p.len() - 1;
    let lead = p[deg].to_f64().expect("finite coefficient");
    let c: Vec<Complex64> = p
        .iter()
        .map(|x| Complex64::new(x.to_f64().expect("finite coefficient") / lead, 0.0))
        .collect();
    if deg == 1 {
        return vec![-c[0]];
    }
    let radius = 1.0 + c[..deg].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for k in 0..deg {
            let (v, dv) = horner(&c, z[k]);
            if v.norm() == 0.0 {
                continue;
            }
            let w = v / dv;
            let s: Complex64 = (0..deg).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = w / (Complex64::new(1.0, 0.0) - w * s);
            z[k] -= step;
            moved = moved.max(step.norm() / z[k].norm().max(1e-300));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = horner(&c, *r);
            if dv.norm() == 0.0 {
                break;
            }
            *r -= v / dv;
        }
    }
    z
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonomialDegrees {
    /// `d₀ … d_N`, with `d_N = |det A|` exactly.
    pub degrees: Vec<f64>,
    /// Eigenvalue moduli, descending, with multiplicity.
    pub moduli: Vec<f64>,
    #[serde(serialize_with = "big_to_string")]
    pub det_abs: BigInt,
    /// Relative gap between the product of moduli and `|det A|`.
    pub det_check: f64,
    /// Relative gap between the sum of eigenvalues and the trace.
    pub trace_check: f64,
}

/// `dᵢ = |λ₁ ⋯ λᵢ|` for the eigenvalues of `A` sorted by decreasing modulus.
pub fn monomial_dyn_degrees(a: &MonomialMap) -> MonomialDegrees {
    let n = a.dim();
    let cp = char_poly(a.matrix());
    let mut roots = Vec::with_capacity(n);
    for (factor, mult) in squarefree_factors(&cp) {
        for r in aberth_roots(&factor) {
            roots.extend(std::iter::repeat_n(r, mult));
        }
    }
    debug_assert_eq!(roots.len(), n);
    let mut moduli: Vec<f64> = roots.iter().map(|r| r.norm()).collect();
    moduli.sort_by(|x, y| y.total_cmp(x));
    let det_abs = a.det().abs();
    let det_f = det_abs.to_f64().expect("finite determinant");
    let mut degrees = vec![1.0];
    let mut acc = 1.0;
    for m in &moduli {
        acc *= m;
        degrees.push(acc);
    }
    let det_check = (acc - det_f).abs() / det_f;
    degrees[n] = det_f;
    let trace: f64 = (0..n).map(|i| a.matrix()[i][i].to_f64().unwrap()).sum();
    let eig_sum: f64 = roots.iter().map(|r| r.re).sum();
    let trace_check = (eig_sum - trace).abs() / trace.abs().max(1.0);
    MonomialDegrees {
        degrees,
        moduli,
        det_abs,
        det_check,
        trace_check,
    }
}

/// `dᵢ² ≥ dᵢ₋₁·dᵢ₊₁` up to relative tolerance `tol`.
pub fn is_log_concave(d: &[f64], tol: f64) -> bool {
    d.windows(3).all(|w| w[1] * w[1] >= w[0] * w[2] * (1.0 - tol))
}

// ---------------------------------------------------------------------------
// arithmetic degree

/// Minimum number of heights accepted by [`arithmetic_degree_estimate`].
pub const MIN_HEIGHTS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaEstimate {
    /// `max(1, h_n)^{1/n}` at the last index.
    pub root_tail: f64,
    pub root_index: usize,
    /// Geometric mean of `h_{n+1}/h_n` over the last steps.
    pub ratio_tail: f64,
    /// Steps `n → n+1` used, as `(first n, last n)`.
    pub ratio_steps: (usize, usize),
    pub degenerate: bool,
}

/// Estimate `α_f(x)` from `h(fⁿx)` for `n = 0, 1, …`.
pub fn arithmetic_degree_estimate(heights: &[f64]) -> Result<AlphaEstimate, DegreeError> {
    let finite = heights.iter().take_while(|h| h.is_finite()).count();
    if finite < MIN_HEIGHTS {
        return Err(DegreeError::TooFewHeights {
            need: MIN_HEIGHTS,
            got: finite,
        });
    }
    let h = &heights[..finite];
    let last = finite - 1;
    if h.iter().all(|&x| x == 0.0) {
        return Ok(AlphaEstimate {
            root_tail: 1.0,
            root_index: last,
            ratio_tail: 1.0,
            ratio_steps: (last, last),
            degenerate: true,
        });
    }
    let root_tail = h[last].max(1.0).powf(1.0 / last as f64);
    let steps = last.div_ceil(3);
    let first = last - steps;
    let logs: Vec<f64> = (first..last)
        .filter(|&n| h[n] != 0.0)
        .map(|n| (h[n + 1] / h[n]).ln())
        .collect();
    let ratio_tail = if logs.is_empty() {
        1.0
    } else {
        (logs.iter().sum::<f64>() / logs.len() as f64).exp()
    };
    Ok(AlphaEstimate {
        root_tail,
        root_index: last,
        ratio_tail,
        ratio_steps: (first, last - 1),
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaRow {
    pub n: usize,
    pub root: f64,
    pub ratio: f64,
}

/// Estimates on every prefix `h_0 … h_n` long enough to qualify.
pub fn alpha_estimates(heights: &[f64]) -> Vec<AlphaRow> {
    (MIN_HEIGHTS..=heights.len())
        .filter_map(|len| {
            arithmetic_degree_estimate(&heights[..len]).ok().map(|e| AlphaRow {
                n: e.root_index,
                root: e.root_tail,
                ratio: e.ratio_tail,
            })
        })
        .collect()
}

/// Relative band within which `α` counts as equal to `d₁`.
pub const ALPHA_D1_BAND: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicityReport {
    pub d1: f64,
    pub d2: f64,
    pub alpha: f64,
    /// `d₁ > d₂`
    pub hyperbolic: bool,
    pub alpha_matches_d1: bool,
    pub advisory: Option<String>,
}

/// When `d₁ > d₂` and the orbit's heights grow at rate `d₁`, the orbit is
/// expected to be Zariski dense.
pub fn hyperbolicity_report(d1: f64, d2: f64, alpha: f64) -> HyperbolicityReport {
    let hyperbolic = d1 > d2;
    let alpha_matches_d1 = (alpha - d1).abs() <= ALPHA_D1_BAND * d1;
    let advisory = (hyperbolic && alpha_matches_d1).then(|| {
        "orbit expected Zariski dense: map is 1-cohomologically hyperbolic and heights grow at rate d1"
            .to_string()
    });
    HyperbolicityReport {
        d1,
        d2,
        alpha,
        hyperbolic,
        alpha_matches_d1,
        advisory,
    }
}

// ---------------------------------------------------------------------------
// genericity heuristic

const RANK_PRIMES: [u64; 2] = [(1 << 61) - 1, 4_611_686_018_427_387_847];

fn monomial_exponents(arity: usize, degree: u32) -> Vec<Vec<u32>> {
    if arity == 1 {
        return vec![vec![degree]];
    }
    (0..=degree)
        .rev()
        .flat_map(|first| {
            monomial_exponents(arity - 1, degree - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn rank_mod(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = crate::ffield::inv_mod(rows[rank][col], p);
        let pivot_row: Vec<u64> = rows[rank].iter().map(|&x| mul_mod(x, inv, p)).collect();
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[col];
            if f != 0 {
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = sub_mod(*x, mul_mod(f, y, p), p);
                }
            }
        }
        rows[rank] = pivot_row;
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypersurfaceCheck {
    pub degree: u32,
    pub monomials: usize,
    pub points: usize,
    /// `Some(false)`: no hypersurface of this degree contains the points
    /// (certain). `Some(true)`: the evaluation matrix is rank deficient modulo
    /// every test prime (very likely contained). `None`: too few points.
    pub contained: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenericityHeuristic {
    pub label: &'static str,
    pub checks: Vec<HypersurfaceCheck>,
    /// No checked hypersurface contains the segment.
    pub passes: bool,
}

/// Heuristic genericity check: does any hypersurface of degree 1 or 2
/// contain the computed orbit segment? Finite data cannot decide genericity.
pub fn genericity_heuristic(points: &[ProjPoint]) -> GenericityHeuristic {
    let arity = points.first().map_or(0, ProjPoint::len);
    let mut checks = Vec::new();
    for degree in [1u32, 2] {
        let exps = if arity == 0 { Vec::new() } else { monomial_exponents(arity, degree) };
        let contained = if arity == 0 || points.len() < exps.len() {
            None
        } else {
            let deficient = RANK_PRIMES.iter().all(|&p| {
                let rows: Vec<Vec<u64>> = points
                    .iter()
                    .map(|x| {
                        let r: Vec<u64> = x.coords().iter().map(|c| reduce_bigint(c, p)).collect();
                        exps.iter()
                            .map(|e| {
                                e.iter().zip(&r).fold(1u64, |acc, (&k, &v)| {
                                    mul_mod(acc, crate::ffield::pow_mod(v, k as u64, p), p)
                                })
                            })
                            .collect()
                    })
                    .collect();
                rank_mod(rows, p) < exps.len()
            });
            Some(deficient)
        };
        checks.push(HypersurfaceCheck {
            degree,
            monomials: exps.len(),
            points: points.len(),
            contained,
        });
    }
    let passes = checks.iter().all(|c| c.contained == Some(false));
    GenericityHeuristic {
        label: "heuristic",
        checks,
        passes,
    }
}

// ---------------------------------------------------------------------------

/// Everything the degree tools know about one map and orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct DegreeReport {
    pub d1_sequence: Option<DegreeSequence>,
    pub dn: Option<FiberReport>,
    pub monomial_degrees: Option<MonomialDegrees>,
    pub alpha_estimates: Vec<AlphaRow>,
}
