//! Rational points of ℙᴺ over ℚ, rational self-maps, and orbits.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::poly::{gcd_multivar, BigPoly, Degree, PolyError};

/// Default cap on the raw (pre-reduction) degree of an iterate.
pub const DEFAULT_COMPOSITION_CAP: u64 = 729;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("all coordinates are zero")]
    ZeroPoint,
    #[error("expected {expected} coordinates/components, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("map component {index} is not homogeneous")]
    InhomogeneousComponent { index: usize },
    #[error("map components have different degrees ({first} and {other})")]
    DegreeMismatch { first: u32, other: u32 },
    #[error("all map components are zero")]
    ZeroMap,
    #[error("map has degree 0")]
    ConstantMap,
    #[error("ideal needs at least one generator")]
    EmptyIdeal,
    #[error("ideal generator {index} is zero")]
    ZeroGenerator { index: usize },
    #[error("ideal generator {index} is not homogeneous of positive degree")]
    BadGenerator { index: usize },
    #[error("iterate {n} would reach raw degree {degree}, over the cap {cap}")]
    BudgetExceeded { n: u32, degree: u64, cap: u64 },
    #[error("iteration count must be at least 1")]
    ZeroIterations,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A point of ℙᴺ(ℚ) as primitive integer coordinates whose first nonzero
/// entry is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    coords: Vec<BigInt>,
}

impl ProjPoint {
    /// Canonical representative of the projective class of `raw`.
    pub fn new(raw: Vec<BigInt>) -> Result<Self, GeomError> {
        let first = raw.iter().position(|c| !c.is_zero()).ok_or(GeomError::ZeroPoint)?;
        let mut g = gcd_of(&raw);
        if raw[first].is_negative() {
            g = -g;
        }
        let coords = if g.is_one() {
            raw
        } else {
            raw.into_iter().map(|c| c / &g).collect()
        };
        Ok(ProjPoint { coords })
    }

    pub fn from_i64(raw: &[i64]) -> Result<Self, GeomError> {
        Self::new(raw.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    /// Number of homogeneous coordinates, `N + 1`.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Bit length of the largest coordinate.
    pub fn bits(&self) -> u64 {
        self.coords.iter().map(|c| c.bits()).max().unwrap_or(0)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Free-function spelling of [`ProjPoint::new`].
pub fn make_point(raw: Vec<BigInt>) -> Result<ProjPoint, GeomError> {
    ProjPoint::new(raw)
}

/// Non-negative gcd, processing the smallest magnitudes first so that a
/// coordinate equal to ±1 short-circuits before any large gcd runs.
pub(crate) fn gcd_of(values: &[BigInt]) -> BigInt {
    let mut order: Vec<&BigInt> = values.iter().filter(|v| !v.is_zero()).collect();
    order.sort_by_key(|v| v.bits());
    let mut g = BigInt::zero();
    for v in order {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    g
}

/// A dominant rational self-map of ℙᴺ given by `N + 1` homogeneous forms of
/// one degree without a common factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMap {
    components: Vec<BigPoly>,
    degree: u32,
}

impl RationalMap {
    /// Validate and reduce: divide out the polynomial gcd of all components
    /// and then their common integer content.
    pub fn new(components: Vec<BigPoly>) -> Result<Self, GeomError> {
        let n = components.len();
        let mut degree: Option<u32> = None;
        for (i, c) in components.iter().enumerate() {
            if c.arity() != n {
                return Err(GeomError::ArityMismatch {
                    expected: n,
                    got: c.arity(),
                });
            }
            match c.is_homogeneous() {
                (false, _) => return Err(GeomError::InhomogeneousComponent { index: i }),
                (true, Degree::Finite(d)) => match degree {
                    None => degree = Some(d),
                    Some(e) if e != d => {
                        return Err(GeomError::DegreeMismatch { first: e, other: d })
                    }
                    _ => {}
                },
                (true, Degree::ZeroPolynomial) => {}
            }
        }
        let Some(_) = degree else {
            return Err(GeomError::ZeroMap);
        };
        let mut g = BigPoly::zero(n);
        for c in components.iter().filter(|c| !c.is_zero()) {
            g = gcd_multivar(&g, c)?;
            if g.is_constant() {
                break;
            }
        }
        let mut reduced: Vec<BigPoly> = if g.is_constant() {
            components
        } else {
            components
                .iter()
                .map(|c| c.div_exact(&g).expect("gcd divides every component"))
                .collect()
        };
        let content = reduced.iter().fold(BigInt::zero(), |acc, c| acc.gcd(&c.content()));
        if !content.is_one() {
            let inv = BigPoly::constant(n, content);
            reduced = reduced
                .iter()
                .map(|c| c.div_exact(&inv).expect("content divides"))
                .collect();
        }
        let degree = reduced
            .iter()
            .find_map(|c| c.degree().finite())
            .expect("some component is nonzero");
        if degree == 0 {
            return Err(GeomError::ConstantMap);
        }
        Ok(RationalMap {
            components: reduced,
            degree,
        })
    }

    pub fn components(&self) -> &[BigPoly] {
        &self.components
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Number of homogeneous coordinates, `N + 1`.
    pub fn arity(&self) -> usize {
        self.components.len()
    }

    pub fn identity(arity: usize) -> Self {
        RationalMap {
            components: (0..arity).map(|i| BigPoly::var(arity, i)).collect(),
            degree: 1,
        }
    }

    /// Image of `x`, or `None` when every component vanishes there (`x` is
    /// in the indeterminacy locus of this representation).
    pub fn apply(&self, x: &ProjPoint) -> Result<Option<ProjPoint>, GeomError> {
        let values = self.eval_components(x)?;
        if values.iter().all(Zero::is_zero) {
            return Ok(None);
        }
        Ok(Some(ProjPoint::new(values)?))
    }

    /// Whether every component vanishes at `x`. Stops at the first nonzero
    /// component, trying the ones expected to be cheapest first.
    pub fn is_indeterminate_at(&self, x: &ProjPoint) -> Result<bool, GeomError> {
        self.check_point(x)?;
        let bits: Vec<u64> = x.coords().iter().map(|c| c.bits()).collect();
        let mut order: Vec<(u64, &BigPoly)> = self
            .components
            .iter()
            .map(|c| {
                let cost = c
                    .terms()
                    .map(|(m, _)| {
                        m.exponents().iter().zip(&bits).map(|(&e, &b)| e as u64 * b).sum::<u64>()
                    })
                    .max()
                    .unwrap_or(0);
                (cost, c)
            })
            .collect();
        order.sort_by_key(|(cost, _)| *cost);
        for (_, c) in order {
            if !c.eval_int(x.coords())?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_point(&self, x: &ProjPoint) -> Result<(), GeomError> {
        if x.len() != self.arity() {
            return Err(GeomError::ArityMismatch {
                expected: self.arity(),
                got: x.len(),
            });
        }
        Ok(())
    }

    fn eval_components(&self, x: &ProjPoint) -> Result<Vec<BigInt>, GeomError> {
        self.check_point(x)?;
        self.components
            .iter()
            .map(|c| c.eval_int(x.coords()).map_err(GeomError::from))
            .collect()
    }

    /// `self ∘ inner` in reduced form.
    pub fn compose(&self, inner: &RationalMap) -> Result<RationalMap, GeomError> {
        let comps = self
            .components
            .iter()
            .map(|c| c.compose(&inner.components))
            .collect::<Result<Vec<_>, _>>()?;
        RationalMap::new(comps)
    }

    /// Reduced representation of the `n`-th iterate. Fails when some step's
    /// raw degree `deg(fᵏ⁻¹)·deg(f)` would exceed `cap`.
    pub fn iterate(&self, n: u32, cap: u64) -> Result<RationalMap, GeomError> {
        let mut out = None;
        for step in self.iterates(cap) {
            let (k, m) = step?;
            if k == n {
                out = Some(m);
                break;
            }
        }
        out.ok_or(GeomError::ZeroIterations)
    }

    /// Lazily yields `(k, fᵏ)` for `k = 1, 2, …`; the first error ends the
    /// sequence.
    pub fn iterates(&self, cap: u64) -> Iterates<'_> {
        Iterates {
            base: self,
            current: None,
            k: 0,
            cap,
            done: false,
        }
    }
}

pub struct Iterates<'a> {
    base: &'a RationalMap,
    current: Option<RationalMap>,
    k: u32,
    cap: u64,
    done: bool,
}

impl Iterator for Iterates<'_> {
    type Item = Result<(u32, RationalMap), GeomError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let next_k = self.k + 1;
        let raw = match &self.current {
            None => self.base.degree as u64,
            Some(c) => c.degree as u64 * self.base.degree as u64,
        };
        if raw > self.cap {
            self.done = true;
            return Some(Err(GeomError::BudgetExceeded {
                n: next_k,
                degree: raw,
                cap: self.cap,
            }));
        }
        let next = match &self.current {
            None => Ok(self.base.clone()),
            // f ∘ fᵏ⁻¹ needs only a few products of large forms
            Some(c) => self.base.compose(c),
        };
        match next {
            Ok(m) => {
                self.k = next_k;
                self.current = Some(m.clone());
                Some(Ok((next_k, m)))
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Free-function spelling of [`RationalMap::new`].
pub fn make_map(components: Vec<BigPoly>) -> Result<RationalMap, GeomError> {
    RationalMap::new(components)
}

/// `fⁿ` with the default composition cap.
pub fn iterate_map(f: &RationalMap, n: u32) -> Result<RationalMap, GeomError> {
    if n == 0 {
        return Err(GeomError::ZeroIterations);
    }
    f.iterate(n, DEFAULT_COMPOSITION_CAP)
}

/// Homogeneous generators of the ideal of a closed subscheme `Y ⊂ ℙᴺ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubschemeIdeal {
    generators: Vec<BigPoly>,
}

impl SubschemeIdeal {
    pub fn new(generators: Vec<BigPoly>) -> Result<Self, GeomError> {
        let Some(first) = generators.first() else {
            return Err(GeomError::EmptyIdeal);
        };
        let n = first.arity();
        for (i, g) in generators.iter().enumerate() {
            if g.arity() != n {
                return Err(GeomError::ArityMismatch {
                    expected: n,
                    got: g.arity(),
                });
            }
            if g.is_zero() {
                return Err(GeomError::ZeroGenerator { index: i });
            }
            match g.is_homogeneous() {
                (true, Degree::Finite(d)) if d >= 1 => {}
                _ => return Err(GeomError::BadGenerator { index: i }),
            }
        }
        Ok(SubschemeIdeal { generators })
    }

    pub fn generators(&self) -> &[BigPoly] {
        &self.generators
    }

    pub fn arity(&self) -> usize {
        self.generators[0].arity()
    }
}

/// Where an orbit first repeats: `points[first] == points[first + period]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Periodicity {
    pub first: usize,
    pub period: usize,
}

/// Orbit segment `x, f(x), …` with its termination flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    /// Every point listed lies outside the indeterminacy locus.
    pub points: Vec<ProjPoint>,
    /// Index `n` such that `fⁿ(x)` lies in the indeterminacy locus.
    pub indeterminate_at: Option<usize>,
    pub periodic: Option<Periodicity>,
}

impl Orbit {
    pub fn is_truncated(&self) -> bool {
        self.indeterminate_at.is_some()
    }
}

/// Iterate `f` from `start` for up to `n_max` steps.
///
/// A point at which every component vanishes ends the orbit and is not
/// included; in particular an indeterminate starting point yields an empty
/// orbit flagged at `n = 0`. A repeated point sets the periodicity flag at
/// its first occurrence; iteration then continues to `n_max`.
pub fn orbit(f: &RationalMap, start: &ProjPoint, n_max: usize) -> Result<Orbit, GeomError> {
    let mut points: Vec<ProjPoint> = Vec::with_capacity(n_max + 1);
    let mut seen: HashMap<ProjPoint, usize> = HashMap::new();
    let mut periodic = None;
    let mut current = start.clone();
    for n in 0..=n_max {
        let image = if n < n_max {
            match f.apply(&current)? {
                Some(y) => Some(y),
                None => {
                    return Ok(Orbit {
                        points,
                        indeterminate_at: Some(n),
                        periodic,
                    })
                }
            }
        } else {
            if f.is_indeterminate_at(&current)? {
                return Ok(Orbit {
                    points,
                    indeterminate_at: Some(n),
                    periodic,
                });
            }
            None
        };
        if periodic.is_none() {
            if let Some(&first) = seen.get(&current) {
                periodic = Some(Periodicity {
                    first,
                    period: n - first,
                });
            } else {
                seen.insert(current.clone(), n);
            }
        }
        points.push(current);
        match image {
            Some(y) => current = y,
            None => break,
        }
    }
    Ok(Orbit {
        points,
        indeterminate_at: None,
        periodic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyparse::parse_many;
    use num_traits::Pow;

    fn map(src: &[&str]) -> RationalMap {
        RationalMap::new(parse_many(src, src.len()).unwrap()).unwrap()
    }

    fn pt(v: &[i64]) -> ProjPoint {
        ProjPoint::from_i64(v).unwrap()
    }

    fn backnonfin() -> RationalMap {
        map(&["x0^2*x1", "x1^3", "x2^3"])
    }

    #[test]
    fn make_point_examples() {
        assert_eq!(pt(&[6, -4, 2]).coords(), pt(&[3, -2, 1]).coords());
        assert_eq!(pt(&[3, 2, 1]).coords(), &[3, 2, 1].map(BigInt::from));
        assert_eq!(pt(&[-2, 0, 4]).coords(), &[1, 0, -2].map(BigInt::from));
        assert_eq!(ProjPoint::from_i64(&[0, 0, 0]), Err(GeomError::ZeroPoint));
    }

    #[test]
    fn make_map_examples() {
        let f = backnonfin();
        assert_eq!(f.degree(), 3);
        assert_eq!(f.components(), parse_many(&["x0^2*x1", "x1^3", "x2^3"], 3).unwrap());
        let g = map(&["x0*x1", "x1^2", "x1*x2"]);
        assert_eq!(g, RationalMap::identity(3));
        assert_eq!(map(&["2*x0", "2*x1", "2*x2"]), RationalMap::identity(3));
        let bad = parse_many(&["x0^2", "x1", "x2"], 3).unwrap();
        assert!(matches!(RationalMap::new(bad), Err(GeomError::DegreeMismatch { .. })));
        let inh = parse_many(&["x0^2 + x1", "x1^2", "x2^2"], 3).unwrap();
        assert_eq!(RationalMap::new(inh), Err(GeomError::InhomogeneousComponent { index: 0 }));
        // a leading zero component must not stop the gcd reduction
        assert_eq!(map(&["0", "x0*x1", "x0*x2"]), map(&["0", "x1", "x2"]));
        assert!(matches!(
            RationalMap::new(parse_many(&["0", "2*x0*x1^2", "3*x0*x1^2"], 3).unwrap()),
            Err(GeomError::ConstantMap)
        ));
        let zero = parse_many(&["0", "0", "0"], 3).unwrap();
        assert_eq!(RationalMap::new(zero), Err(GeomError::ZeroMap));
    }

    #[test]
    fn apply_examples() {
        let f = backnonfin();
        assert_eq!(f.apply(&pt(&[3, 2, 1])).unwrap(), Some(pt(&[18, 8, 1])));
        assert_eq!(f.apply(&pt(&[1, 0, 0])).unwrap(), None);
        let x = pt(&[5, -7, 3]);
        assert_eq!(RationalMap::identity(3).apply(&x).unwrap(), Some(x));
    }

    #[test]
    fn iterate_examples() {
        let f = backnonfin();
        let f2 = iterate_map(&f, 2).unwrap();
        assert_eq!(f2, map(&["x0^4*x1^5", "x1^9", "x2^9"]));
        assert_eq!(f2.degree(), 9);
        assert_eq!(iterate_map(&f, 1).unwrap(), f);
        let sq = map(&["x0^2", "x1^2", "x2^2"]);
        assert_eq!(iterate_map(&sq, 3).unwrap(), map(&["x0^8", "x1^8", "x2^8"]));
        assert!(matches!(f.iterate(7, 729), Err(GeomError::BudgetExceeded { n: 7, .. })));
        assert_eq!(iterate_map(&f, 0), Err(GeomError::ZeroIterations));
    }

    #[test]
    fn orbit_examples() {
        let f = backnonfin();
        let o = orbit(&f, &pt(&[3, 2, 1]), 3).unwrap();
        assert_eq!(o.points.len(), 4);
        let two = BigInt::from(2);
        let three = BigInt::from(3);
        for (n, p) in o.points.iter().enumerate() {
            let a = Pow::pow(&three, 1u32 << n) * Pow::pow(&two, 3u32.pow(n as u32) - (1 << n));
            let b = Pow::pow(&two, 3u32.pow(n as u32));
            assert_eq!(p.coords(), &[a, b, BigInt::one()]);
        }
        assert!(o.indeterminate_at.is_none() && o.periodic.is_none());

        let sq = map(&["x0^2", "x1^2", "x2^2"]);
        let fixed = orbit(&sq, &pt(&[1, 1, 1]), 4).unwrap();
        assert_eq!(fixed.points.len(), 5);
        assert!(fixed.points.iter().all(|p| *p == pt(&[1, 1, 1])));
        assert_eq!(fixed.periodic, Some(Periodicity { first: 0, period: 1 }));

        let bad = orbit(&f, &pt(&[1, 0, 0]), 5).unwrap();
        assert!(bad.points.is_empty());
        assert_eq!(bad.indeterminate_at, Some(0));
    }

    #[test]
    fn orbit_truncates_midway() {
        // (1:1:1) -> (1:1:0), where every component vanishes
        let f = map(&["x0*x2", "x1*x2", "x0^2 - x1^2"]);
        let o = orbit(&f, &pt(&[1, 1, 1]), 6).unwrap();
        assert_eq!(o.points, vec![pt(&[1, 1, 1])]);
        assert_eq!(o.indeterminate_at, Some(1));
    }

    #[test]
    fn ideal_validation() {
        let gens = parse_many(&["x0", "x1"], 3).unwrap();
        assert!(SubschemeIdeal::new(gens).is_ok());
        assert_eq!(SubschemeIdeal::new(vec![]), Err(GeomError::EmptyIdeal));
        let bad = parse_many(&["x0 + 1"], 3).unwrap();
        assert_eq!(SubschemeIdeal::new(bad), Err(GeomError::BadGenerator { index: 0 }));
        let zero = parse_many(&["x0", "0"], 3).unwrap();
        assert_eq!(SubschemeIdeal::new(zero), Err(GeomError::ZeroGenerator { index: 1 }));
    }
}
