//! Exact arithmetic for orbits of rational self-maps of projective space over
//! the rationals: Weil heights, generalized-gcd heights `h_Y`, dynamical
//! degrees, arithmetic degrees, and the experiment harness that ties them
//! together.

pub mod degrees;
pub mod experiments;
pub mod ffield;
pub mod heights;
pub mod poly;
pub mod polyparse;
pub mod projgeom;

pub use poly::{BigPoly, Degree, Monomial, PolyError};
pub use polyparse::{parse_poly, ParseError, PolySource};
pub use projgeom::{GeomError, ProjPoint, RationalMap, SubschemeIdeal};
