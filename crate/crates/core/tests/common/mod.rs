#![allow(dead_code)]

use num_bigint::BigInt;
use orbitgcd_core::degrees::{degree_sequence, is_submultiplicative};
use orbitgcd_core::experiments::{render_csv, render_json, run_scenario, ScenarioConfig};
use orbitgcd_core::heights::{subscheme_height, subscheme_height_exact};
use orbitgcd_core::poly::gcd_multivar;
use orbitgcd_core::{BigPoly, Monomial, ProjPoint, RationalMap, SubschemeIdeal};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn poly(arity: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = BigPoly> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, arity), -9i64..=9), 0..=max_terms).prop_map(
        move |terms| {
            BigPoly::from_terms(arity, terms.into_iter().map(|(e, c)| (Monomial::new(e), BigInt::from(c))))
        },
    )
}

/// Nonzero ternary form of degree `deg`.
pub fn form(deg: u32) -> impl Strategy<Value = BigPoly> {
    prop::collection::vec((0..=deg, 0..=deg, prop_oneof![-9i64..=-1, 1i64..=9]), 1..4).prop_map(move |terms| {
        let f = BigPoly::from_terms(
            3,
            terms.iter().map(|&(a, b, c)| {
                let b = b.min(deg - a);
                (Monomial::new(vec![a, b, deg - a - b]), BigInt::from(c))
            }),
        );
        if f.is_zero() {
            BigPoly::from_term(Monomial::new(vec![0, 0, deg]), BigInt::from(1))
        } else {
            f
        }
    })
}

pub fn point(bound: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-bound..=bound, 3).prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn check_ring_laws(p: &BigPoly, q: &BigPoly, r: &BigPoly) -> Result<(), TestCaseError> {
    let zero = BigPoly::zero(p.arity());
    let one = BigPoly::one(p.arity());
    prop_assert_eq!(p + q, q + p);
    prop_assert_eq!(p * q, q * p);
    prop_assert_eq!(&(p + q) + r, p + &(q + r));
    prop_assert_eq!(&(p * q) * r, p * &(q * r));
    prop_assert_eq!(p * &(q + r), &(p * q) + &(p * r));
    prop_assert_eq!(p + &zero, p.clone());
    prop_assert_eq!(p * &one, p.clone());
    prop_assert!((p - &p.clone()).is_zero());
    prop_assert!((p * &zero).is_zero());
    Ok(())
}

pub fn check_gcd_round_trip(a: &BigPoly, b: &BigPoly, c: &BigPoly) -> Result<(), TestCaseError> {
    prop_assume!(!c.is_zero() && !(a.is_zero() && b.is_zero()));
    let ac = a * c;
    let bc = b * c;
    let g = gcd_multivar(&ac, &bc).unwrap();
    let qa = ac.div_exact(&g);
    let qb = bc.div_exact(&g);
    prop_assert!(qa.is_some() && qb.is_some(), "gcd {} does not divide", g);
    let (qa, qb) = (qa.unwrap(), qb.unwrap());
    prop_assert_eq!(&(&qa * &g), &ac);
    prop_assert_eq!(&(&qb * &g), &bc);
    let c_norm = c.primitive_part().normalize_sign();
    prop_assert!(g.div_exact(&c_norm).is_some(), "common factor {} lost from gcd {}", c_norm, g);
    let co = gcd_multivar(&qa, &qb).unwrap();
    prop_assert!(co.is_constant(), "cofactors share {}", co);
    prop_assert_eq!(gcd_multivar(&bc, &ac).unwrap(), g);
    Ok(())
}

pub fn check_compose_eval(p: &BigPoly, g: &[BigPoly], x: &[i64]) -> Result<(), TestCaseError> {
    let x = big(x);
    let composed = p.compose(g).unwrap();
    let inner: Vec<BigInt> = g.iter().map(|gi| gi.eval_int(&x).unwrap()).collect();
    prop_assert_eq!(composed.eval_int(&x).unwrap(), p.eval_int(&inner).unwrap());
    Ok(())
}

pub fn check_submultiplicative(forms: &[BigPoly]) -> Result<(), TestCaseError> {
    let Ok(f) = RationalMap::new(forms.to_vec()) else {
        return Ok(());
    };
    let s = degree_sequence(&f, 3, 64).unwrap();
    let degs = s.degrees();
    prop_assert!(is_submultiplicative(&degs), "{:?}", degs);
    prop_assert!(degs.iter().all(|&d| d >= 1));
    Ok(())
}

pub fn check_representative_independence(raw: &[i64], k: i64, y: &SubschemeIdeal) -> Result<(), TestCaseError> {
    prop_assume!(k != 0);
    let a = ProjPoint::new(big(raw)).unwrap();
    let scaled: Vec<BigInt> = raw.iter().map(|&v| BigInt::from(v) * k).collect();
    let b = ProjPoint::new(scaled).unwrap();
    prop_assert_eq!(&a, &b);
    prop_assert_eq!(subscheme_height_exact(y, &a).unwrap(), subscheme_height_exact(y, &b).unwrap());
    prop_assert_eq!(subscheme_height(y, &a).unwrap(), subscheme_height(y, &b).unwrap());
    Ok(())
}

pub fn check_report_determinism(start: &[i64], n_max: usize, seed: u64, fiber: bool) -> Result<(), TestCaseError> {
    let mut cfg = ScenarioConfig::backnonfin(n_max);
    cfg.start = start.iter().map(|&v| v.into()).collect();
    cfg.degree_iterates = 2;
    if fiber {
        cfg.primes = vec![101];
        cfg.targets_per_prime = 3;
    } else {
        cfg.primes.clear();
    }
    let a = run_scenario(&cfg, seed).unwrap();
    let b = run_scenario(&cfg, seed).unwrap();
    prop_assert_eq!(render_csv(&a), render_csv(&b));
    prop_assert_eq!(render_json(&a), render_json(&b));
    Ok(())
}

pub fn ideal(src: &[&str]) -> SubschemeIdeal {
    SubschemeIdeal::new(orbitgcd_core::polyparse::parse_many(src, 3).unwrap()).unwrap()
}
