mod common;

use common::*;
use num_bigint::BigInt;
use num_traits::Signed;
use orbitgcd_core::degrees::{arithmetic_degree_estimate, is_log_concave, monomial_dyn_degrees, MonomialMap};
use orbitgcd_core::ffield::{proj_points_fp, reduce_bigint, reduce_poly, Prime};
use orbitgcd_core::heights::{subscheme_height, subscheme_height_lower_bound, weil_height};
use orbitgcd_core::{parse_poly, BigPoly, PolySource, ProjPoint, RationalMap};
use proptest::prelude::*;
use std::collections::HashSet;

proptest! {
    #![proptest_config(ProptestConfig { max_global_rejects: 1 << 20, ..ProptestConfig::with_cases(512) })]

    #[test]
    fn ring_laws(p in poly(3, 3, 5), q in poly(3, 3, 5), r in poly(3, 3, 5)) {
        check_ring_laws(&p, &q, &r)?;
    }

    #[test]
    fn gcd_round_trip(a in poly(3, 2, 4), b in poly(3, 2, 4), c in poly(3, 2, 3)) {
        check_gcd_round_trip(&a, &b, &c)?;
    }

    #[test]
    fn compose_then_eval(p in poly(3, 3, 5), g in prop::collection::vec(form(2), 3), x in point(30)) {
        check_compose_eval(&p, &g, &x)?;
    }

    #[test]
    fn iterate_degrees_submultiplicative(fs in prop::collection::vec(form(2), 3)) {
        check_submultiplicative(&fs)?;
    }

    #[test]
    fn heights_ignore_representative(raw in point(1_000_000), k in -1000i64..=1000) {
        check_representative_independence(&raw, k, &ideal(&["x0", "x1"]))?;
        check_representative_independence(&raw, k, &ideal(&["x0 - x2", "x1^2 - x0*x2"]))?;
    }

    #[test]
    fn content_scales(p in poly(3, 3, 5), k in 1i64..=50) {
        let k = BigInt::from(k);
        prop_assert_eq!(p.scale(&k).content(), &p.content() * &k);
        prop_assert_eq!(p.scale(&k).primitive_part().normalize_sign(), p.primitive_part().normalize_sign());
    }

    #[test]
    fn display_parses_back(p in poly(3, 4, 6)) {
        let text = p.to_string();
        prop_assert_eq!(parse_poly(&PolySource::new(text, 3)).unwrap(), p);
    }

    #[test]
    fn reduction_commutes_with_evaluation(p in poly(3, 4, 6), x in prop::collection::vec(-10_000i64..=10_000, 3)) {
        let prime = Prime::new(1009).unwrap();
        let fp = reduce_poly(&p, prime);
        let xs: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let xr: Vec<u64> = xs.iter().map(|v| reduce_bigint(v, 1009)).collect();
        prop_assert_eq!(fp.eval(&xr), reduce_bigint(&p.eval_int(&xs).unwrap(), 1009));
    }

    #[test]
    fn subscheme_height_bounds(raw in point(1_000_000)) {
        let x = ProjPoint::from_i64(&raw).unwrap();
        for y in [ideal(&["x0", "x1"]), ideal(&["x0 - x2", "x1 - x2"]), ideal(&["3*x0^2 - x1*x2", "x1 + 2*x2"])] {
            let v = subscheme_height(&y, &x).unwrap();
            if let Some(total) = v.total() {
                prop_assert!(v.gcd_part().unwrap() >= 0.0);
                prop_assert!(total >= subscheme_height_lower_bound(&y) - 1e-9);
            }
        }
    }

    #[test]
    fn weil_height_functoriality(fs in prop::collection::vec(form(2), 3), raw in point(10_000)) {
        let Ok(f) = RationalMap::new(fs) else { return Ok(()); };
        let x = ProjPoint::from_i64(&raw).unwrap();
        let Some(fx) = f.apply(&x).unwrap() else { return Ok(()); };
        let terms = f.components().iter().map(BigPoly::num_terms).max().unwrap() as f64;
        let coeff = f.components().iter().flat_map(|c| c.terms().map(|(_, v)| v.abs())).max().unwrap();
        let bound = f.degree() as f64 * weil_height(&x) + (terms * orbitgcd_core::heights::big_log(&coeff).exp()).ln();
        prop_assert!(weil_height(&fx) <= bound + 1e-9);
    }

    #[test]
    fn generating_sets_differ_boundedly(raw in point(1_000_000)) {
        let x = ProjPoint::from_i64(&raw).unwrap();
        let a = subscheme_height(&ideal(&["x0", "x1"]), &x).unwrap();
        let b = subscheme_height(&ideal(&["x0 + x1", "x0 - x1"]), &x).unwrap();
        match (a.total(), b.total()) {
            (Some(s), Some(t)) => prop_assert!((s - t).abs() <= std::f64::consts::LN_2 + 1e-9),
            (None, None) => {}
            _ => prop_assert!(false, "one generating set sees the point, the other does not"),
        }
    }

    #[test]
    fn alpha_estimate_scale_free(base in 1.5f64..4.0, c in 0.1f64..10.0) {
        let h: Vec<f64> = (0..12).map(|n| 5.0 * base.powi(n)).collect();
        let scaled: Vec<f64> = h.iter().map(|v| v * c).collect();
        let a = arithmetic_degree_estimate(&h).unwrap();
        let b = arithmetic_degree_estimate(&scaled).unwrap();
        prop_assert!((a.ratio_tail - b.ratio_tail).abs() < 1e-9 * a.ratio_tail);
        let n = a.root_index as f64;
        prop_assert!((b.root_tail - a.root_tail * c.powf(1.0 / n)).abs() < 1e-9 * b.root_tail);
    }

    #[test]
    fn monomial_degrees_of_square(m in prop::collection::vec(-4i64..=4, 9)) {
        let rows: Vec<Vec<i64>> = m.chunks(3).map(<[i64]>::to_vec).collect();
        let Ok(a) = MonomialMap::new(rows) else { return Ok(()); };
        let d = monomial_dyn_degrees(&a);
        let d2 = monomial_dyn_degrees(&a.compose(&a));
        prop_assert!(is_log_concave(&d.degrees, 1e-9));
        for (x, y) in d.degrees.iter().zip(&d2.degrees) {
            prop_assert!((x * x - y).abs() <= 1e-8 * y.max(1.0), "{:?} vs {:?}", d.degrees, d2.degrees);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reports_are_deterministic(start in point(9), n in 1usize..6, seed in any::<u64>()) {
        check_report_determinism(&start, n, seed, true)?;
    }
}

#[test]
fn projective_points_distinct() {
    for p in [2u64, 3, 5, 7, 11] {
        let pts: Vec<Vec<u64>> = proj_points_fp(2, p).collect();
        assert_eq!(pts.len() as u64, p * p + p + 1);
        let set: HashSet<_> = pts.iter().cloned().collect();
        assert_eq!(set.len(), pts.len());
        assert!(pts.iter().all(|v| v[v.iter().rposition(|&c| c != 0).unwrap()] == 1));
    }
}

#[test]
fn generating_set_gap_is_reported() {
    // observed spread between two presentations of the ideal of (0:0:1)
    let mut worst: f64 = 0.0;
    for a in -40i64..=40 {
        for b in -40i64..=40 {
            let Ok(x) = ProjPoint::from_i64(&[a, b, 7]) else { continue };
            let s = subscheme_height(&ideal(&["x0", "x1"]), &x).unwrap().total();
            let t = subscheme_height(&ideal(&["x0 + x1", "x0 - x1"]), &x).unwrap().total();
            if let (Some(s), Some(t)) = (s, t) {
                worst = worst.max((s - t).abs());
            }
        }
    }
    eprintln!("max |h_Y - h_Y'| over sampled points: {worst:.6}");
    assert!(worst > 0.0 && worst.is_finite());
}
