//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on failure.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Pow;
use orbitgcd_core::degrees::{
    arithmetic_degree_estimate, is_log_concave, monomial_dyn_degrees, topological_degree_ff, FiberOptions,
    MonomialMap,
};
use orbitgcd_core::experiments::{run_scenario, ScenarioConfig, TrendLabel, Verdict};
use orbitgcd_core::heights::{bcz_closed_form, height_ratio_series, subscheme_height, subscheme_height_exact};
use orbitgcd_core::polyparse::parse_many;
use orbitgcd_core::projgeom::orbit;
use orbitgcd_core::{ProjPoint, RationalMap};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed <= budget, || format!("took {elapsed:.2?}, budget {budget:.0?}"))
}

fn map(src: &[&str]) -> RationalMap {
    RationalMap::new(parse_many(src, src.len()).unwrap()).unwrap()
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Random primitive points of ℙ²(ℚ) with coordinates up to 64 bits, checked
/// against `h_Y = log(max(|a|,|b|,|c|) / max(|a|,|b|)) + log gcd(a, b)`
/// computed in 128-bit arithmetic.
fn criterion_1() -> Outcome {
    let y = ideal(&["x0", "x1"]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut checked = 0;
    while checked < 1000 {
        let bits = rng.gen_range(1..=63);
        let mut raw: Vec<i128> = (0..3)
            .map(|_| {
                let m = rng.gen::<u64>() >> (64 - bits);
                if rng.gen() { m as i128 } else { -(m as i128) }
            })
            .collect();
        if rng.gen_ratio(1, 20) {
            raw[rng.gen_range(0..2)] = 0;
        }
        if raw[0] == 0 && raw[1] == 0 {
            continue;
        }
        let g = raw.iter().fold(0u128, |acc, &v| gcd_u128(acc, v.unsigned_abs()));
        let prim: Vec<i128> = raw.iter().map(|&v| v / g as i128).collect();
        let x = ProjPoint::new(prim.iter().map(|&v| BigInt::from(v)).collect()).unwrap();
        let abs: Vec<u128> = prim.iter().map(|v| v.unsigned_abs()).collect();
        let norm = *abs.iter().max().unwrap();
        let den = abs[0].max(abs[1]);
        let gcd = gcd_u128(abs[0], abs[1]);
        let parts = subscheme_height_exact(&y, &x).unwrap().ok_or("finite point reported on Y")?;
        ensure(parts.norm == BigInt::from(norm), || format!("norm mismatch at {x}"))?;
        ensure(parts.witness_value == BigInt::from(den), || format!("max(|a|,|b|) mismatch at {x}"))?;
        ensure(parts.gcd == BigInt::from(gcd), || format!("gcd mismatch at {x}"))?;
        let want = (norm as f64 / den as f64).ln() + (gcd as f64).ln();
        let got = subscheme_height(&y, &x).unwrap().total().unwrap();
        ensure((got - want).abs() <= 1e-12 * (1.0 + want.abs()), || format!("log mismatch at {x}"))?;
        checked += 1;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("1000 points, integers exact, {:.2?}", start.elapsed()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let f = map(&["x0^2*x1", "x1^3", "x2^3"]);
    let y = ideal(&["x0", "x1"]);
    let x0 = ProjPoint::from_i64(&[3, 2, 1]).unwrap();
    let o = orbit(&f, &x0, 12).map_err(|e| e.to_string())?;
    ensure(o.points.len() == 13, || format!("{} points", o.points.len()))?;
    let (two, three) = (BigInt::from(2), BigInt::from(3));
    for (n, p) in o.points.iter().enumerate() {
        let a: BigInt = Pow::pow(&three, 1u32 << n) * Pow::pow(&two, 3u32.pow(n as u32) - (1 << n));
        let b: BigInt = Pow::pow(&two, 3u32.pow(n as u32));
        ensure(p.coords() == [a, b, BigInt::from(1)], || format!("coordinates differ at n = {n}"))?;
    }
    let s = height_ratio_series(&f, &y, &x0, 12).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = s.rows.iter().map(|r| r.ratio.unwrap()).collect();
    let (p2, p3) = (2f64.powi(12), 3f64.powi(12));
    let closed = (p3 - p2) * 2f64.ln() / (p2 * 3f64.ln() + (p3 - p2) * 2f64.ln());
    let r12 = ratios[12];
    ensure((r12 - closed).abs() < 1e-9, || format!("ratio {r12} vs closed form {closed}"))?;
    ensure(r12 > 0.98, || format!("ratio {r12} <= 0.98"))?;
    ensure(ratios[3..].windows(2).all(|w| w[1] > w[0]), || "ratio not increasing for n >= 3".into())?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("13 iterates exact, ratio(12) = {r12:.9} (closed form {closed:.9}), {:.2?}", start.elapsed()))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let cases: [(&[&str], u32); 3] = [
        (&["x0^2*x1", "x1^3", "x2^3"], 6),
        (&["x0^2*x1", "x1^3 + x0^2*x1 + x0*x2^2", "x2^3"], 7),
        (&["x0^2", "x1^2", "x2^2"], 4),
    ];
    let mut found = Vec::new();
    for (src, want) in cases {
        let opts = FiberOptions {
            rational_scan: false,
            seed: 2024,
            ..FiberOptions::default()
        };
        let r = topological_degree_ff(&map(src), &opts).map_err(|e| e.to_string())?;
        ensure(r.mode == Some(want), || format!("{src:?}: mode {:?}, expected {want}", r.modes))?;
        ensure(r.stable_across_primes, || format!("{src:?}: per-prime modes differ"))?;
        ensure(r.per_prime.iter().all(|p| p.counts.len() == 20), || "wrong sample size".into())?;
        ensure(
            r.per_prime.iter().flat_map(|p| &p.counts).all(|c| c.is_some_and(|c| c as u64 <= r.bezout_bound)),
            || format!("{src:?}: a count exceeds the Bezout bound"),
        )?;
        found.push(want);
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("modes {found:?} on primes 1009/2003/4001 x 20 targets, {:.2?}", start.elapsed()))
}

fn det3(m: &[[i64; 3]; 3]) -> i64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn criterion_4() -> Outcome {
    let d = monomial_dyn_degrees(&MonomialMap::new(vec![vec![2, 1], vec![0, 3]]).unwrap());
    ensure((d.degrees[1] - 3.0).abs() < 1e-9 && (d.degrees[2] - 6.0).abs() < 1e-9, || {
        format!("(d1, d2) = ({}, {})", d.degrees[1], d.degrees[2])
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut done = 0;
    while done < 100 {
        let mut m = [[0i64; 3]; 3];
        m.iter_mut().flatten().for_each(|v| *v = rng.gen_range(-5..=5));
        let det = det3(&m);
        if det == 0 {
            continue;
        }
        let a = MonomialMap::new(m.iter().map(|r| r.to_vec()).collect()).unwrap();
        let d = monomial_dyn_degrees(&a);
        ensure(d.det_abs == BigInt::from(det.abs()) && d.degrees[3] == det.abs() as f64, || {
            format!("d_N {} vs |det| {} for {m:?}", d.degrees[3], det.abs())
        })?;
        ensure(d.det_check < 1e-9, || format!("moduli product off by {} for {m:?}", d.det_check))?;
        ensure(is_log_concave(&d.degrees, 1e-9), || format!("not log-concave: {:?} for {m:?}", d.degrees))?;
        done += 1;
    }
    Ok("(d1, d2) = (3, 6); 100 random 3x3 matrices: d_N = |det|, log-concave".into())
}

fn criterion_5() -> Outcome {
    let f = map(&["x0^2*x1", "x1^3", "x2^3"]);
    let s = height_ratio_series(&f, &ideal(&["x0", "x1"]), &ProjPoint::from_i64(&[3, 2, 1]).unwrap(), 12)
        .map_err(|e| e.to_string())?;
    let h: Vec<f64> = s.rows.iter().map(|r| r.h).collect();
    let a = arithmetic_degree_estimate(&h).map_err(|e| e.to_string())?;
    ensure((a.ratio_tail - 3.0).abs() <= 0.05 * 3.0, || format!("ratio_tail {}", a.ratio_tail))?;
    let sq: Vec<f64> = (0..=12).map(|n| 2f64.powi(n) * std::f64::consts::LN_2).collect();
    let b = arithmetic_degree_estimate(&sq).map_err(|e| e.to_string())?;
    ensure((b.ratio_tail - 2.0).abs() <= 1e-6, || format!("squaring ratio_tail {}", b.ratio_tail))?;
    Ok(format!("backnonfin ratio_tail = {:.4}, squaring ratio_tail = {:.9}", a.ratio_tail, b.ratio_tail))
}

fn criterion_6() -> Outcome {
    let r = run_scenario(&ScenarioConfig::bcz(2, 3, 40), 6).map_err(|e| e.to_string())?;
    ensure(r.rows.len() == 41, || format!("{} rows", r.rows.len()))?;
    for row in &r.rows[1..] {
        let b = bcz_closed_form(2, 3, row.n as u32);
        let p = row.parts.as_ref().ok_or("missing exact parts")?;
        ensure(p.norm == b.norm && p.witness_value == b.arch_den && p.gcd == b.gcd, || {
            format!("integers differ at n = {}", row.n)
        })?;
        ensure(row.h == b.h && row.h_y.total() == Some(b.h_y), || format!("heights differ at n = {}", row.n))?;
    }
    let t = &r.summary.trend;
    ensure(t.label == TrendLabel::ToZero, || format!("trend {}", t.label.as_str()))?;
    Ok(format!(
        "40 rows integer-exact; trend {} (slope {:.3})",
        t.label.as_str(),
        t.slope.unwrap_or(f64::NAN)
    ))
}

fn criterion_7() -> Outcome {
    let a2 = run_scenario(&ScenarioConfig::a2(10), 7).map_err(|e| e.to_string())?;
    let c = &a2.summary.checklist;
    let alpha = c.alpha.ok_or("no alpha estimate")?;
    ensure(a2.summary.dn_mode == Some(7), || format!("d2 = {:?}", a2.summary.dn_mode))?;
    let predicts = c.verdict == Verdict::PredictsZero && c.predicts_ratio_to_zero == "yes";
    ensure(predicts == (alpha > 7f64.sqrt()), || format!("alpha {alpha} vs verdict {}", c.verdict.as_str()))?;
    ensure(predicts, || format!("alpha {alpha} does not exceed sqrt 7"))?;
    let bn = run_scenario(&ScenarioConfig::backnonfin(12), 7).map_err(|e| e.to_string())?;
    ensure(bn.summary.checklist.verdict == Verdict::NotApplicable, || {
        format!("backnonfin verdict {}", bn.summary.checklist.verdict.as_str())
    })?;
    ensure(bn.summary.trend.label == TrendLabel::ToOne, || {
        format!("backnonfin trend {}", bn.summary.trend.label.as_str())
    })?;
    Ok(format!(
        "a2: alpha = {alpha:.4} > sqrt 7 -> {}; backnonfin: {} with trend {}",
        c.verdict.as_str(),
        bn.summary.checklist.verdict.as_str(),
        bn.summary.trend.label.as_str()
    ))
}

fn run_suite<S: Strategy>(
    name: &str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), proptest::test_runner::TestCaseError>,
) -> Result<(), String> {
    let mut config = Config::with_cases(cases);
    config.failure_persistence = None;
    config.max_global_rejects = cases * 4;
    let mut runner = TestRunner::new_with_rng(
        config,
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn criterion_8() -> Outcome {
    const CASES: u32 = 10_000;
    let start = Instant::now();
    run_suite("ring laws", CASES, (poly(3, 3, 5), poly(3, 3, 5), poly(3, 3, 5)), |(p, q, r)| {
        check_ring_laws(&p, &q, &r)
    })?;
    run_suite("gcd round trip", CASES, (poly(3, 2, 4), poly(3, 2, 4), poly(3, 2, 3)), |(a, b, c)| {
        check_gcd_round_trip(&a, &b, &c)
    })?;
    run_suite(
        "compose/eval",
        CASES,
        (poly(3, 3, 5), prop::collection::vec(form(2), 3), point(30)),
        |(p, g, x)| check_compose_eval(&p, &g, &x),
    )?;
    run_suite("submultiplicativity", CASES, prop::collection::vec(form(2), 3), |fs| check_submultiplicative(&fs))?;
    let ys = [ideal(&["x0", "x1"]), ideal(&["x0 - x2", "x1^2 - x0*x2"])];
    run_suite("representative independence", CASES, (point(1_000_000), -1000i64..=1000), |(raw, k)| {
        ys.iter().try_for_each(|y| check_representative_independence(&raw, k, y))
    })?;
    run_suite("report determinism", CASES, (point(9), 1usize..5, any::<u64>()), |(s, n, seed)| {
        check_report_determinism(&s, n, seed, false)
    })?;
    run_suite("report determinism with fiber counts", 200, (point(9), 1usize..4, any::<u64>()), |(s, n, seed)| {
        check_report_determinism(&s, n, seed, true)
    })?;
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("6 suites x {CASES} cases green, {:.2?}", start.elapsed()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("subscheme height matches the coordinate-point formula", criterion_1),
        ("backnonfin orbit and ratio closed form", criterion_2),
        ("topological degrees by fiber counting", criterion_3),
        ("monomial dynamical degrees", criterion_4),
        ("arithmetic degree estimates", criterion_5),
        ("diagonal-map gcd series and trend", criterion_6),
        ("hypothesis checker", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    let mut out = std::io::stdout().lock();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => writeln!(out, "criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                writeln!(out, "criterion {}: FAIL  {name}: {why}", i + 1)
            }
        }
        .unwrap();
        out.flush().unwrap();
    }
    writeln!(out, "acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len()).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
