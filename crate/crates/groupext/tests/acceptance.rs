//! Acceptance checks: one test per criterion, each printing a single
//! `criterion N ... PASS` line and enforcing a wall-clock budget. Budgets are
//! sized for unoptimized debug builds on desk hardware.

mod oracle;

use std::time::{Duration, Instant};

use groupext::abelian::Elem;
use groupext::cohomology::{h2, rotation_cocycle, validate_cocycle};
use groupext::corpus;
use groupext::report::VerificationReport;
use groupext::suites::{self, SuiteOptions};

fn finish(criterion: &str, t0: Instant, budget: Duration) {
    let dt = t0.elapsed();
    println!("criterion {criterion}: PASS ({:.2} s)", dt.as_secs_f64());
    assert!(dt <= budget, "criterion {criterion} exceeded its {budget:?} budget: {dt:?}");
}

fn assert_suite_clean(r: &VerificationReport) {
    assert!(!r.checks.is_empty(), "suite {} ran no checks", r.suite);
    if let Some(c) = r.first_failure() {
        panic!(
            "suite {} failed at {}: {}",
            r.suite,
            c.name,
            c.witness.clone().unwrap_or_default()
        );
    }
}

#[test]
fn criterion_1_rotation_cocycle_values() {
    let t0 = Instant::now();
    let omega = rotation_cocycle(3, 2).unwrap();
    let g = &omega.action().groupoid;
    for k1 in 0..3i64 {
        for k2 in 0..3i64 {
            let expected = if k1 + k2 < 3 { 0 } else { 6 };
            let a = g.arrow_idx(&k1.to_string()).unwrap();
            let b = g.arrow_idx(&k2.to_string()).unwrap();
            assert_eq!(omega.value(a, b).unwrap(), Elem(vec![expected]), "omega({k1},{k2})");
        }
    }
    assert!(validate_cocycle(&omega).is_valid());
    finish("1 (rotation cocycle)", t0, Duration::from_secs(1));
}

#[test]
fn criterion_2_ext_group_axioms() {
    let t0 = Instant::now();
    let r = suites::ext_group_axioms().unwrap();
    let distinct_extensions =
        r.checks.iter().filter(|c| c.name.starts_with("zero-law:")).count();
    assert!(distinct_extensions >= 20, "corpus too small: {distinct_extensions} extensions");
    assert_suite_clean(&r);
    finish("2 (ext-group axioms)", t0, Duration::from_secs(120));
}

#[test]
fn criterion_3_pushout_functoriality() {
    let t0 = Instant::now();
    let r = suites::pushout_functoriality().unwrap();
    assert!(r.checks.len() >= 10, "need at least 10 instances, got {}", r.checks.len());
    assert_suite_clean(&r);
    finish("3 (pushout functoriality)", t0, Duration::from_secs(60));
}

#[test]
fn criterion_4_dual_side_fingerprint_equality() {
    let t0 = Instant::now();
    let r = suites::pushout_theorem(&SuiteOptions::default()).unwrap();
    for pinned in ["expected-fingerprint:z4-over-z2", "expected-fingerprint:heisenberg-3"] {
        assert!(
            r.checks.iter().any(|c| c.name == pinned),
            "missing pinned instance {pinned}"
        );
    }
    assert_suite_clean(&r);
    finish("4 (dual-side fingerprint equality)", t0, Duration::from_secs(300));
}

#[test]
fn criterion_5_character_summand_union() {
    let t0 = Instant::now();
    let r = suites::compact_decomposition(&SuiteOptions::default()).unwrap();
    assert_suite_clean(&r);
    finish("5 (character summand union)", t0, Duration::from_secs(120));
}

#[test]
fn criterion_6_h2_oracle_agreement() {
    let t0 = Instant::now();
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
    for n in 2..=6i64 {
        for m in 2..=6i64 {
            let brute = oracle::cyclic_classes(n, m).class_count as i64;
            assert_eq!(brute, gcd(n, m), "brute force at n={n} m={m}");
            let h = h2(&corpus::cyclic_context(n, m).unwrap()).unwrap();
            let factors = if gcd(n, m) == 1 { vec![] } else { vec![gcd(n, m)] };
            assert_eq!(h.invariant_factors, factors, "smith form at n={n} m={m}");
        }
    }
    for (k, m) in [(2i64, 2i64), (2, 3), (3, 2), (3, 3), (4, 2)] {
        let h = h2(&corpus::pair_context(k, m).unwrap()).unwrap();
        assert!(h.is_trivial(), "pair groupoid k={k} m={m}");
    }
    finish("6 (second cohomology vs brute force)", t0, Duration::from_secs(60));
}

#[test]
fn criterion_7_roundtrip_and_decider_agreement() {
    let t0 = Instant::now();
    let r = suites::cocycle_roundtrip(&SuiteOptions::default()).unwrap();
    assert!(r.unknown() == 0, "searches must run to completion");
    assert_suite_clean(&r);
    finish("7 (round trip and decider agreement)", t0, Duration::from_secs(120));
}

#[test]
fn criterion_8_masa() {
    let t0 = Instant::now();
    let r = suites::masa(&SuiteOptions::default()).unwrap();
    assert_suite_clean(&r);
    finish("8 (maximal abelian subalgebras)", t0, Duration::from_secs(60));
}

#[test]
fn criterion_9_invariant_partition_unions() {
    let t0 = Instant::now();
    let r = suites::bundle_decomposition(&SuiteOptions::default()).unwrap();
    assert_suite_clean(&r);
    finish("9 (invariant partition unions)", t0, Duration::from_secs(60));
}
