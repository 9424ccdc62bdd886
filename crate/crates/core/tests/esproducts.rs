use std::f64::consts::PI;

use harperlab::contfrac::{expand, Alpha};
use harperlab::esproducts::{
    ergodic_upper_bound, s_sum, s_sum_rational, sup_s_sum, sup_s_sum_with_grid, CircleFunctionSpec, TrigPoly,
};
use num_complex::Complex64;
use num_integer::Integer;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn golden() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

/// Direct `Σ_{k<q} log|e^{2πi(kα + φ)} - 1|` through complex arithmetic.
fn naive(q: u64, alpha: f64, phi: f64) -> f64 {
    (0..q).map(|k| (Complex64::from_polar(1.0, 2.0 * PI * (k as f64 * alpha + phi)) - 1.0).norm().ln()).sum()
}

#[test]
fn rational_frequency_identity() {
    // Splitmix-style generator so the probe set is fixed.
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        (z ^ (z >> 31)) as f64 / u64::MAX as f64
    };
    let (mut exact_worst, mut float_worst) = (0.0f64, 0.0f64);
    for q in 1u64..=500 {
        let p = (1..=q).rev().find(|p| p.gcd(&q) == 1 && *p <= q.max(2) / 2 + 1).unwrap();
        let mut done = 0;
        while done < 20 {
            let z = next();
            // Admissible: the orbit keeps away from the roots of z^q = 1,
            // where both sides lose relative accuracy.
            let gap = harperlab::util::dist_to_integers(q as f64 * z);
            if gap < 1e-3 {
                continue;
            }
            let target = 2.0 * (PI * gap).sin();
            exact_worst = exact_worst.max((s_sum_rational(p, q, z).unwrap() - target.ln()).abs());
            // With p/q rounded to a double, the error scales like the inverse
            // distance to the nearest root; compare only well away from them.
            if gap > 0.05 {
                float_worst = float_worst.max((s_sum(q, p as f64 / q as f64, z).unwrap() - target.ln()).abs());
            }
            done += 1;
        }
    }
    assert!(exact_worst < 1e-9, "{exact_worst}");
    assert!(float_worst < 1e-9, "{float_worst}");
}

#[test]
fn rational_sup_is_log_two() {
    for (p, q) in [(1u64, 2u64), (2, 5), (3, 7), (5, 13), (21, 55)] {
        let r = sup_s_sum(q, p as f64 / q as f64).unwrap();
        assert!((r.sup_value - 2f64.ln()).abs() < 1e-9, "{p}/{q}: {}", r.sup_value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn matches_naive_loop(q in 1u64..400, phi in 0.0f64..1.0) {
        let alpha = golden();
        let got = s_sum(q, alpha, phi);
        prop_assume!(got.is_ok());
        let want = naive(q, alpha, phi);
        prop_assert!((got.unwrap() - want).abs() < 1e-9 * (1.0 + want.abs()));
    }

    #[test]
    fn translation_covariance(q in 1u64..400, phi in 0.01f64..0.99) {
        let alpha = golden();
        let shifted = s_sum(q, alpha, phi + alpha);
        let base = s_sum(q, alpha, phi);
        prop_assume!(shifted.is_ok() && base.is_ok());
        // Shifting z by e^{2πiα} moves the window from {0..q-1} to {1..q}.
        let edge_in = (2.0 * (PI * (q as f64 * alpha + phi)).sin()).abs().ln();
        let edge_out = (2.0 * (PI * phi).sin()).abs().ln();
        let want = base.unwrap() - edge_out + edge_in;
        prop_assert!((shifted.unwrap() - want).abs() < 1e-10 * (1.0 + want.abs()), "{}", want);
    }
}

#[test]
fn sup_dominates_probes() {
    let cf = expand(&Alpha::golden(), 14).unwrap();
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for n in [3usize, 6, 9, 12] {
        let q = cf.q_u64(n).unwrap();
        let sup = sup_s_sum(q, cf.alpha).unwrap().sup_value;
        for _ in 0..25 {
            let phi = (0.0f64..1.0).new_tree(&mut runner).unwrap().current();
            if let Ok(v) = s_sum(q, cf.alpha, phi) {
                assert!(sup >= v - 1e-12, "q = {q}, phi = {phi}: {v} > {sup}");
            }
        }
    }
}

#[test]
fn grid_doubling_never_loses() {
    let cf = expand(&Alpha::golden(), 12).unwrap();
    for n in 1..=10 {
        let q = cf.q_u64(n).unwrap();
        let coarse = sup_s_sum_with_grid(q, cf.alpha, 512).unwrap().sup_value;
        let fine = sup_s_sum_with_grid(q, cf.alpha, 1024).unwrap().sup_value;
        assert!(fine >= coarse - 1e-12, "q = {q}: {fine} < {coarse}");
    }
}

#[test]
fn zero_free_deviation_bounded_on_every_index() {
    let f = CircleFunctionSpec::new(vec![], TrigPoly::cosine(&[(0, 2.0), (1, 1.0)])).unwrap();
    let bound = f.harmonic_constant();
    for alpha in [Alpha::golden(), Alpha::silver()] {
        let cf = expand(&alpha, 14).unwrap();
        let indices: Vec<usize> = (1..=cf.len()).filter(|&n| cf.q_u64(n).unwrap() <= 2000).collect();
        let d = ergodic_upper_bound(&f, &cf, &indices, 1000).unwrap();
        for (n, v) in indices.iter().zip(&d) {
            assert!(*v <= bound, "{} n = {n}: {v} > {bound}", alpha.repr());
        }
    }
}

#[test]
fn simple_zero_deviation_tracks_circle_sup() {
    // log|e^{2πix} - 1| summed along the orbit is exactly S(q, e^{2πix}).
    let f = CircleFunctionSpec::new(vec![(0.0, 1)], TrigPoly::cosine(&[(0, 1.0)])).unwrap();
    assert!(f.mean_log.abs() < 1e-15);
    let cf = expand(&Alpha::golden(), 10).unwrap();
    let indices: Vec<usize> = (1..=8).collect();
    let d = ergodic_upper_bound(&f, &cf, &indices, 4096).unwrap();
    for (&n, dn) in indices.iter().zip(&d) {
        let sup = sup_s_sum(cf.q_u64(n).unwrap(), cf.alpha).unwrap().sup_value;
        assert!(*dn <= sup + 1e-9 && sup - dn < 0.05, "n = {n}: {dn} vs {sup}");
    }
}

#[test]
fn running_min_is_prefix_minimum() {
    let cf = expand(&Alpha::silver(), 10).unwrap();
    let s = harperlab::esproducts::liminf_track(&cf, 8).unwrap();
    let mut m = f64::INFINITY;
    for (i, e) in s.entries.iter().enumerate() {
        assert_eq!(e.n, i + 1);
        m = m.min(e.sup_value);
        assert_eq!(e.running_min, m);
    }
    assert_eq!(s.running_min, m);
}
