#![allow(clippy::needless_range_loop)]

use harperlab::spectra::{
    char_poly, density_of_states, duality_dos_check, eigenvalues, ids_rotation_consistency, sturm_count, truncate,
    TridiagonalOperatorWindow,
};
use harperlab::{Coupling, Error};
use num_complex::Complex64;
use proptest::prelude::*;

const G: f64 = 0.618_033_988_749_894_9;

/// Dense Hermitian matrix of a window.
fn dense(w: &TridiagonalOperatorWindow) -> Vec<Vec<Complex64>> {
    let n = w.n;
    let mut h = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for k in 0..n {
        h[k][k] = Complex64::new(w.diagonal[k], 0.0);
    }
    for k in 0..n - 1 {
        h[k][k + 1] = w.offdiag[k];
        h[k + 1][k] = w.offdiag[k].conj();
    }
    h
}

/// Determinant by Gaussian elimination with partial pivoting.
fn det(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut d = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm())).unwrap();
        if m[piv][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        d *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                let v = m[col][c];
                m[r][c] -= f * v;
            }
        }
    }
    d
}

/// `E·I - H`, leading `k×k` block.
fn shifted_block(h: &[Vec<Complex64>], e: f64, k: usize) -> Vec<Vec<Complex64>> {
    (0..k).map(|i| (0..k).map(|j| if i == j { e - h[i][j] } else { -h[i][j] }).collect()).collect()
}

/// Eigenvalues of a Hermitian matrix above `e`: sign changes along the
/// leading principal minors of `E·I - H`.
fn count_above(h: &[Vec<Complex64>], e: f64) -> usize {
    let mut prev = 1.0f64;
    let mut changes = 0;
    for k in 1..=h.len() {
        let d = det(shifted_block(h, e, k)).re;
        if d * prev < 0.0 {
            changes += 1;
        }
        prev = d;
    }
    changes
}

fn window_coupling() -> impl Strategy<Value = Coupling> {
    (0.0f64..2.0, 0.1f64..2.0, 0.0f64..2.0).prop_map(|(a, b, c)| Coupling::new(a, b, c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn char_poly_matches_dense_determinant(lam in window_coupling(), theta in 0.0f64..1.0, e in -5.0f64..5.0) {
        let w = truncate(&lam, G, theta, 6).unwrap();
        let want = det(shifted_block(&dense(&w), e, 6));
        prop_assert!(want.im.abs() < 1e-9 * (1.0 + want.re.abs()));
        let got = char_poly(&lam, G, theta, 6, e);
        prop_assert!((got - want.re).abs() <= 1e-9 * want.re.abs().max(1e-3), "{} vs {}", got, want.re);
    }

    #[test]
    fn hermitian_window_matches_symmetrized(lam in window_coupling(), theta in 0.0f64..1.0, n in 1usize..=8) {
        let w = truncate(&lam, G, theta, n).unwrap();
        let h = dense(&w);
        let ev = eigenvalues(&w, 1e-12).unwrap();
        for (i, &x) in ev.iter().enumerate() {
            // Skip clusters closer than the probe offsets.
            if ev.iter().enumerate().any(|(j, &y)| j != i && (x - y).abs() < 1e-7) {
                continue;
            }
            prop_assert_eq!(count_above(&h, x - 1e-9), n - i);
            prop_assert_eq!(count_above(&h, x + 1e-9), n - i - 1);
        }
    }

    #[test]
    fn ids_is_a_distribution(lam in window_coupling(), n in 8usize..64, phases in 1usize..6) {
        let s = density_of_states(&lam, G, n, phases, 16).unwrap();
        prop_assert!((s.total_mass() - 1.0).abs() < 1e-12);
        prop_assert_eq!(s.ids(s.min() - 1e-9), 0.0);
        prop_assert_eq!(s.ids(s.max()), 1.0);
        let mut last = 0.0;
        for i in 0..=100 {
            let e = s.min() + (s.max() - s.min()) * i as f64 / 100.0;
            let v = s.ids(e);
            prop_assert!(v >= last);
            last = v;
        }
    }
}

#[test]
fn eigenvalues_interlace() {
    let lam = Coupling::new(0.7, 1.0, 0.4).unwrap();
    let theta = 0.271;
    let mut prev = eigenvalues(&truncate(&lam, G, theta, 1).unwrap(), 1e-13).unwrap();
    for n in 2..=256 {
        let cur = eigenvalues(&truncate(&lam, G, theta, n).unwrap(), 1e-13).unwrap();
        for i in 0..n - 1 {
            assert!(cur[i] <= prev[i] + 1e-11 && prev[i] <= cur[i + 1] + 1e-11, "n = {n}, i = {i}");
        }
        prev = cur;
    }
}

#[test]
fn gershgorin_enclosure() {
    for (l, theta) in [((1.0, 1.0, 1.0), 0.1), ((2.0, 1.0, 0.5), 0.4), ((0.0, 0.5, 0.0), 0.9), ((0.3, 2.0, 0.1), 0.2)] {
        let lam = Coupling::new(l.0, l.1, l.2).unwrap();
        let w = truncate(&lam, G, theta, 200).unwrap();
        let ev = eigenvalues(&w, 1e-12).unwrap();
        let vmin = w.diagonal.iter().copied().fold(f64::INFINITY, f64::min);
        let vmax = w.diagonal.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let cmax = w.offdiag.iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(ev[0] >= vmin - 2.0 * cmax - 1e-12 && ev[199] <= vmax + 2.0 * cmax + 1e-12, "{l:?}");
    }
}

#[test]
fn char_poly_sign_agrees_with_sturm() {
    let lam = Coupling::new(1.0, 1.0, 0.6).unwrap();
    let theta = 0.123;
    let n = 40;
    let w = truncate(&lam, G, theta, n).unwrap();
    let b = w.symmetrized_offdiag();
    let mut state = 12345u64;
    for _ in 0..50 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let e = -6.0 + 12.0 * (state >> 11) as f64 / (1u64 << 53) as f64;
        let below = sturm_count(&w.diagonal, &b, e);
        let p = char_poly(&lam, G, theta, n as i64, e);
        // det(E - H) = Π (E - λ_i) has one sign flip per eigenvalue above E.
        let expected = if (n - below).is_multiple_of(2) { 1.0 } else { -1.0 };
        assert_eq!(p.signum(), expected, "E = {e}");
    }
}

#[test]
fn amo_spectrum_is_symmetric() {
    let s = density_of_states(&Coupling::new(0.0, 1.0, 0.0).unwrap(), G, 512, 64, 64).unwrap();
    assert!(s.min() >= -4.0 && s.max() <= 4.0);
    let mut worst = 0.0f64;
    for i in 0..=80 {
        let e = -4.0 + 0.1 * i as f64;
        worst = worst.max((s.ids(e) + s.ids(-e) - 1.0).abs());
    }
    assert!(worst < 0.01, "{worst}");
}

#[test]
fn duality_examples() {
    let probes: Vec<f64> = (0..=60).map(|i| -4.5 + 0.15 * i as f64).collect();
    let amo = duality_dos_check(&Coupling::new(0.0, 1.0, 0.0).unwrap(), G, 512, 32, &probes).unwrap();
    assert!(amo < 0.02, "{amo}");

    let axis = duality_dos_check(&Coupling::new(1.0, 0.0, 2.0).unwrap(), G, 512, 32, &probes).unwrap();
    assert!(axis < 0.05, "{axis}");
}

#[test]
fn singular_model_is_rejected_by_rotation_check() {
    let r = ids_rotation_consistency(&Coupling::new(1.0, 1.0, 1.0).unwrap(), G, &[0.0], 64, 1000);
    assert_eq!(r, Err(Error::SingularModel));
}
