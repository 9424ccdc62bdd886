use harperlab::cocycles::{
    acceleration, complexified_le, det, lyapunov, mat_mul, op_norm, rotation_number, spectrum_test, step_matrix,
    CocycleSpec, LyapunovProfile, Mat2, SpectrumBudget, SpectrumVerdict, Variant,
};
use harperlab::model::mean_log_c;
use harperlab::spectra::density_of_states;
use harperlab::Coupling;
use num_complex::Complex64;
use proptest::prelude::*;

const G: f64 = 0.618_033_988_749_894_9;

fn spec(l: (f64, f64, f64), energy: f64, epsilon: f64, variant: Variant) -> CocycleSpec {
    CocycleSpec { coupling: Coupling::new(l.0, l.1, l.2).unwrap(), alpha: G, energy, epsilon, variant }
}

fn symmetric_grid(half: usize, h: f64) -> Vec<f64> {
    (-(half as i64)..=half as i64).map(|i| i as f64 * h).collect()
}

fn check_profile(p: &LyapunovProfile) {
    for (l, s) in p.l_values.iter().zip(&p.sigma) {
        assert!(*l >= -3.0 * s - 1e-3, "negative L = {l} at E = {}", p.energy);
    }
    assert!(p.evenness_ratio(3.0, 1e-3) <= 1.0, "evenness at E = {}", p.energy);
    assert!(p.convexity_ratio(3.0, 1e-3) <= 1.0, "convexity at E = {}", p.energy);
    let i0 = p.eps_grid.iter().position(|&e| e == 0.0).unwrap();
    let min = p.min_value();
    assert!(p.l_values[i0] <= min + 3.0 * p.sigma[i0] + 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn normalized_sharp_is_unimodular(
        l1 in 0.0f64..3.0, l2 in 0.1f64..3.0, l3 in 0.0f64..3.0,
        energy in -6.0f64..6.0, theta in 0.0f64..1.0,
    ) {
        let s = spec((l1, l2, l3), energy, 0.0, Variant::NormalizedSharp);
        if let Ok(m) = step_matrix(&s, theta) {
            prop_assert!((det(&m) - 1.0).norm() < 1e-12);
            prop_assert!(m.iter().flatten().all(|x| x.im.abs() < 1e-12));
        }
    }
}

/// `(1/n) log‖A_{n-1} ⋯ A_0‖` with each step replaced by `D A D⁻¹`.
fn conjugated_growth(s: &CocycleSpec, theta: f64, n: usize, d: (f64, f64)) -> f64 {
    let dm: Mat2 =
        [[Complex64::new(d.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(d.1, 0.0)]];
    let di: Mat2 = [
        [Complex64::new(1.0 / d.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0 / d.1, 0.0)],
    ];
    let mut m: Mat2 =
        [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]];
    let mut log = 0.0;
    for k in 0..n {
        let a = step_matrix(s, theta + k as f64 * G).unwrap();
        m = mat_mul(&mat_mul(&mat_mul(&dm, &a), &di), &m);
        let nrm = op_norm(&m);
        for x in m.iter_mut().flatten() {
            *x /= nrm;
        }
        log += nrm.ln();
    }
    log / n as f64
}

#[test]
fn exponent_is_invariant_under_constant_conjugacy() {
    let n = 20_000;
    for (l, e) in [((0.0, 0.5, 0.0), 0.3), ((2.0, 1.0, 0.5), 0.1), ((0.3, 1.0, 0.2), 5.0)] {
        let s = spec(l, e, 0.0, Variant::JacobiA);
        let phases = [0.1, 0.37, 0.71];
        let plain: f64 = phases.iter().map(|&t| conjugated_growth(&s, t, n, (1.0, 1.0))).sum::<f64>() / 3.0;
        let conj: f64 = phases.iter().map(|&t| conjugated_growth(&s, t, n, (2.0, 0.5))).sum::<f64>() / 3.0;
        assert!((plain - conj).abs() < 2e-2, "{l:?}: {plain} vs {conj}");
        let lib = lyapunov(&s, n, 3, 0).unwrap().mean;
        assert!((plain - lib).abs() < 5e-2, "{l:?}: {plain} vs {lib}");
    }
}

#[test]
fn transfer_and_jacobi_differ_by_mean_log_c() {
    for (l, e) in [((0.0, 0.5, 0.0), 0.3), ((2.0, 1.0, 0.5), 0.2), ((0.3, 1.5, 0.4), 4.5)] {
        let a = lyapunov(&spec(l, e, 0.0, Variant::JacobiA), 40_000, 8, 0).unwrap();
        let b = lyapunov(&spec(l, e, 0.0, Variant::TransferB), 40_000, 8, 0).unwrap();
        let ic = mean_log_c(&Coupling::new(l.0, l.1, l.2).unwrap());
        assert!((a.mean - ic - b.mean).abs() < 1e-2, "{l:?}: {} - {ic} vs {}", a.mean, b.mean);
    }
}

#[test]
fn profiles_satisfy_invariants() {
    let eps = symmetric_grid(20, 0.05);
    for l in [(0.0, 0.5, 0.0), (2.0, 1.0, 0.5), (1.0, 1.0, 1.0), (0.2, 0.5, 0.1)] {
        let lam = Coupling::new(l.0, l.1, l.2).unwrap();
        for e in [-1.3, 0.0, 0.7, 2.9] {
            check_profile(&complexified_le(&lam, G, e, &eps, 20_000, 8).unwrap());
        }
    }
}

#[test]
fn large_eps_slope_is_half_integer() {
    let eps = symmetric_grid(60, 0.05);
    for l in [(0.0, 1.0, 0.0), (2.0, 1.0, 0.5), (1.0, 1.0, 1.0)] {
        let lam = Coupling::new(l.0, l.1, l.2).unwrap();
        let p = complexified_le(&lam, G, 0.4, &eps, 20_000, 8).unwrap();
        let far = p.interior_slopes().last().copied().unwrap();
        let near_half = (2.0 * far - (2.0 * far).round()).abs() / 2.0;
        assert!(near_half < 0.02, "{l:?}: slope {far}");
    }
}

#[test]
fn spectrum_test_examples() {
    let budget = SpectrumBudget::default();
    let lam = Coupling::new(0.0, 0.5, 0.0).unwrap();
    let far = 2.0 + 2.0 * 0.5 + 10.0;
    assert_eq!(spectrum_test(&lam, G, far, &budget).unwrap().verdict, SpectrumVerdict::Outside);

    // An energy from the truncated spectrum.
    let dos = density_of_states(&lam, G, 256, 4, 10).unwrap();
    let e = dos.eigenvalues[dos.eigenvalues.len() / 3];
    assert_eq!(spectrum_test(&lam, G, e, &budget).unwrap().verdict, SpectrumVerdict::Inside);

    let amo = Coupling::new(0.0, 1.0, 0.0).unwrap();
    let dos = density_of_states(&amo, G, 256, 4, 10).unwrap();
    let e = dos.eigenvalues[dos.eigenvalues.len() / 3];
    assert_eq!(spectrum_test(&amo, G, e, &budget).unwrap().verdict, SpectrumVerdict::Undecided);
}

#[test]
fn subcritical_anisotropic_has_no_jump() {
    let lam = Coupling::new(2.0, 1.0, 0.5).unwrap();
    let dos = density_of_states(&lam, G, 256, 4, 10).unwrap();
    let eps = symmetric_grid(8, 0.025);
    for frac in [0.2, 0.5, 0.8] {
        let e = dos.eigenvalues[(frac * dos.eigenvalues.len() as f64) as usize];
        let p = complexified_le(&lam, G, e, &eps, 40_000, 16).unwrap();
        let w = acceleration(&p, 0.0).unwrap();
        assert_eq!(w.quantized, 0.0, "E = {e}: {w:?}");
    }
}

#[test]
fn rotation_number_is_monotone_and_bounded() {
    let lam = Coupling::new(0.0, 0.5, 0.0).unwrap();
    let mut last = 0.5 + 1e-9;
    for i in 0..=24 {
        let e = -4.0 + i as f64 / 3.0;
        let r = rotation_number(&lam, G, e, 20_000).unwrap();
        assert!((0.0..=0.5).contains(&r.rho));
        assert!(r.rho <= last + 2e-3, "E = {e}: {} after {last}", r.rho);
        last = r.rho;
    }
}
