//! Trigonometric products along the rotation orbit.
//!
//! `S(q, z) = Σ_{k<q} log|e^{2πikα} z - 1|`, written with `z = e^{2πiφ}` as
//! `Σ log(2|sin π(kα + φ)|)`. Between consecutive singular angles `S` is
//! concave in `φ`, which justifies a grid search followed by golden-section
//! refinement of the best bracket.

use num_complex::Complex64;
use num_traits::ToPrimitive;
use std::f64::consts::PI;

use crate::contfrac::ContinuedFraction;
use crate::error::{Error, Result};
use crate::util::{dist_to_integers, frac_orbit, ln_big, log_two_sin, CompensatedSum};

/// Angular guard radius around singular points.
pub const SINGULAR_GUARD: f64 = 1e-14;

/// Default cap on `q_n` for sup tracking.
pub const Q_CAP: u64 = 1_000_000;

/// `S(q, e^{2πi z_angle})`, with compensated accumulation.
pub fn s_sum(q: u64, alpha: f64, z_angle: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::InvalidInput("q must be positive".into()));
    }
    let mut acc = CompensatedSum::new();
    for k in 0..q {
        let x = frac_orbit(k as f64, alpha, z_angle);
        if dist_to_integers(x) < SINGULAR_GUARD {
            return Err(Error::SingularPoint { angle: z_angle });
        }
        acc.add(log_two_sin(x));
    }
    Ok(acc.value())
}

/// `S(q, e^{2πi z_angle})` at the frequency `p/q`, with the orbit
/// `kp mod q` reduced in integers so the frequency is not rounded.
pub fn s_sum_rational(p: u64, q: u64, z_angle: f64) -> Result<f64> {
    if q == 0 {
        return Err(Error::InvalidInput("q must be positive".into()));
    }
    let mut acc = CompensatedSum::new();
    for k in 0..q {
        let r = ((k as u128 * p as u128) % q as u128) as f64 / q as f64;
        let x = r + z_angle;
        if dist_to_integers(x) < SINGULAR_GUARD {
            return Err(Error::SingularPoint { angle: z_angle });
        }
        acc.add(log_two_sin(x));
    }
    Ok(acc.value())
}

/// Same sum, multiplying blocks of 16 factors before taking one logarithm.
/// Each factor lies in `[2e-14, 2]`, so a block cannot over- or underflow.
fn s_sum_fast(q: u64, alpha: f64, z_angle: f64) -> Option<f64> {
    let mut acc = CompensatedSum::new();
    let mut prod = 1.0f64;
    for k in 0..q {
        let x = frac_orbit(k as f64, alpha, z_angle);
        let d = dist_to_integers(x);
        if d < SINGULAR_GUARD {
            return None;
        }
        prod *= 2.0 * (PI * d).sin();
        if k % 16 == 15 {
            acc.add(prod.ln());
            prod = 1.0;
        }
    }
    acc.add(prod.ln());
    Some(acc.value())
}

/// Grid-scan form of the sum from precomputed `w_k = e^{2πikα}`: one
/// complex product per factor, squared moduli multiplied in blocks of 8.
/// Accurate to about `q ε / min_k |w_k z - 1|` per term, which is ample for
/// locating the maximum; values reported to callers come from the sine form.
fn s_sum_phasors(w: &[Complex64], z_angle: f64) -> Option<f64> {
    let z = Complex64::from_polar(1.0, 2.0 * PI * z_angle);
    let guard = (2.0 * PI * SINGULAR_GUARD).powi(2);
    let mut acc = CompensatedSum::new();
    let mut prod = 1.0f64;
    for (k, wk) in w.iter().enumerate() {
        let d = wk * z - 1.0;
        let n2 = d.norm_sqr();
        if n2 < guard {
            return None;
        }
        prod *= n2;
        if k % 8 == 7 {
            acc.add(prod.ln());
            prod = 1.0;
        }
    }
    acc.add(prod.ln());
    Some(0.5 * acc.value())
}

/// Maximizer and value of `φ ↦ S(q, e^{2πiφ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupResult {
    pub argmax_angle: f64,
    pub sup_value: f64,
}

/// Default grid size `max(4096, 64 q)`.
pub fn default_grid(q: u64) -> usize {
    (64 * q as usize).max(4096)
}

pub fn sup_s_sum(q: u64, alpha: f64) -> Result<SupResult> {
    sup_s_sum_with_grid(q, alpha, default_grid(q))
}

/// Grid search over `n_grid` angles, then golden-section refinement inside
/// the singularity-free bracket around the best grid point, to `1e-12`.
pub fn sup_s_sum_with_grid(q: u64, alpha: f64, n_grid: usize) -> Result<SupResult> {
    if q == 0 || n_grid < 3 {
        return Err(Error::InvalidInput("need q >= 1 and at least three grid points".into()));
    }
    let h = 1.0 / n_grid as f64;
    let w: Vec<Complex64> =
        (0..q).map(|k| Complex64::from_polar(1.0, 2.0 * PI * frac_orbit(k as f64, alpha, 0.0))).collect();
    let mut best: Option<(usize, f64)> = None;
    for j in 0..n_grid {
        if let Some(s) = s_sum_phasors(&w, j as f64 * h) {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((j, s));
            }
        }
    }
    let (jb, _) = best.ok_or(Error::SingularPoint { angle: 0.0 })?;
    let phi0 = jb as f64 * h;
    let sb = s_sum_fast(q, alpha, phi0).unwrap_or(f64::NEG_INFINITY);

    // Nearest singular angles -kα on either side of phi0.
    let (mut left, mut right) = (0.5f64, 0.5f64);
    for k in 0..q {
        let s = frac_orbit(k as f64, -alpha, 0.0);
        let mut d = s - phi0;
        d -= d.round();
        if d > 0.0 {
            right = right.min(d);
        } else {
            left = left.min(-d);
        }
    }
    let margin = 4.0 * SINGULAR_GUARD;
    let mut a = phi0 - h.min((left - margin).max(0.0));
    let mut b = phi0 + h.min((right - margin).max(0.0));
    let f = |x: f64| s_sum_fast(q, alpha, x).unwrap_or(f64::NEG_INFINITY);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > 1e-12 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = f(x1);
        }
    }
    let xm = 0.5 * (a + b);
    let fm = f(xm);
    let (arg, val) =
        [(phi0, sb), (x1, f1), (x2, f2), (xm, fm)]
            .into_iter()
            .fold((phi0, sb), |acc, c| if c.1 > acc.1 { c } else { acc });
    Ok(SupResult { argmax_angle: arg - arg.floor(), sup_value: val })
}

/// One row of a sup series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupEntry {
    pub n: usize,
    pub q: u64,
    pub sup_value: f64,
    pub argmax_angle: f64,
    /// Minimum of `sup_value` over this and all earlier rows.
    pub running_min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupSeries {
    pub entries: Vec<SupEntry>,
    pub running_min: f64,
}

/// `sup_z S(q_n, z)` for `n = 1 ..= n_max`.
pub fn liminf_track(cf: &ContinuedFraction, n_max: usize) -> Result<SupSeries> {
    liminf_track_capped(cf, n_max, Q_CAP)
}

pub fn liminf_track_capped(cf: &ContinuedFraction, n_max: usize, cap: u64) -> Result<SupSeries> {
    if n_max == 0 || cf.len() < n_max {
        return Err(Error::InvalidInput(format!("need {n_max} convergents, have {}", cf.len())));
    }
    let qn = cf.q(n_max);
    if qn.to_u64().is_none_or(|q| q > cap) {
        return Err(Error::CapExceeded { q: qn.to_string(), cap: cap.to_string() });
    }
    let mut entries = Vec::with_capacity(n_max);
    let mut running = f64::INFINITY;
    for n in 1..=n_max {
        let q = cf.q_u64(n).unwrap();
        let r = sup_s_sum(q, cf.alpha)?;
        running = running.min(r.sup_value);
        entries.push(SupEntry { n, q, sup_value: r.sup_value, argmax_angle: r.argmax_angle, running_min: running });
    }
    Ok(SupSeries { entries, running_min: running })
}

/// `sup_z S(q_n, z) / log q_{n+1}` for each row whose `q_{n+1}` is known.
pub fn growth_ratios(cf: &ContinuedFraction, series: &SupSeries) -> Vec<(usize, f64)> {
    series
        .entries
        .iter()
        .filter(|e| e.n + 1 < cf.convergents.len())
        .map(|e| (e.n, e.sup_value / ln_big(cf.q(e.n + 1))))
        .collect()
}

/// Indices whose sup lies within `slack` of the series minimum, intersected
/// with `parity`.
pub fn select_subsequence(series: &SupSeries, parity: &[usize], slack: f64) -> Vec<usize> {
    series
        .entries
        .iter()
        .filter(|e| e.sup_value <= series.running_min + slack && parity.contains(&e.n))
        .map(|e| e.n)
        .collect()
}

/// Finite Fourier series `Σ_k ĉ_k e^{2πikx}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    pub coeffs: Vec<(i64, Complex64)>,
}

impl TrigPoly {
    pub fn new(coeffs: Vec<(i64, Complex64)>) -> Self {
        TrigPoly { coeffs }
    }

    /// `Σ_k a_k cos(2πkx)` as a real trigonometric polynomial.
    pub fn cosine(a: &[(i64, f64)]) -> Self {
        let mut coeffs = Vec::new();
        for &(k, ak) in a {
            if k == 0 {
                coeffs.push((0, Complex64::new(ak, 0.0)));
            } else {
                coeffs.push((k, Complex64::new(ak / 2.0, 0.0)));
                coeffs.push((-k, Complex64::new(ak / 2.0, 0.0)));
            }
        }
        TrigPoly { coeffs }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.coeffs.iter().map(|&(k, c)| c * Complex64::from_polar(1.0, 2.0 * PI * k as f64 * x)).sum()
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs.iter().filter(|c| c.0 == k).map(|c| c.1).sum()
    }

    /// `Σ_k |k| |ĉ_k|`.
    pub fn weighted_l1(&self) -> f64 {
        self.coeffs.iter().map(|&(k, c)| k.unsigned_abs() as f64 * c.norm()).sum()
    }
}

/// `f(x) = g(x) Π_j (e^{2πix} - e^{2πix_j})^{m_j}` with `g` zero-free.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleFunctionSpec {
    pub zeros: Vec<(f64, u32)>,
    pub zero_free_part: TrigPoly,
    pub mean_log: f64,
}

/// Trapezoid nodes for `∫ log|g|`.
pub const MEAN_LOG_POINTS: usize = 1 << 16;

impl CircleFunctionSpec {
    /// Each zero factor has `∫ log|e^{2πix} - e^{2πix_j}| = 0`, so only the
    /// zero-free part is integrated, by the trapezoid rule.
    pub fn new(zeros: Vec<(f64, u32)>, g: TrigPoly) -> Result<Self> {
        let n = MEAN_LOG_POINTS;
        let mut acc = CompensatedSum::new();
        let mut min_abs = f64::INFINITY;
        for j in 0..n {
            let a = g.eval(j as f64 / n as f64).norm();
            min_abs = min_abs.min(a);
            acc.add(a.ln());
        }
        if !(min_abs > 0.0) {
            return Err(Error::InvalidInput("zero-free part vanishes on the circle".into()));
        }
        let mean_log = acc.value() / n as f64;
        if !mean_log.is_finite() {
            return Err(Error::InvalidInput("mean of log|f| is not finite".into()));
        }
        Ok(CircleFunctionSpec { zeros, zero_free_part: g, mean_log })
    }

    /// `log|f(x)|`, or `None` within the guard radius of a zero.
    pub fn log_abs(&self, x: f64) -> Option<f64> {
        let mut s = self.zero_free_part.eval(x).norm().ln();
        for &(xj, m) in &self.zeros {
            let d = x - xj;
            if dist_to_integers(d) < SINGULAR_GUARD {
                return None;
            }
            s += m as f64 * log_two_sin(d);
        }
        Some(s)
    }

    /// Harmonic constant `8 Σ_k |k| |ĥ_k|` of `h = log|g|`, with the Fourier
    /// coefficients of `h` computed on the trapezoid grid.
    pub fn harmonic_constant(&self) -> f64 {
        let n = 4096usize;
        let vals: Vec<f64> = (0..n).map(|j| self.zero_free_part.eval(j as f64 / n as f64).norm().ln()).collect();
        let mut total = 0.0;
        for k in 1..(n / 2) {
            let mut c = Complex64::new(0.0, 0.0);
            let step = Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64);
            let mut w = Complex64::new(1.0, 0.0);
            for &v in &vals {
                c += w * v;
                w *= step;
            }
            let ck = c.norm() / n as f64;
            total += 2.0 * k as f64 * ck;
            if ck < 1e-17 && k > 8 {
                break;
            }
        }
        8.0 * total
    }
}

/// Largest fraction of skipped orbit points tolerated by
/// [`ergodic_upper_bound`].
pub const MAX_SKIP_FRACTION: f64 = 0.01;

/// Irrational grid shift used to dodge zeros of `f`.
const GRID_SHIFT: f64 = 0.414_213_562_373_095_05;

/// For each convergent index `n`, the worst-case scaled Birkhoff deviation
/// `D = max_x [Σ_{j<q_n} log|f(x + jα)| - q_n ∫ log|f|]` over a shifted grid.
pub fn ergodic_upper_bound(
    f: &CircleFunctionSpec,
    cf: &ContinuedFraction,
    indices: &[usize],
    x_grid: usize,
) -> Result<Vec<f64>> {
    if x_grid < 1000 {
        return Err(Error::InvalidInput("x_grid must be at least 1000".into()));
    }
    indices
        .iter()
        .map(|&n| {
            let q =
                cf.q_u64(n).ok_or_else(|| Error::CapExceeded { q: cf.q(n).to_string(), cap: u64::MAX.to_string() })?;
            ergodic_deviation(f, cf.alpha, q, x_grid)
        })
        .collect()
}

/// Worst-case deviation along orbits of length `q`.
pub fn ergodic_deviation(f: &CircleFunctionSpec, alpha: f64, q: u64, x_grid: usize) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    let mut skipped = 0usize;
    for i in 0..x_grid {
        let x = (i as f64 + GRID_SHIFT) / x_grid as f64;
        let mut acc = CompensatedSum::new();
        let mut ok = true;
        for j in 0..q {
            match f.log_abs(frac_orbit(j as f64, alpha, x)) {
                Some(v) => acc.add(v),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            worst = worst.max(acc.value() - q as f64 * f.mean_log);
        } else {
            skipped += 1;
        }
    }
    if skipped as f64 > MAX_SKIP_FRACTION * x_grid as f64 {
        return Err(Error::SingularPoint { angle: f64::NAN });
    }
    Ok(worst)
}

/// `|(1/q_n) Σ_{j<q_n} h(x + jα) - ĥ_0|` for a real trigonometric polynomial.
pub fn harmonic_average_error(h: &TrigPoly, cf: &ContinuedFraction, x: f64, n: usize) -> Result<f64> {
    let q = cf.q_u64(n).ok_or_else(|| Error::CapExceeded { q: cf.q(n).to_string(), cap: u64::MAX.to_string() })?;
    let mut acc = CompensatedSum::new();
    for j in 0..q {
        acc.add(h.eval(frac_orbit(j as f64, cf.alpha, x)).re);
    }
    Ok((acc.value() / q as f64 - h.coeff(0).re).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contfrac::{expand, Alpha};

    #[test]
    fn q_one_gives_log_two() {
        let s = s_sum(1, 0.3, 0.5).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-15);
        let r = sup_s_sum(1, 0.3).unwrap();
        assert!((r.sup_value - 2f64.ln()).abs() < 1e-12);
        assert!((r.argmax_angle - 0.5).abs() < 1e-6);
    }

    #[test]
    fn singular_point_detected() {
        assert!(matches!(s_sum(3, 0.25, 0.75), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn naive_loop_golden_13() {
        let a = Alpha::golden().to_f64();
        let naive: f64 = (0..13)
            .map(|k| {
                let w = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 * a + 0.5));
                (w - 1.0).norm().ln()
            })
            .sum();
        assert!((s_sum(13, a, 0.5).unwrap() - naive).abs() < 1e-10);
    }

    #[test]
    fn fast_sum_matches() {
        let a = Alpha::golden().to_f64();
        for q in [1u64, 15, 16, 17, 89, 233] {
            let x = 0.377;
            assert!((s_sum(q, a, x).unwrap() - s_sum_fast(q, a, x).unwrap()).abs() < 1e-11);
        }
    }

    #[test]
    fn golden_liminf() {
        let cf = expand(&Alpha::golden(), 12).unwrap();
        let s = liminf_track(&cf, 10).unwrap();
        assert_eq!(s.entries.len(), 10);
        assert_eq!(s.entries[9].q, 89);
        assert!(s.running_min < 3.0);
        let one = liminf_track(&cf, 1).unwrap();
        assert_eq!(one.running_min, one.entries[0].sup_value);
    }

    #[test]
    fn cap_exceeded() {
        let cf = expand(&Alpha::golden(), 40).unwrap();
        assert!(matches!(liminf_track_capped(&cf, 40, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn harmonic_constant_closed_form() {
        let f = CircleFunctionSpec::new(vec![], TrigPoly::cosine(&[(0, 2.0), (1, 1.0)])).unwrap();
        let r = 2.0 - 3f64.sqrt();
        assert!((f.harmonic_constant() - 16.0 * r / (1.0 - r)).abs() < 1e-10);
        assert!((f.mean_log - ((2.0 + 3f64.sqrt()) / 2.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn constant_function_has_zero_deviation() {
        let cf = expand(&Alpha::golden(), 10).unwrap();
        let f = CircleFunctionSpec::new(vec![], TrigPoly::cosine(&[(0, 3.0)])).unwrap();
        let d = ergodic_upper_bound(&f, &cf, &[1, 2, 5, 8], 1000).unwrap();
        assert!(d.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn harmonic_error_geometric_sum() {
        let cf = expand(&Alpha::golden(), 8).unwrap();
        for k in [1i64, 2] {
            let h = TrigPoly::cosine(&[(k, 1.0)]);
            let q = cf.q_u64(5).unwrap();
            let r = Complex64::from_polar(1.0, 2.0 * PI * k as f64 * cf.alpha);
            let exact = ((Complex64::new(1.0, 0.0) - r.powu(q as u32)) / (Complex64::new(1.0, 0.0) - r)).re / q as f64;
            let got = harmonic_average_error(&h, &cf, 0.0, 5).unwrap();
            assert!((got - exact.abs()).abs() < 1e-13);
            assert!(got <= 8.0 * h.weighted_l1() / q as f64);
        }
        let one = TrigPoly::cosine(&[(0, 1.0)]);
        assert_eq!(harmonic_average_error(&one, &cf, 0.3, 4).unwrap(), 0.0);
    }
}
