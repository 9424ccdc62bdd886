//! Finite truncations of the operator, their eigenvalues, characteristic
//! polynomials, the density of states, and two consistency checks built on
//! it: invariance under duality and agreement with the rotation number.
//!
//! Truncations use Dirichlet boundary conditions. The Hermitian window is
//! unitarily equivalent to the real symmetric one with off-diagonals `|c|`,
//! which is what the eigensolver works with.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::cocycles::{rho_from_ids, rotation_number};
use crate::error::{Error, Result};
use crate::model::{duality, Coupling};
use crate::util::{frac_orbit, phase_lattice};

/// Off-diagonals below this modulus split the window into blocks.
pub const SPLIT_TOL: f64 = 1e-14;

/// `Π_{[0,n-1]} H_θ Π_{[0,n-1]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperatorWindow {
    pub n: usize,
    pub diagonal: Vec<f64>,
    /// `offdiag[k] = c(θ + kα)`, the entry `(k, k+1)`.
    pub offdiag: Vec<Complex64>,
    pub theta: f64,
    pub alpha: f64,
    pub coupling: Coupling,
    /// Indices `k` with `|offdiag[k]| < SPLIT_TOL`.
    pub splits: Vec<usize>,
}

impl TridiagonalOperatorWindow {
    /// Off-diagonals of the unitarily equivalent real symmetric matrix.
    pub fn symmetrized_offdiag(&self) -> Vec<f64> {
        self.offdiag.iter().map(|c| c.norm()).collect()
    }

    /// Maximal index ranges `[start, end)` not broken by a split.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for &k in &self.splits {
            out.push((start, k + 1));
            start = k + 1;
        }
        out.push((start, self.n));
        out
    }
}

pub fn truncate(coupling: &Coupling, alpha: f64, theta: f64, n: usize) -> Result<TridiagonalOperatorWindow> {
    truncate_with(coupling, alpha, theta, n, true)
}

/// As [`truncate`]; with `with_potential = false` the diagonal is zero.
pub fn truncate_with(
    coupling: &Coupling,
    alpha: f64,
    theta: f64,
    n: usize,
    with_potential: bool,
) -> Result<TridiagonalOperatorWindow> {
    if n == 0 {
        return Err(Error::InvalidInput("window size must be positive".into()));
    }
    let diagonal =
        (0..n).map(|k| if with_potential { Coupling::v(frac_orbit(k as f64, alpha, theta)) } else { 0.0 }).collect();
    let offdiag: Vec<Complex64> =
        (0..n.saturating_sub(1)).map(|k| coupling.c(alpha, frac_orbit(k as f64, alpha, theta))).collect();
    let splits = offdiag.iter().enumerate().filter(|(_, c)| c.norm() < SPLIT_TOL).map(|(k, _)| k).collect();
    Ok(TridiagonalOperatorWindow { n, diagonal, offdiag, theta, alpha, coupling: *coupling, splits })
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix
/// `(a, b)`.
pub fn sturm_count(a: &[f64], b: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0f64;
    for i in 0..a.len() {
        let b2 = if i == 0 { 0.0 } else { b[i - 1] * b[i - 1] };
        d = (a[i] - x) - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (1.0 + x.abs());
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..a.len() {
        let r = if i > 0 { b[i - 1].abs() } else { 0.0 } + if i + 1 < a.len() { b[i].abs() } else { 0.0 };
        lo = lo.min(a[i] - r);
        hi = hi.max(a[i] + r);
    }
    (lo, hi)
}

/// Eigenvalues of a symmetric tridiagonal matrix by Sturm bisection.
pub fn tridiagonal_eigenvalues(a: &[f64], b: &[f64], tol: f64) -> Vec<f64> {
    let n = a.len();
    let (glo, ghi) = gershgorin(a, b);
    let (glo, ghi) = (glo - tol, ghi + tol);
    let mut out = Vec::with_capacity(n);
    let mut lo_prev = glo;
    for k in 0..n {
        // Smallest x with count(x) > k, bracketed in [lo, hi].
        let (mut lo, mut hi) = (lo_prev, ghi);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(a, b, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let ev = 0.5 * (lo + hi);
        out.push(ev);
        lo_prev = lo;
    }
    out
}

/// All eigenvalues of the window to absolute accuracy `tol`, sorted.
pub fn eigenvalues(window: &TridiagonalOperatorWindow, tol: f64) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let b = window.symmetrized_offdiag();
    let mut out = Vec::with_capacity(window.n);
    for (s, e) in window.blocks() {
        let bb = if e - s > 1 { &b[s..e - 1] } else { &b[0..0] };
        out.extend(tridiagonal_eigenvalues(&window.diagonal[s..e], bb, tol));
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// `det(E - window)` as `(sign, log|P|)`, by the three-term recursion with
/// the running magnitude factored out. `n = 0` gives `(1, 0)`; `n = -1`
/// gives sign `0`.
pub fn char_poly_log(coupling: &Coupling, alpha: f64, theta: f64, n: i64, energy: f64) -> (f64, f64) {
    if n < 0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let (mut pm2, mut pm1) = (0.0f64, 1.0f64);
    let mut log_scale = 0.0f64;
    for k in 1..=n {
        let x1 = frac_orbit((k - 1) as f64, alpha, theta);
        let c2 = if k >= 2 { coupling.c(alpha, frac_orbit((k - 2) as f64, alpha, theta)).norm_sqr() } else { 0.0 };
        let p = (energy - Coupling::v(x1)) * pm1 - c2 * pm2;
        pm2 = pm1;
        pm1 = p;
        let s = pm1.abs().max(pm2.abs());
        if s > 1e100 || (s < 1e-100 && s > 0.0) {
            pm1 /= s;
            pm2 /= s;
            log_scale += s.ln();
        }
    }
    if pm1 == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    (pm1.signum(), pm1.abs().ln() + log_scale)
}

/// `det(E - window)`; may overflow to infinity for large windows.
pub fn char_poly(coupling: &Coupling, alpha: f64, theta: f64, n: i64, energy: f64) -> f64 {
    let (s, l) = char_poly_log(coupling, alpha, theta, n, energy);
    if s == 0.0 {
        0.0
    } else {
        s * l.exp()
    }
}

/// Pooled eigenvalues over phases with histogram and counting function.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSample {
    /// Phase values, in the order of `per_phase`.
    pub phases: Vec<f64>,
    /// Sorted eigenvalues of each phase's window.
    pub per_phase: Vec<Vec<f64>>,
    /// All eigenvalues, sorted.
    pub eigenvalues: Vec<f64>,
    /// `(bin_lo, bin_hi, mass)`.
    pub histogram: Vec<(f64, f64, f64)>,
}

impl SpectralSample {
    /// Fraction of pooled eigenvalues `<= E`.
    pub fn ids(&self, energy: f64) -> f64 {
        let k = self.eigenvalues.partition_point(|&x| x <= energy);
        k as f64 / self.eigenvalues.len() as f64
    }

    pub fn total_mass(&self) -> f64 {
        self.histogram.iter().map(|h| h.2).sum()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

/// Eigenvalue accuracy used for density-of-states samples.
pub const DOS_TOL: f64 = 1e-10;

pub fn density_of_states(
    coupling: &Coupling,
    alpha: f64,
    n: usize,
    n_phases: usize,
    bins: usize,
) -> Result<SpectralSample> {
    density_of_states_with(coupling, alpha, n, n_phases, bins, true)
}

/// As [`density_of_states`], optionally for the zero-diagonal operator.
pub fn density_of_states_with(
    coupling: &Coupling,
    alpha: f64,
    n: usize,
    n_phases: usize,
    bins: usize,
    with_potential: bool,
) -> Result<SpectralSample> {
    if n == 0 || n_phases == 0 || bins == 0 {
        return Err(Error::InvalidInput("need positive size, phase count and bin count".into()));
    }
    let phases = phase_lattice(n_phases, 0);
    let per_phase: Vec<Vec<f64>> = phases
        .par_iter()
        .map(|&th| truncate_with(coupling, alpha, th, n, with_potential).and_then(|w| eigenvalues(&w, DOS_TOL)))
        .collect::<Result<_>>()?;
    let mut eigenvalues: Vec<f64> = per_phase.iter().flatten().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let (lo, hi) = (eigenvalues[0], *eigenvalues.last().unwrap());
    let width = (hi - lo).max(1e-12) * (1.0 + 1e-12);
    let h = width / bins as f64;
    let mut counts = vec![0usize; bins];
    for &e in &eigenvalues {
        let b = (((e - lo) / h) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let total = eigenvalues.len() as f64;
    let histogram = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| (lo + i as f64 * h, lo + (i + 1) as f64 * h, c as f64 / total))
        .collect();
    Ok(SpectralSample { phases, per_phase, eigenvalues, histogram })
}

/// `max_E |N_λ(E) - N_σ(λ)(E/λ₂)|` over `probes`. For `λ₂ = 0` the dual
/// side is the zero-diagonal operator with hopping `c_σ(λ)` and no energy
/// rescaling.
pub fn duality_dos_check(coupling: &Coupling, alpha: f64, n: usize, n_phases: usize, probes: &[f64]) -> Result<f64> {
    let dual = duality(coupling);
    let direct = density_of_states(coupling, alpha, n, n_phases, 64)?;
    let (other, scale) = if coupling.l2 > 0.0 {
        (density_of_states(&dual, alpha, n, n_phases, 64)?, 1.0 / coupling.l2)
    } else {
        (density_of_states_with(&dual, alpha, n, n_phases, 64, false)?, 1.0)
    };
    Ok(probes.iter().map(|&e| (direct.ids(e) - other.ids(e * scale)).abs()).fold(0.0, f64::max))
}

/// Residuals `|ρ(E) - (1 - N(E))/2|` on `e_grid`, with `N` from a
/// 64-phase sample of size `n` and `ρ` from the normalized cocycle.
pub fn ids_rotation_consistency(
    coupling: &Coupling,
    alpha: f64,
    e_grid: &[f64],
    n: usize,
    n_iter: usize,
) -> Result<Vec<f64>> {
    if !crate::model::c_zeros(coupling, alpha).is_empty() {
        return Err(Error::SingularModel);
    }
    let sample = density_of_states(coupling, alpha, n, 64, 64)?;
    e_grid
        .par_iter()
        .map(|&e| {
            let r = rotation_number(coupling, alpha, e, n_iter)?;
            Ok((r.rho - rho_from_ids(sample.ids(e))).abs())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: f64 = 0.618_033_988_749_894_9;

    #[test]
    fn small_known_spectra() {
        let e = tridiagonal_eigenvalues(&[0.0, 0.0], &[1.0], 1e-12);
        assert!((e[0] + 1.0).abs() < 1e-11 && (e[1] - 1.0).abs() < 1e-11);
        let e = tridiagonal_eigenvalues(&[0.0; 3], &[1.0, 1.0], 1e-12);
        let r2 = 2f64.sqrt();
        assert!((e[0] + r2).abs() < 1e-11 && e[1].abs() < 1e-11 && (e[2] - r2).abs() < 1e-11);
    }

    #[test]
    fn one_by_one_window() {
        let lam = Coupling::new(0.3, 1.0, 0.2).unwrap();
        let w = truncate(&lam, G, 0.1, 1).unwrap();
        assert_eq!(w.diagonal.len(), 1);
        assert!(w.offdiag.is_empty());
        let ev = eigenvalues(&w, 1e-12).unwrap();
        assert!((ev[0] - Coupling::v(0.1)).abs() < 1e-11);
    }

    #[test]
    fn amo_offdiagonals_are_one() {
        let w = truncate(&Coupling::new(0.0, 1.0, 0.0).unwrap(), G, 0.3, 10).unwrap();
        assert!(w.offdiag.iter().all(|c| (c - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn zero_offdiagonal_splits() {
        // c vanishes at θ + α/2 = 1/2 for (0.5, 1, 0.5); put the orbit point k = 3 there.
        let lam = Coupling::new(0.5, 1.0, 0.5).unwrap();
        let theta = 0.5 - G / 2.0 - 3.0 * G;
        let w = truncate(&lam, G, theta, 8).unwrap();
        assert_eq!(w.splits, vec![3]);
        assert_eq!(w.blocks(), vec![(0, 4), (4, 8)]);
        assert_eq!(eigenvalues(&w, 1e-12).unwrap().len(), 8);
    }

    #[test]
    fn char_poly_base_cases() {
        let lam = Coupling::new(0.3, 1.0, 0.2).unwrap();
        assert_eq!(char_poly(&lam, G, 0.2, 0, 0.7), 1.0);
        assert_eq!(char_poly(&lam, G, 0.2, -1, 0.7), 0.0);
        assert!((char_poly(&lam, G, 0.2, 1, 0.7) - (0.7 - Coupling::v(0.2))).abs() < 1e-14);
    }

    #[test]
    fn dos_mass_and_endpoints() {
        let s = density_of_states(&Coupling::new(0.0, 1.0, 0.0).unwrap(), G, 64, 16, 32).unwrap();
        assert!((s.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(s.ids(s.min() - 1.0), 0.0);
        assert_eq!(s.ids(s.max() + 1.0), 1.0);
    }
}
