//! Jacobi and transfer cocycles, Lyapunov exponents, the complexified
//! Lyapunov exponent `L(E; ε)`, its acceleration, and the fibered rotation
//! number.
//!
//! The Jacobi cocycle is `A(z) = [[E - v(z), -c̃(z - α)], [c(z), 0]]` at
//! `z = θ + iε`, with `c̃(z) = conj(c(conj z))`. The complexified exponent is
//! `L(E; ε) = L(α, A_ε) - ∫ log|c|`; the subtracted integral does not depend
//! on `ε`.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{c_zeros, mean_log_c, Coupling};
use crate::util::{frac_orbit, ls_slope, mean_std, phase_lattice, CompensatedSum};

pub type Mat2 = [[Complex64; 2]; 2];

/// Which 2×2 cocycle to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `[[E - v, -c̃(z - α)], [c, 0]]`.
    JacobiA,
    /// `A / c`, the transfer matrix of the eigenvalue equation.
    TransferB,
    /// `[[E - v, -|c|(z - α)], [|c|(z), 0]] / sqrt(|c|(z) |c|(z - α))` with
    /// `|c|(z) = sqrt(c̃(z) c(z))`; real and unimodular at `ε = 0`.
    NormalizedSharp,
    /// `[[E, -c̃(z - α)], [c, 0]] / c`, the cocycle of the zero-diagonal
    /// operator. Pass the coupling whose `c` is the hopping.
    ZeroNnBtilde,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::JacobiA => "jacobi_A",
            Variant::TransferB => "transfer_B",
            Variant::NormalizedSharp => "normalized_sharp",
            Variant::ZeroNnBtilde => "zero_nn_Btilde",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CocycleSpec {
    pub coupling: Coupling,
    pub alpha: f64,
    pub energy: f64,
    pub epsilon: f64,
    pub variant: Variant,
}

/// Guard on `|c|` along orbits for the variants that divide by it.
pub const ORBIT_GUARD: f64 = 1e-12;

fn v_at(z: Complex64) -> Complex64 {
    2.0 * (2.0 * PI * z).cos()
}

/// The variant's matrix at `θ + iε`.
pub fn step_matrix(spec: &CocycleSpec, theta: f64) -> Result<Mat2> {
    let z = Complex64::new(theta, spec.epsilon);
    let lam = &spec.coupling;
    let a = spec.alpha;
    let e = Complex64::new(spec.energy, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let c = lam.c_at(a, z);
    let ct_prev = lam.c_tilde_at(a, z - a);
    let guard = |x: Complex64| {
        if x.norm() < ORBIT_GUARD {
            Err(Error::SingularOrbitPoint { phase: theta })
        } else {
            Ok(())
        }
    };
    Ok(match spec.variant {
        Variant::JacobiA => [[e - v_at(z), -ct_prev], [c, zero]],
        Variant::TransferB => {
            guard(c)?;
            [[(e - v_at(z)) / c, -ct_prev / c], [Complex64::new(1.0, 0.0), zero]]
        }
        Variant::NormalizedSharp => {
            let m_here = (lam.c_tilde_at(a, z) * c).sqrt();
            let m_prev = (ct_prev * lam.c_at(a, z - a)).sqrt();
            guard(m_here)?;
            guard(m_prev)?;
            let s = (m_here * m_prev).sqrt();
            [[(e - v_at(z)) / s, -m_prev / s], [m_here / s, zero]]
        }
        Variant::ZeroNnBtilde => {
            guard(c)?;
            [[e / c, -ct_prev / c], [Complex64::new(1.0, 0.0), zero]]
        }
    })
}

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn det(m: &Mat2) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Operator 2-norm of a complex 2×2 matrix.
pub fn op_norm(m: &Mat2) -> f64 {
    let fro2: f64 = m.iter().flatten().map(|x| x.norm_sqr()).sum();
    let d = det(m).norm();
    let disc = (fro2 * fro2 - 4.0 * d * d).max(0.0).sqrt();
    ((fro2 + disc) / 2.0).sqrt()
}

/// Renormalization period for matrix products.
pub const RENORM_PERIOD: usize = 32;

/// Mean over phases, across-phase standard deviation, and per-phase values.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovEstimate {
    pub mean: f64,
    pub std: f64,
    pub per_phase: Vec<f64>,
}

/// Number of times a phase is shifted when its orbit meets a zero of `c`.
pub const MAX_RESAMPLE: usize = 8;

fn product_growth(spec: &CocycleSpec, theta: f64, n_iter: usize) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut m: Mat2 = [[one, zero], [zero, one]];
    let mut acc = CompensatedSum::new();
    for k in 0..n_iter {
        let th = frac_orbit(k as f64, spec.alpha, theta);
        m = mat_mul(&step_matrix(spec, th)?, &m);
        if (k + 1) % RENORM_PERIOD == 0 {
            let s = m.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
            if s == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            acc.add(s.ln());
            for x in m.iter_mut().flatten() {
                *x /= s;
            }
        }
    }
    acc.add(op_norm(&m).ln());
    Ok(acc.value() / n_iter as f64)
}

/// `(1/n) log‖D(θ + (n-1)α) ⋯ D(θ)‖` averaged over `n_phases` lattice
/// phases. A phase whose orbit meets a zero of `c` is shifted and retried.
pub fn lyapunov(spec: &CocycleSpec, n_iter: usize, n_phases: usize, seed: u64) -> Result<LyapunovEstimate> {
    if n_iter < 1000 {
        return Err(Error::InvalidInput("n_iter must be at least 1000".into()));
    }
    if n_phases == 0 {
        return Err(Error::InvalidInput("need at least one phase".into()));
    }
    let phases = phase_lattice(n_phases, seed);
    let per_phase: Vec<f64> = phases
        .par_iter()
        .map(|&th0| {
            let mut th = th0;
            let mut last = Error::SingularOrbitPoint { phase: th0 };
            for attempt in 0..=MAX_RESAMPLE {
                match product_growth(spec, th, n_iter) {
                    Ok(v) => return Ok(v),
                    Err(e @ Error::SingularOrbitPoint { .. }) => {
                        last = e;
                        th = frac_orbit((attempt + 1) as f64, 1e-3 * 0.618_033_988_749_894_9, th0);
                    }
                    Err(e) => return Err(e),
                }
            }
            Err(last)
        })
        .collect::<Result<_>>()?;
    let (mean, std) = mean_std(&per_phase);
    Ok(LyapunovEstimate { mean, std, per_phase })
}

const LANES: usize = 8;

/// Per-`ε` constants and state of the scalar recurrence, `LANES` values of
/// `ε` at a time so the inner loop vectorizes.
#[derive(Clone, Copy, Default)]
struct Chunk {
    cv: [f64; LANES],
    sv: [f64; LANES],
    g1c: [f64; LANES],
    g1s: [f64; LANES],
    g2c: [f64; LANES],
    g2s: [f64; LANES],
    ur: [f64; LANES],
    ui: [f64; LANES],
    wr: [f64; LANES],
    wi: [f64; LANES],
    ex: [i64; LANES],
}

impl Chunk {
    #[inline(always)]
    #[allow(clippy::too_many_arguments)]
    fn step(&mut self, energy: f64, g0: f64, pr: f64, pi: f64, qr: f64, qi: f64, q2r: f64, q2i: f64) {
        for j in 0..LANES {
            let ar = energy - self.cv[j] * pr;
            let ai = -self.sv[j] * pi;
            let gr = g0 + self.g1c[j] * qr + self.g2c[j] * q2r;
            let gi = self.g1s[j] * qi + self.g2s[j] * q2i;
            let (xr, xi, yr, yi) = (self.ur[j], self.ui[j], self.wr[j], self.wi[j]);
            self.ur[j] = ar * xr - ai * xi - (gr * yr - gi * yi);
            self.ui[j] = ar * xi + ai * xr - (gr * yi + gi * yr);
            self.wr[j] = xr;
            self.wi[j] = xi;
        }
    }

    fn rescale(&mut self) {
        for j in 0..LANES {
            let s = self.ur[j].abs().max(self.ui[j].abs()).max(self.wr[j].abs()).max(self.wi[j].abs());
            if s.is_normal() {
                // s = 2^e * m with 1 <= m < 2; multiply by 2^-e exactly.
                let e = ((s.to_bits() >> 52) & 0x7ff) as i32 - 1023;
                let f = f64::from_bits(((1023 - e) as u64) << 52);
                self.ur[j] *= f;
                self.ui[j] *= f;
                self.wr[j] *= f;
                self.wi[j] *= f;
                self.ex[j] += e as i64;
            }
        }
    }
}

/// Log growth rates of the Jacobi cocycle at one starting phase, for every
/// `ε` in `eps`, in a single pass over the orbit.
///
/// With `u_{k+1} = a_k u_k - g_{k-1} u_{k-1}`, `a_k = E - v(z_k)` and
/// `g(z) = c̃(z) c(z)`, the pair `(u_k, c(z_{k-1}) u_{k-1})` is the Jacobi
/// cocycle applied to `e₁`, so `(1/n) log|u_n|` converges to `L(α, A_ε)`.
/// Scaling is by exact powers of two every few steps.
pub fn jacobi_growth_multi(
    lam: &Coupling,
    alpha: f64,
    energy: f64,
    eps: &[f64],
    theta: f64,
    n_iter: usize,
) -> Vec<f64> {
    let m = eps.len();
    let g0 = lam.l1 * lam.l1 + lam.l2 * lam.l2 + lam.l3 * lam.l3;
    let g1 = lam.l2 * (lam.l1 + lam.l3);
    let g2 = lam.l1 * lam.l3;
    let mut chunks = vec![Chunk::default(); m.div_ceil(LANES)];
    for (i, &e) in eps.iter().enumerate() {
        let c = &mut chunks[i / LANES];
        let j = i % LANES;
        let s = (-2.0 * PI * e).exp();
        let (c1, s1) = (s + 1.0 / s, s - 1.0 / s);
        let (c2, s2) = (s * s + 1.0 / (s * s), s * s - 1.0 / (s * s));
        c.cv[j] = c1;
        c.sv[j] = s1;
        c.g1c[j] = g1 * c1;
        c.g1s[j] = g1 * s1;
        c.g2c[j] = g2 * c2;
        c.g2s[j] = g2 * s2;
    }
    for c in chunks.iter_mut() {
        c.ur = [1.0; LANES];
    }
    // Bound on one step's growth, to choose a safe renormalization period.
    let emax = eps.iter().fold(0.0f64, |a, &e| a.max(e.abs()));
    let bound = 1.0 + energy.abs() + 2.0 * (2.0 * PI * emax).cosh() + g0 + 2.0 * (g1 + g2) * (4.0 * PI * emax).cosh();
    let period = ((600.0 / bound.ln().max(1e-3)) as usize).clamp(1, RENORM_PERIOD);

    let rot = Complex64::from_polar(1.0, 2.0 * PI * alpha);
    let rot2 = rot * rot;
    let resync = 256usize;
    let phasors = |k: usize| {
        let t = frac_orbit(k as f64, alpha, theta);
        let p = Complex64::from_polar(1.0, 2.0 * PI * t);
        let q = Complex64::from_polar(1.0, 2.0 * PI * (t - alpha / 2.0));
        (p, q, q * q)
    };
    let (mut p, mut q, mut q2) = phasors(0);
    for k in 0..n_iter {
        if k % resync == 0 && k > 0 {
            (p, q, q2) = phasors(k);
        }
        for c in chunks.iter_mut() {
            c.step(energy, g0, p.re, p.im, q.re, q.im, q2.re, q2.im);
        }
        if (k + 1) % period == 0 {
            for c in chunks.iter_mut() {
                c.rescale();
            }
        }
        p *= rot;
        q *= rot;
        q2 *= rot2;
    }
    (0..m)
        .map(|i| {
            let c = &chunks[i / LANES];
            let j = i % LANES;
            let nrm = (c.ur[j] * c.ur[j] + c.ui[j] * c.ui[j] + c.wr[j] * c.wr[j] + c.wi[j] * c.wi[j]).sqrt();
            (nrm.ln() + c.ex[j] as f64 * std::f64::consts::LN_2) / n_iter as f64
        })
        .collect()
}

/// Sampled `ε ↦ L(E; ε)` with sliding-window slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovProfile {
    pub energy: f64,
    pub eps_grid: Vec<f64>,
    pub l_values: Vec<f64>,
    /// Across-phase standard deviation at each grid point.
    pub sigma: Vec<f64>,
    /// `slopes[i]`: least-squares slope over `eps_grid[i..i + 5]`, divided
    /// by 2π; `NaN` where the window runs off the grid.
    pub slopes: Vec<f64>,
}

/// Points per slope window.
pub const SLOPE_WINDOW: usize = 5;

impl LyapunovProfile {
    fn from_values(energy: f64, eps_grid: Vec<f64>, l_values: Vec<f64>, sigma: Vec<f64>) -> Self {
        let n = eps_grid.len();
        let slopes = (0..n)
            .map(|i| {
                if i + SLOPE_WINDOW <= n {
                    ls_slope(&eps_grid[i..i + SLOPE_WINDOW], &l_values[i..i + SLOPE_WINDOW]) / (2.0 * PI)
                } else {
                    f64::NAN
                }
            })
            .collect();
        LyapunovProfile { energy, eps_grid, l_values, sigma, slopes }
    }

    /// Slopes of windows lying entirely inside the grid.
    pub fn interior_slopes(&self) -> Vec<f64> {
        self.slopes.iter().copied().filter(|s| s.is_finite()).collect()
    }

    fn index_of(&self, eps: f64) -> Option<usize> {
        let h = self.eps_grid.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        self.eps_grid.iter().position(|&e| (e - eps).abs() <= 1e-9 * (1.0 + h))
    }

    /// Worst violation of evenness, relative to its tolerance (`<= 1` passes).
    pub fn evenness_ratio(&self, sigma_factor: f64, floor: f64) -> f64 {
        let mut worst = 0.0f64;
        for (i, &e) in self.eps_grid.iter().enumerate() {
            if let Some(j) = self.index_of(-e) {
                let tol = sigma_factor * self.sigma[i].max(self.sigma[j]) + floor;
                worst = worst.max((self.l_values[i] - self.l_values[j]).abs() / tol);
            }
        }
        worst
    }

    /// Worst violation of discrete convexity, relative to its tolerance.
    pub fn convexity_ratio(&self, sigma_factor: f64, floor: f64) -> f64 {
        let mut worst = 0.0f64;
        for i in 1..self.eps_grid.len().saturating_sub(1) {
            let (h1, h2) = (self.eps_grid[i] - self.eps_grid[i - 1], self.eps_grid[i + 1] - self.eps_grid[i]);
            let (l0, l1, l2) = (self.l_values[i - 1], self.l_values[i], self.l_values[i + 1]);
            // Second difference scaled to the value L would need to move to restore convexity.
            let d2 = (h1 * l2 + h2 * l0) / (h1 + h2) - l1;
            let tol = sigma_factor * self.sigma[i - 1].max(self.sigma[i]).max(self.sigma[i + 1]) + floor;
            worst = worst.max(-d2 / tol);
        }
        worst
    }

    pub fn min_value(&self) -> f64 {
        self.l_values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Default `ε` grid: 81 points on `[-1, 1]`.
pub fn default_eps_grid() -> Vec<f64> {
    (0..81).map(|i| -1.0 + 0.025 * i as f64).collect()
}

/// `L(E; ε)` on `eps_grid` by the scalar-recurrence kernel, phases shared
/// across `ε`.
pub fn complexified_le(
    coupling: &Coupling,
    alpha: f64,
    energy: f64,
    eps_grid: &[f64],
    n_iter: usize,
    n_phases: usize,
) -> Result<LyapunovProfile> {
    complexified_le_seeded(coupling, alpha, energy, eps_grid, n_iter, n_phases, 0)
}

pub fn complexified_le_seeded(
    coupling: &Coupling,
    alpha: f64,
    energy: f64,
    eps_grid: &[f64],
    n_iter: usize,
    n_phases: usize,
    seed: u64,
) -> Result<LyapunovProfile> {
    if n_iter < 1000 || n_phases == 0 {
        return Err(Error::InvalidInput("need n_iter >= 1000 and at least one phase".into()));
    }
    if eps_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("eps grid must be strictly increasing".into()));
    }
    let sym = eps_grid.iter().zip(eps_grid.iter().rev()).all(|(a, b)| (a + b).abs() < 1e-9);
    if !sym {
        return Err(Error::InvalidInput("eps grid must be symmetric about 0".into()));
    }
    let phases = phase_lattice(n_phases, seed);
    let rows: Vec<Vec<f64>> =
        phases.par_iter().map(|&th| jacobi_growth_multi(coupling, alpha, energy, eps_grid, th, n_iter)).collect();
    let i_c = mean_log_c(coupling);
    let mut l_values = Vec::with_capacity(eps_grid.len());
    let mut sigma = Vec::with_capacity(eps_grid.len());
    for j in 0..eps_grid.len() {
        let col: Vec<f64> = rows.iter().map(|r| r[j]).collect();
        let (m, s) = mean_std(&col);
        l_values.push(m - i_c);
        sigma.push(s);
    }
    Ok(LyapunovProfile::from_values(energy, eps_grid.to_vec(), l_values, sigma))
}

/// Right slope at a grid point, its nearest half-integer, and the residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Acceleration {
    pub raw_slope: f64,
    pub quantized: f64,
    pub residual: f64,
}

pub fn quantize_half(x: f64) -> (f64, f64) {
    let q = (2.0 * x).round() / 2.0;
    (q, (x - q).abs())
}

pub fn acceleration(profile: &LyapunovProfile, at_eps: f64) -> Result<Acceleration> {
    let i = profile.index_of(at_eps).ok_or_else(|| Error::InsufficientGrid(format!("{at_eps} is not a grid point")))?;
    if i == 0 || !profile.slopes[i].is_finite() {
        return Err(Error::InsufficientGrid(format!("need an interior point with {SLOPE_WINDOW} points to its right")));
    }
    let raw = profile.slopes[i];
    let (q, r) = quantize_half(raw);
    Ok(Acceleration { raw_slope: raw, quantized: q, residual: r })
}

/// Verdict of the acceleration test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumVerdict {
    Inside,
    Outside,
    Undecided,
}

impl SpectrumVerdict {
    pub fn name(self) -> &'static str {
        match self {
            SpectrumVerdict::Inside => "inside",
            SpectrumVerdict::Outside => "outside",
            SpectrumVerdict::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumBudget {
    pub n_iter: usize,
    pub n_phases: usize,
    pub eps_step: f64,
    /// `L(E)` above this is treated as positive.
    pub threshold_pos: f64,
}

impl Default for SpectrumBudget {
    fn default() -> Self {
        SpectrumBudget { n_iter: 20_000, n_phases: 16, eps_step: 0.025, threshold_pos: 0.05 }
    }
}

/// Result of [`spectrum_test`] together with the quantities it used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumTest {
    pub verdict: SpectrumVerdict,
    pub l_at_zero: f64,
    pub omega: Option<Acceleration>,
}

/// Margin around 1/4 inside which the right slope is not decisive.
pub const SLOPE_MARGIN: f64 = 0.1;

/// With `L(E) > 0`, `E` is in the spectrum iff `ω(E; 0⁺) > 0`.
pub fn spectrum_test(coupling: &Coupling, alpha: f64, energy: f64, budget: &SpectrumBudget) -> Result<SpectrumTest> {
    let h = budget.eps_step;
    let grid: Vec<f64> = (-(SLOPE_WINDOW as i64)..=SLOPE_WINDOW as i64).map(|i| i as f64 * h).collect();
    let prof = complexified_le(coupling, alpha, energy, &grid, budget.n_iter, budget.n_phases)?;
    let l0 = prof.l_values[SLOPE_WINDOW];
    if l0 <= budget.threshold_pos {
        return Ok(SpectrumTest { verdict: SpectrumVerdict::Undecided, l_at_zero: l0, omega: None });
    }
    let acc = acceleration(&prof, 0.0)?;
    let verdict = if acc.raw_slope < 0.25 - SLOPE_MARGIN {
        SpectrumVerdict::Outside
    } else if acc.raw_slope >= 0.25 + SLOPE_MARGIN {
        SpectrumVerdict::Inside
    } else {
        SpectrumVerdict::Undecided
    };
    Ok(SpectrumTest { verdict, l_at_zero: l0, omega: Some(acc) })
}

/// Fibered rotation number and a drift estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationNumber {
    /// In `[0, 1/2]`: `1/2` below the spectrum, `0` above it.
    pub rho: f64,
    /// `|ρ(n) - ρ(n/2)|`.
    pub drift: f64,
}

/// Map from the integrated density of states to this rotation number.
pub fn rho_from_ids(n: f64) -> f64 {
    (1.0 - n) / 2.0
}

/// Inverse of [`rho_from_ids`].
pub fn ids_from_rho(rho: f64) -> f64 {
    1.0 - 2.0 * rho
}

/// Rotation number of the normalized real cocycle at `ε = 0`.
///
/// The matrix `[[a, -b'], [b, 0]]` with `b, b' > 0` maps a direction at
/// angle `φ` to one at `ψ` with `ψ - φ ∈ (-π/2, 3π/2)`, which fixes the
/// continuous lift of each step.
pub fn rotation_number(coupling: &Coupling, alpha: f64, energy: f64, n_iter: usize) -> Result<RotationNumber> {
    if !c_zeros(coupling, alpha).is_empty() {
        return Err(Error::SingularModel);
    }
    if n_iter < 2 {
        return Err(Error::InvalidInput("n_iter must be at least 2".into()));
    }
    let theta0 = crate::util::PHASE_OFFSET;
    let mut phi = 0.0f64;
    let mut total = CompensatedSum::new();
    let mut half = 0.0;
    let two_pi = 2.0 * PI;
    for k in 0..n_iter {
        let th = frac_orbit(k as f64, alpha, theta0);
        let a = energy - Coupling::v(th);
        let b = coupling.c(alpha, th).norm();
        let bp = coupling.c(alpha, th - alpha).norm();
        if b < ORBIT_GUARD || bp < ORBIT_GUARD {
            return Err(Error::SingularOrbitPoint { phase: th });
        }
        let (x, y) = (phi.cos(), phi.sin());
        let psi = (b * x).atan2(a * x - bp * y);
        let d = (psi - phi + PI / 2.0).rem_euclid(two_pi) - PI / 2.0;
        total.add(d);
        phi = psi;
        if k + 1 == n_iter / 2 {
            half = total.value() / (two_pi * (n_iter / 2) as f64);
        }
    }
    let rho = total.value() / (two_pi * n_iter as f64);
    Ok(RotationNumber { rho, drift: (rho - half).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: f64 = 0.618_033_988_749_894_9;

    fn spec(l: (f64, f64, f64), e: f64, eps: f64, variant: Variant, alpha: f64) -> CocycleSpec {
        CocycleSpec { coupling: Coupling::new(l.0, l.1, l.2).unwrap(), alpha, energy: e, epsilon: eps, variant }
    }

    #[test]
    fn amo_step() {
        let s = spec((0.0, 1.0, 0.0), 0.7, 0.0, Variant::JacobiA, G);
        let m = step_matrix(&s, 0.2).unwrap();
        let want = [[0.7 - 2.0 * (0.4 * PI).cos(), -1.0], [1.0, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j] - Complex64::new(want[i][j], 0.0)).norm() < 1e-14);
            }
        }
        let n = step_matrix(&CocycleSpec { variant: Variant::NormalizedSharp, ..s }, 0.2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j] - n[i][j]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn isotropic_step_hand_expanded() {
        // λ = (1,1,1), θ = 0, α = 0, E = 0: c(0) = 3, c̃(0) = 3, v(0) = 2.
        let s = spec((1.0, 1.0, 1.0), 0.0, 0.0, Variant::JacobiA, 0.0);
        let m = step_matrix(&s, 0.0).unwrap();
        assert!((m[0][0] - Complex64::new(-2.0, 0.0)).norm() < 1e-14);
        assert!((m[0][1] - Complex64::new(-3.0, 0.0)).norm() < 1e-14);
        assert!((m[1][0] - Complex64::new(3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn normalized_sharp_unimodular() {
        for (k, eps) in [0.0, 0.1, -0.2].into_iter().enumerate() {
            let s = spec((0.7, 1.3, 0.2), 0.4, eps, Variant::NormalizedSharp, G);
            let m = step_matrix(&s, 0.1 + 0.2 * k as f64).unwrap();
            assert!((det(&m) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn kernel_matches_matrix_product() {
        let lam = Coupling::new(2.0, 1.0, 0.5).unwrap();
        for &(e, eps) in &[(0.3, 0.0), (0.3, 0.2), (-1.0, -0.35)] {
            let s = CocycleSpec { coupling: lam, alpha: G, energy: e, epsilon: eps, variant: Variant::JacobiA };
            let th = 0.271;
            let slow = product_growth(&s, th, 4000).unwrap();
            let fast = jacobi_growth_multi(&lam, G, e, &[eps], th, 4000)[0];
            assert!((slow - fast).abs() < 5e-3, "{slow} vs {fast}");
        }
    }

    #[test]
    fn off_spectrum_uniform() {
        let lam = Coupling::new(0.3, 1.0, 0.4).unwrap();
        let e = 2.0 + 2.0 * lam.c_sup() + 10.0;
        let s = CocycleSpec { coupling: lam, alpha: G, energy: e, epsilon: 0.0, variant: Variant::JacobiA };
        let est = lyapunov(&s, 2000, 16, 0).unwrap();
        assert!(est.mean > 0.0);
        assert!(est.per_phase.iter().all(|x| (x - est.mean).abs() <= 3.0 * est.std + 1e-12));
    }

    #[test]
    fn rotation_endpoints() {
        let lam = Coupling::new(0.0, 1.0, 0.0).unwrap();
        let lo = rotation_number(&lam, G, -10.0, 20_000).unwrap();
        let hi = rotation_number(&lam, G, 10.0, 20_000).unwrap();
        assert!((lo.rho - 0.5).abs() < 1e-3);
        assert!(hi.rho.abs() < 1e-3);
        let sing = Coupling::new(0.5, 1.0, 0.5).unwrap();
        assert_eq!(rotation_number(&sing, G, 0.0, 100), Err(Error::SingularModel));
    }

    #[test]
    fn half_integer_rounding() {
        assert_eq!(quantize_half(0.97), (1.0, 0.030000000000000027));
        assert_eq!(quantize_half(0.24).0, 0.0);
        assert_eq!(quantize_half(0.26).0, 0.5);
    }
}
