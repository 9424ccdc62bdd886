//! Determinant sequences, boundary Fourier coefficients of the trace
//! function `Ψ⁽ⁿ⁾`, a DFT oracle for them, and the normalized lower-bound
//! series along convergent denominators.
//!
//! All operations take the original coupling `λ` and apply the duality map
//! internally, so `Ψ` always refers to the dual coupling `μ = σ(λ)`.
//!
//! `Ψ⁽ⁿ⁾(x) = tr(M_{n-1}(x) ⋯ M_0(x)) - 2cos(2πnθ) Π_j c_μ(x + jα)` with
//! `M_j = [[E' - v(x_j), -conj c_μ(x_{j-1})], [c_μ(x_j), 0]]`,
//! `x_j = x + jα` and `E' = E/λ₂`. For `λ₂ = 0` the dual operator has no
//! potential and `E' = E`. The factor `Π c_μ` is the complex product, which
//! keeps `Ψ⁽ⁿ⁾` a trigonometric polynomial of degree `n`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::contfrac::{parity_subsequence, ContinuedFraction, Parity};
use crate::error::{Error, Result};
use crate::esproducts::{ergodic_deviation, CircleFunctionSpec, TrigPoly};
use crate::model::{classify, duality, is_alpha_rational, lambda_pm, mean_log_c, Coupling, SNAP_TOL};
use crate::util::{dist_to_integers, frac_orbit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `t_n = t_{n-1} - γ t_{n-2}`.
    T,
    /// `s_n = -p s_{n-2}` with `p = λ₁λ₃`.
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Recursion,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminantSequence {
    /// `γ` for the `t` family, `λ₁λ₃` for the `s` family.
    pub gamma: f64,
    pub values: Vec<f64>,
    pub family: Family,
}

impl DeterminantSequence {
    /// Value at `n`, with `x_{-1} = 0` and `x_{-2} = 0`.
    pub fn at(&self, n: i64) -> f64 {
        if n < 0 {
            0.0
        } else {
            self.values[n as usize]
        }
    }
}

/// `|γ - 1/4|` below which the double-root branch is used.
pub const DOUBLE_ROOT_TOL: f64 = 1e-12;

pub fn det_sequence(gamma: f64, n_max: usize, family: Family, method: Method) -> DeterminantSequence {
    let values = match (family, method) {
        (Family::T, Method::Recursion) => {
            let mut v = Vec::with_capacity(n_max + 1);
            let (mut a, mut b) = (0.0f64, 1.0f64);
            v.push(1.0);
            for _ in 1..=n_max {
                let t = b - gamma * a;
                a = b;
                b = t;
                v.push(t);
            }
            v
        }
        (Family::T, Method::ClosedForm) => {
            if (gamma - 0.25).abs() < DOUBLE_ROOT_TOL {
                (0..=n_max).map(|n| (n + 1) as f64 * 0.5f64.powi(n as i32)).collect()
            } else {
                let (lp, lm) = lambda_pm(gamma);
                (0..=n_max)
                    .map(|n| {
                        let k = n as i32 + 1;
                        ((lp.powi(k) - lm.powi(k)) / (lp - lm)).re
                    })
                    .collect()
            }
        }
        (Family::S, Method::Recursion) => {
            let mut v = Vec::with_capacity(n_max + 1);
            for n in 0..=n_max {
                v.push(match n {
                    0 => 1.0,
                    1 => 0.0,
                    _ => -gamma * v[n - 2],
                });
            }
            v
        }
        (Family::S, Method::ClosedForm) => {
            (0..=n_max).map(|n| if n % 2 == 1 { 0.0 } else { (-gamma).powi((n / 2) as i32) }).collect()
        }
    };
    DeterminantSequence { gamma, values, family }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Couplings admitted by the closed forms: the self-dual regime, or the
/// `λ₂ = 0` axis with `λ₁ + λ₃ >= 1`.
pub fn check_domain(lambda: &Coupling) -> Result<()> {
    let label = classify(lambda, SNAP_TOL)?;
    if label.in_self_dual || (lambda.l2 == 0.0 && lambda.l1 + lambda.l3 >= 1.0 - SNAP_TOL) {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!("{} is outside the self-dual regime", label.region.name())))
    }
}

/// `Ψ̂⁽ⁿ⁾(±n)` in closed form.
pub fn boundary_coeff_closed(lambda: &Coupling, alpha: f64, theta: f64, n: usize, sign: Sign) -> Result<Complex64> {
    check_domain(lambda)?;
    if n < 2 {
        return Err(Error::InvalidInput("n must be at least 2".into()));
    }
    Ok(boundary_coeff_unchecked(lambda, alpha, theta, n, sign))
}

fn boundary_coeff_unchecked(lambda: &Coupling, alpha: f64, theta: f64, n: usize, sign: Sign) -> Complex64 {
    let s = sign.as_f64();
    let nf = n as f64;
    let phase = |x: f64| Complex64::from_polar(1.0, s * PI * alpha * x);
    let cos_term = 2.0 * (2.0 * PI * nf * theta).cos();
    if lambda.l2 == 0.0 {
        let p = lambda.l1 * lambda.l3;
        let seq = det_sequence(p, n, Family::S, Method::ClosedForm);
        let phi = phase(nf * (nf - 1.0)) * (seq.at(n as i64) - p * seq.at(n as i64 - 2));
        let outer = match sign {
            Sign::Plus => lambda.l1,
            Sign::Minus => lambda.l3,
        };
        phi - cos_term * outer.powi(n as i32) * phase(nf * nf)
    } else {
        let g = crate::model::gamma(lambda);
        let seq = det_sequence(g, n, Family::T, Method::ClosedForm);
        let par = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        let phi = par * phase(nf * (nf - 1.0)) * (seq.at(n as i64) - g * seq.at(n as i64 - 2));
        let outer = match sign {
            Sign::Plus => lambda.l1 / lambda.l2,
            Sign::Minus => lambda.l3 / lambda.l2,
        };
        phi - cos_term * outer.powi(n as i32) * phase(nf * nf)
    }
}

/// Finite search horizon for the α-rationality screen on `θ`.
pub const RATIONALITY_HORIZON: u64 = 10_000;
pub const RATIONALITY_TOL: f64 = 1e-9;

fn screen_theta(theta: f64, alpha: f64) -> Result<()> {
    let chk = is_alpha_rational(theta, alpha, RATIONALITY_HORIZON, RATIONALITY_TOL);
    match chk.witness {
        Some(w) if chk.found => Err(Error::AlphaRationalTheta { witness: w }),
        _ => Ok(()),
    }
}

/// Minimum distance from orbit points to zeros of `c_μ` accepted by the
/// oracle.
pub const ORACLE_ZERO_GUARD: f64 = 1e-10;

/// `Ψ⁽ⁿ⁾(x)` on the real line by direct matrix product.
pub fn psi_value(lambda: &Coupling, alpha: f64, theta: f64, energy: f64, n: usize, x: f64) -> Complex64 {
    psi_scaled(lambda, alpha, theta, energy, n, Complex64::new(x, 0.0), 1.0)
}

/// `Ψ⁽ⁿ⁾(z) · scale⁻ⁿ` at complex `z`, with every factor divided by
/// `scale` before multiplying.
fn psi_scaled(lambda: &Coupling, alpha: f64, theta: f64, energy: f64, n: usize, z: Complex64, scale: f64) -> Complex64 {
    let mu = duality(lambda);
    let (e, with_v) = if lambda.l2 == 0.0 { (energy, false) } else { (energy / lambda.l2, true) };
    let inv = 1.0 / scale;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut m = [[one, zero], [zero, one]];
    let mut d = one;
    let orbit = |j: f64| Complex64::new(frac_orbit(j, alpha, z.re), z.im);
    let mut c_prev = mu.c_tilde_at(alpha, orbit(-1.0)) * inv;
    for j in 0..n {
        let zj = orbit(j as f64);
        let cj = mu.c_at(alpha, zj) * inv;
        let v = if with_v { 2.0 * (2.0 * PI * zj).cos() } else { zero };
        let a = (e - v) * inv;
        let b = -c_prev;
        m = [[a * m[0][0] + b * m[1][0], a * m[0][1] + b * m[1][1]], [cj * m[0][0], cj * m[0][1]]];
        d *= cj;
        c_prev = mu.c_tilde_at(alpha, zj) * inv;
    }
    m[0][0] + m[1][1] - 2.0 * (2.0 * PI * n as f64 * theta).cos() * d
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCoefficients {
    pub plus: Complex64,
    pub minus: Complex64,
    /// Largest `|Ψ̂(k)| e^{2π(|k| - n)ε₀}` over `n < |k| <= 2n`, read off
    /// the same contours; zero up to rounding for a degree-`n` polynomial.
    pub out_of_band: f64,
}

/// Distance `ε₀` of the sampling contours from the real line.
pub const ORACLE_CONTOUR: f64 = 1.5;

/// Extracts `Ψ̂⁽ⁿ⁾(±n)` from `grid_size` samples of `Ψ⁽ⁿ⁾` on the lines
/// `Im z = ∓ε₀`, where the `±n` mode dominates. With each factor scaled by
/// `e^{-2πε₀}`, the discrete transform at `±n` returns `Ψ̂(±n)` directly.
pub fn boundary_coeff_oracle(
    lambda: &Coupling,
    alpha: f64,
    theta: f64,
    energy: f64,
    n: usize,
    grid_size: usize,
) -> Result<OracleCoefficients> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if grid_size < 4 * n + 1 {
        return Err(Error::InsufficientGrid(format!("grid of {grid_size} points needs at least {}", 4 * n + 1)));
    }
    screen_theta(theta, alpha)?;
    let mu = duality(lambda);
    let zeros = crate::model::c_zeros(&mu, alpha);
    for i in 0..grid_size {
        let x = i as f64 / grid_size as f64;
        for j in 0..n {
            let xj = frac_orbit(j as f64, alpha, x);
            if zeros.iter().any(|&(z, _)| dist_to_integers(xj - z) < ORACLE_ZERO_GUARD) {
                return Err(Error::SingularOrbitPoint { phase: xj });
            }
        }
    }
    let scale = (2.0 * PI * ORACLE_CONTOUR).exp();
    let nn = n as i64;
    let side = |im: f64, top: i64| -> (Complex64, f64) {
        let samples: Vec<Complex64> = (0..grid_size)
            .into_par_iter()
            .map(|i| {
                psi_scaled(lambda, alpha, theta, energy, n, Complex64::new(i as f64 / grid_size as f64, im), scale)
            })
            .collect();
        let coeff = |k: i64| -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &s) in samples.iter().enumerate() {
                let t = ((k * i as i64).rem_euclid(grid_size as i64)) as f64 / grid_size as f64;
                acc += s * Complex64::from_polar(1.0, -2.0 * PI * t);
            }
            acc / grid_size as f64
        };
        let sgn = top.signum();
        let oob = ((nn + 1)..=(2 * nn)).map(|k| coeff(sgn * k).norm()).fold(0.0, f64::max);
        (coeff(top), oob)
    };
    let (plus, oob_p) = side(-ORACLE_CONTOUR, nn);
    let (minus, oob_m) = side(ORACLE_CONTOUR, -nn);
    Ok(OracleCoefficients { plus, minus, out_of_band: oob_p.max(oob_m) })
}

/// `‖Ψ⁽ⁿ⁾‖₁` by the midpoint rule on `grid_size` nodes.
pub fn psi_l1_norm(lambda: &Coupling, alpha: f64, theta: f64, energy: f64, n: usize, grid_size: usize) -> f64 {
    let total: f64 = (0..grid_size)
        .into_par_iter()
        .map(|i| psi_value(lambda, alpha, theta, energy, n, (i as f64 + 0.5) / grid_size as f64).norm())
        .sum();
    total / grid_size as f64
}

/// `log|c_λ|` as a circle function: zeros on the circle factored out, the
/// rest kept as a zero-free trigonometric polynomial.
pub fn log_c_circle_function(lambda: &Coupling, alpha: f64) -> Result<CircleFunctionSpec> {
    // |c(x)| = |λ₃w² + λ₂w + λ₁| with w = e^{2πi(x + α/2)}.
    let Coupling { l1, l2, l3 } = *lambda;
    let (lead, roots): (f64, Vec<Complex64>) = if l3 > 0.0 {
        let disc = Complex64::new(l2 * l2 - 4.0 * l1 * l3, 0.0).sqrt();
        (l3, vec![(-l2 + disc) / (2.0 * l3), (-l2 - disc) / (2.0 * l3)])
    } else if l2 > 0.0 {
        (l2, vec![Complex64::new(-l1 / l2, 0.0)])
    } else {
        (l1, vec![])
    };
    let mut zeros: Vec<(f64, u32)> = Vec::new();
    let mut poly = vec![Complex64::new(lead, 0.0)];
    for r in roots {
        if (r.norm() - 1.0).abs() < 1e-9 {
            let z = r.arg() / (2.0 * PI) - alpha / 2.0;
            let z = z - z.floor();
            match zeros.iter_mut().find(|(y, _)| dist_to_integers(y - z) < 1e-9) {
                Some(e) => e.1 += 1,
                None => zeros.push((z, 1)),
            }
        } else {
            // Multiply by (w - r); poly[k] is the w^k coefficient.
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (k, &a) in poly.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            poly = next;
        }
    }
    let coeffs = poly
        .iter()
        .enumerate()
        .map(|(k, &a)| (k as i64, a * Complex64::from_polar(1.0, PI * alpha * k as f64)))
        .collect();
    CircleFunctionSpec::new(zeros, TrigPoly::new(coeffs))
}

/// One entry of the boundary-coefficient series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEntry {
    pub level: usize,
    /// Convergent index `n_l`.
    pub cf_index: usize,
    /// `m = k q_{n_l}` with `k ∈ {1, 2, 3}`.
    pub multiple: u64,
    pub m: u64,
    pub coeff: Complex64,
    /// `e^{-m I(σ(λ))} |Ψ̂⁽ᵐ⁾(±m)|`.
    pub normalized: f64,
    /// `e^{D_m} 2π‖mα‖`, with `D_m` the worst-case Birkhoff deviation of
    /// `log|c_σ(λ)|` along orbits of length `m`.
    pub upper_proxy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCoefficientSeries {
    pub coupling: Coupling,
    pub alpha: f64,
    pub theta: f64,
    pub sign: Sign,
    pub parity: Parity,
    /// `I(σ(λ))`.
    pub i_dual: f64,
    pub entries: Vec<BoundaryEntry>,
    /// `max_l` of the normalized values.
    pub max_normalized: f64,
    pub positive: bool,
}

impl BoundaryCoefficientSeries {
    /// Entries with `m = q_{n_l}`, one per level.
    pub fn base_entries(&self) -> Vec<&BoundaryEntry> {
        self.entries.iter().filter(|e| e.multiple == 1).collect()
    }

    /// Largest normalized value within each level's `{q, 2q, 3q}` triple.
    pub fn level_maxima(&self) -> Vec<f64> {
        let levels = self.entries.iter().map(|e| e.level).max().map_or(0, |l| l + 1);
        let mut out = vec![0.0f64; levels];
        for e in &self.entries {
            out[e.level] = out[e.level].max(e.normalized);
        }
        out
    }
}

pub const POSITIVITY_THRESHOLD: f64 = 1e-3;

/// Grid used for the Birkhoff deviation in the upper proxy.
pub const PROXY_GRID: usize = 1000;

/// Normalized boundary coefficients along `(q_{n_l}) ∪ (2q_{n_l}) ∪
/// (3q_{n_l})` for the first `levels` indices of the parity subsequence with
/// `q >= 2`. The `-m` coefficient is used when `λ₃ > λ₁`.
pub fn limsup_lower_bound_test(
    lambda: &Coupling,
    cf: &ContinuedFraction,
    theta: f64,
    levels: usize,
) -> Result<BoundaryCoefficientSeries> {
    check_domain(lambda)?;
    let alpha = cf.alpha;
    screen_theta(theta, alpha)?;
    let par = parity_subsequence(cf)?;
    let idx: Vec<usize> =
        par.indices.iter().copied().filter(|&n| cf.q_u64(n).is_some_and(|q| q >= 2)).take(levels).collect();
    if idx.len() < levels {
        return Err(Error::InvalidInput(format!("only {} usable levels in the expansion", idx.len())));
    }
    let sign = if lambda.l3 > lambda.l1 { Sign::Minus } else { Sign::Plus };
    let mu = duality(lambda);
    let i_dual = mean_log_c(&mu);
    let f = log_c_circle_function(&mu, alpha)?;
    let mut jobs = Vec::new();
    for (l, &n) in idx.iter().enumerate() {
        let q = cf.q_u64(n).unwrap();
        for k in 1..=3u64 {
            jobs.push((l, n, k, q * k));
        }
    }
    let entries = jobs
        .par_iter()
        .map(|&(level, cf_index, multiple, m)| {
            let coeff = boundary_coeff_unchecked(lambda, alpha, theta, m as usize, sign);
            let normalized = (coeff.norm().ln() - m as f64 * i_dual).exp();
            let dev = ergodic_deviation(&f, alpha, m, PROXY_GRID)?;
            let upper_proxy = dev.exp() * 2.0 * PI * dist_to_integers(m as f64 * alpha);
            Ok(BoundaryEntry { level, cf_index, multiple, m, coeff, normalized, upper_proxy })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_normalized = entries.iter().map(|e| e.normalized).fold(0.0, f64::max);
    Ok(BoundaryCoefficientSeries {
        coupling: *lambda,
        alpha,
        theta,
        sign,
        parity: par.label,
        i_dual,
        entries,
        max_normalized,
        positive: max_normalized > POSITIVITY_THRESHOLD,
    })
}
