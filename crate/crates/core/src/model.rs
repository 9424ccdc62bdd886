//! Coupling-space geometry of the extended Harper's model.
//!
//! The operator is
//! `(H u)_n = c(θ+nα) u_{n+1} + conj(c(θ+(n-1)α)) u_{n-1} + v(θ+nα) u_n`
//! with `c(θ) = λ₁ e^{-2πi(θ+α/2)} + λ₂ + λ₃ e^{2πi(θ+α/2)}` and
//! `v(θ) = 2 cos 2πθ`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::util::{dist_to_integers, frac_orbit, CompensatedSum};

/// Coupling triple `(λ₁, λ₂, λ₃)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
}

impl Coupling {
    pub fn new(l1: f64, l2: f64, l3: f64) -> Result<Self> {
        let all_finite = l1.is_finite() && l2.is_finite() && l3.is_finite();
        if !all_finite || l1 < 0.0 || l2 < 0.0 || l3 < 0.0 {
            return Err(Error::InvalidCoupling(format!("({l1}, {l2}, {l3}) must be finite and non-negative")));
        }
        if l1 == 0.0 && l2 == 0.0 && l3 == 0.0 {
            return Err(Error::InvalidCoupling("all couplings vanish".into()));
        }
        Ok(Coupling { l1, l2, l3 })
    }

    /// Builds without validation; for literals known to be valid.
    pub const fn from_triple(l1: f64, l2: f64, l3: f64) -> Self {
        Coupling { l1, l2, l3 }
    }

    /// The same coupling with `λ₁` and `λ₃` exchanged; `c` of the result is
    /// `c̃`.
    pub fn swapped(&self) -> Self {
        Coupling { l1: self.l3, l2: self.l2, l3: self.l1 }
    }

    pub fn is_isotropic(&self, tol: f64) -> bool {
        (self.l1 - self.l3).abs() <= tol
    }

    /// `c` at a complex argument `z = θ + iε`.
    #[inline]
    pub fn c_at(&self, alpha: f64, z: Complex64) -> Complex64 {
        let w = (Complex64::i() * 2.0 * PI * (z + alpha / 2.0)).exp();
        self.l1 / w + self.l2 + self.l3 * w
    }

    /// `c̃(z) = conj(c(conj z))`.
    #[inline]
    pub fn c_tilde_at(&self, alpha: f64, z: Complex64) -> Complex64 {
        self.swapped().c_at(alpha, z)
    }

    #[inline]
    pub fn c(&self, alpha: f64, theta: f64) -> Complex64 {
        self.c_at(alpha, Complex64::new(theta, 0.0))
    }

    #[inline]
    pub fn v(theta: f64) -> f64 {
        2.0 * (2.0 * PI * theta).cos()
    }

    /// `max |c|` on the circle.
    pub fn c_sup(&self) -> f64 {
        self.l1 + self.l2 + self.l3
    }
}

/// `(c(θ), v(θ))`.
pub fn sampling_functions(lambda: &Coupling, alpha: f64, theta: f64) -> (Complex64, f64) {
    (lambda.c(alpha, theta), Coupling::v(theta))
}

/// Region of coupling space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    IInterior,
    IIInterior,
    IIIInterior,
    LI,
    LII,
    LIII,
    AxisSub,
    AxisSuper,
    BoundaryOther,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::IInterior => "I_interior",
            Region::IIInterior => "II_interior",
            Region::IIIInterior => "III_interior",
            Region::LI => "L_I",
            Region::LII => "L_II",
            Region::LIII => "L_III",
            Region::AxisSub => "axis_sub",
            Region::AxisSuper => "axis_super",
            Region::BoundaryOther => "boundary_other",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionLabel {
    pub region: Region,
    pub in_self_dual: bool,
    pub nnn_isotropic: bool,
}

/// Default boundary snap tolerance.
pub const SNAP_TOL: f64 = 1e-12;

/// Region label. Points within `tol` of a boundary segment get the segment;
/// the corner `λ₁+λ₃ = λ₂ = 1` is reported as `L_II`.
pub fn classify(lambda: &Coupling, tol: f64) -> Result<RegionLabel> {
    let Coupling { l1, l2, l3 } = *lambda;
    if l1 == 0.0 && l2 == 0.0 && l3 == 0.0 {
        return Err(Error::InvalidCoupling("all couplings vanish".into()));
    }
    let s = l1 + l3;
    let eq = |a: f64, b: f64| (a - b).abs() <= tol;
    let region = if eq(l2, 0.0) {
        Region::BoundaryOther
    } else if eq(s, 0.0) {
        if eq(l2, 1.0) {
            Region::LII
        } else if l2 < 1.0 {
            Region::AxisSuper
        } else {
            Region::AxisSub
        }
    } else if eq(l2, 1.0) && (s < 1.0 || eq(s, 1.0)) {
        Region::LII
    } else if eq(s, 1.0) && l2 < 1.0 {
        Region::LI
    } else if eq(s, l2) && l2 > 1.0 {
        Region::LIII
    } else if s < 1.0 && l2 < 1.0 {
        Region::IInterior
    } else if s < l2 && l2 > 1.0 {
        Region::IIInterior
    } else {
        Region::IIIInterior
    };
    let in_self_dual = matches!(region, Region::IIIInterior | Region::LI | Region::LII | Region::LIII);
    Ok(RegionLabel { region, in_self_dual, nnn_isotropic: lambda.is_isotropic(tol) })
}

/// Duality map `σ(λ) = (λ₃, 1, λ₁)/λ₂`, and `σ(λ₁, 0, λ₃) = (λ₃, 1, λ₁)`.
pub fn duality(lambda: &Coupling) -> Coupling {
    if lambda.l2 == 0.0 {
        Coupling { l1: lambda.l3, l2: 1.0, l3: lambda.l1 }
    } else {
        Coupling { l1: lambda.l3 / lambda.l2, l2: 1.0 / lambda.l2, l3: lambda.l1 / lambda.l2 }
    }
}

/// Zeros of `c` on the circle as `(θ, multiplicity)`, sorted by angle.
pub fn c_zeros(lambda: &Coupling, alpha: f64) -> Vec<(f64, u32)> {
    let Coupling { l1, l2, l3 } = *lambda;
    let tol = SNAP_TOL * (1.0 + l1 + l2 + l3);
    let wrap = |x: f64| x - x.floor();
    let mut out = Vec::new();
    if (l1 - l3).abs() <= tol {
        if l3 > 0.0 && 2.0 * l3 >= l2 - tol {
            // 2 λ₃ cos(2π(θ + α/2)) = -λ₂
            let r = (-l2 / (2.0 * l3)).clamp(-1.0, 1.0);
            let phi = r.acos() / (2.0 * PI);
            if (2.0 * l3 - l2).abs() <= tol {
                out.push((wrap(0.5 - alpha / 2.0), 2));
            } else {
                out.push((wrap(phi - alpha / 2.0), 1));
                out.push((wrap(-phi - alpha / 2.0), 1));
            }
        }
    } else if (l1 + l3 - l2).abs() <= tol {
        out.push((wrap(0.5 - alpha / 2.0), 1));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Result of a finite search for `n` with `nα + 2θ ∈ Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaRationalCheck {
    pub found: bool,
    pub witness: Option<i64>,
}

/// Searches `|n| <= n_max` for `dist(nα + 2θ, Z) < tol`, in the order
/// `0, 1, -1, 2, -2, ...`. A negative answer only covers the horizon.
pub fn is_alpha_rational(theta: f64, alpha: f64, n_max: u64, tol: f64) -> AlphaRationalCheck {
    let two_theta = 2.0 * theta;
    for k in 0..=n_max as i64 {
        for n in if k == 0 { vec![0] } else { vec![k, -k] } {
            let x = frac_orbit(n as f64, alpha, two_theta);
            if dist_to_integers(x) < tol {
                return AlphaRationalCheck { found: true, witness: Some(n) };
            }
        }
    }
    AlphaRationalCheck { found: false, witness: None }
}

/// Expected spectral class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criticality {
    Supercritical,
    Subcritical,
    Critical,
    Axis,
}

impl Criticality {
    pub fn name(self) -> &'static str {
        match self {
            Criticality::Supercritical => "supercritical",
            Criticality::Subcritical => "subcritical",
            Criticality::Critical => "critical",
            Criticality::Axis => "axis",
        }
    }
}

pub fn criticality(lambda: &Coupling) -> Result<Criticality> {
    let label = classify(lambda, SNAP_TOL)?;
    Ok(match label.region {
        Region::IInterior | Region::AxisSuper => Criticality::Supercritical,
        Region::IIInterior | Region::AxisSub => Criticality::Subcritical,
        Region::IIIInterior if label.nnn_isotropic => Criticality::Critical,
        Region::IIIInterior => Criticality::Subcritical,
        Region::LI | Region::LII | Region::LIII => Criticality::Critical,
        Region::BoundaryOther => Criticality::Axis,
    })
}

/// `γ = λ₁λ₃/λ₂²`.
pub fn gamma(lambda: &Coupling) -> f64 {
    lambda.l1 * lambda.l3 / (lambda.l2 * lambda.l2)
}

/// Roots `λ± = (1 ± sqrt(1 - 4γ))/2` of `x² - x + γ`, complex when `γ > 1/4`.
pub fn lambda_pm(gamma: f64) -> (Complex64, Complex64) {
    let s = Complex64::new(1.0 - 4.0 * gamma, 0.0).sqrt();
    ((1.0 + s) / 2.0, (1.0 - s) / 2.0)
}

/// `∫ log|c|` for any coupling, by Jensen's formula applied to
/// `λ₃ w² + λ₂ w + λ₁`.
pub fn mean_log_c(lambda: &Coupling) -> f64 {
    let Coupling { l1, l2, l3 } = *lambda;
    if l3 > 0.0 {
        let disc = Complex64::new(l2 * l2 - 4.0 * l1 * l3, 0.0).sqrt();
        let r1 = (-l2 + disc) / (2.0 * l3);
        let r2 = (-l2 - disc) / (2.0 * l3);
        l3.ln() + r1.norm().ln().max(0.0) + r2.norm().ln().max(0.0)
    } else if l2 > 0.0 {
        l2.max(l1).ln()
    } else {
        l1.ln()
    }
}

/// Closed form of `∫ log|c|` on the self-dual regime.
pub fn i_closed(lambda: &Coupling) -> Result<f64> {
    let label = classify(lambda, SNAP_TOL)?;
    let Coupling { l1, l3, .. } = *lambda;
    match label.region {
        Region::LII => {
            if l1 == 0.0 || l3 == 0.0 {
                Ok(0.0)
            } else {
                let p = l1 * l3;
                Ok((2.0 * p / (1.0 - (1.0 - 4.0 * p).max(0.0).sqrt())).ln())
            }
        }
        Region::IIIInterior | Region::LI | Region::LIII => Ok(l1.max(l3).ln()),
        _ => Err(Error::OutOfDomain(format!("{} is not in the self-dual regime", label.region.name()))),
    }
}

/// Number of midpoint nodes for the `∫ log|c|` quadrature.
pub const QUAD_POINTS: usize = 1 << 16;

/// Midpoint rule for `∫ log|c|`, skipping nodes within `1e-10` of a zero.
pub fn i_quadrature(lambda: &Coupling) -> f64 {
    let zeros = c_zeros(lambda, 0.0);
    let n = QUAD_POINTS;
    let mut acc = CompensatedSum::new();
    for j in 0..n {
        let th = (j as f64 + 0.5) / n as f64;
        if zeros.iter().any(|&(z, _)| dist_to_integers(th - z) < 1e-10) {
            continue;
        }
        acc.add(lambda.c(0.0, th).norm().ln());
    }
    acc.value() / n as f64
}

/// Derived quantities of a coupling with `λ₂ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCouplingData {
    pub gamma: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    /// Present on the self-dual regime only.
    pub i_closed: Option<f64>,
    pub i_quadrature: f64,
}

pub fn coupling_integral(lambda: &Coupling) -> Result<DerivedCouplingData> {
    if lambda.l2 <= 0.0 {
        return Err(Error::OutOfDomain("γ needs λ₂ > 0".into()));
    }
    let g = gamma(lambda);
    let (lp, lm) = lambda_pm(g);
    Ok(DerivedCouplingData {
        gamma: g,
        lambda_plus: lp,
        lambda_minus: lm,
        i_closed: i_closed(lambda).ok(),
        i_quadrature: i_quadrature(lambda),
    })
}
