//! Small numerical helpers shared across modules.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Fractional part of `k * alpha + shift`, with the rounding error of the
/// product recovered by an fma so that large `k` keeps full precision.
#[inline]
pub fn frac_orbit(k: f64, alpha: f64, shift: f64) -> f64 {
    let r = k * alpha;
    let err = k.mul_add(alpha, -r);
    let fr = r - r.floor();
    let x = fr + (shift - shift.floor()) + err;
    x - x.floor()
}

/// Distance from `r` to the nearest integer.
#[inline]
pub fn dist_to_integers(r: f64) -> f64 {
    let f = r - r.floor();
    f.min(1.0 - f)
}

/// `log(2|sin(pi x)|)`, accurate near the integers.
#[inline]
pub fn log_two_sin(x: f64) -> f64 {
    let d = dist_to_integers(x);
    (2.0 * (std::f64::consts::PI * d).sin()).ln()
}

/// `n` equispaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n).map(|i| if i + 1 == n { b } else { a + h * i as f64 }).collect()
        }
    }
}

/// Default phase offset 1/(2e).
pub const PHASE_OFFSET: f64 = 0.183_939_720_585_721_2;

/// Equidistributed starting phases `j/n + offset`; the seed perturbs the
/// offset deterministically.
pub fn phase_lattice(n: usize, seed: u64) -> Vec<f64> {
    let offset = if seed == 0 {
        PHASE_OFFSET
    } else {
        let g = 0.618_033_988_749_894_9 * seed as f64;
        PHASE_OFFSET + (g - g.floor()) / n as f64
    };
    (0..n)
        .map(|j| {
            let x = j as f64 / n as f64 + offset;
            x - x.floor()
        })
        .collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().copied().collect::<CompensatedSum>().value() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, v.sqrt())
}

/// `num / den` as a double without overflowing on large operands.
pub fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = num.bits().max(den.bits()).saturating_sub(900);
    let n = (num.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (den.abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
    let s = if num.is_negative() != den.is_negative() { -1.0 } else { 1.0 };
    s * n / d
}

/// Natural logarithm of a positive big integer.
pub fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..1000 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-13).abs() < 1e-25);
    }

    #[test]
    fn frac_orbit_large_k() {
        let alpha = 0.5f64.sqrt();
        let k = 123_456_789.0;
        let x = frac_orbit(k, alpha, 0.0);
        assert!((x - 0.685_416_767_358_427_4).abs() < 1e-7);
    }

    #[test]
    fn dist_examples() {
        assert!((dist_to_integers(0.3) - 0.3).abs() < 1e-15);
        assert!((dist_to_integers(0.7) - 0.3).abs() < 1e-15);
        assert!((dist_to_integers(2.5) - 0.5).abs() < 1e-15);
        assert!((dist_to_integers(-0.2) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn slope_of_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert!((ls_slope(&xs, &ys) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn ratio_of_huge_integers() {
        let a = BigInt::from(3) << 2000usize;
        let b = BigInt::from(4) << 2000usize;
        assert!((ratio_f64(&a, &b) - 0.75).abs() < 1e-15);
        assert!((ln_big(&(BigInt::from(1) << 1500usize)) - 1500.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }
}
