//! Continued-fraction expansion of the frequency.
//!
//! Frequencies are either exact quadratic surds `(P + sqrt d)/Q`, exact
//! rationals, or decimals known to a finite number of digits. Surds are
//! expanded with integer arithmetic only; decimals are carried as an interval
//! and a partial quotient is emitted only when both endpoints agree on it.
//!
//! Indexing: `terms[n-1] = a_n` for `n >= 1`, and `convergents[n] = (p_n, q_n)`
//! for `n >= 0`, with `(p_0, q_0) = (0, 1)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::util::{ln_big, ratio_f64};

/// Exact quadratic irrational `(p + sqrt d) / q` with `q | d - p^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadSurd {
    p: BigInt,
    d: BigInt,
    q: BigInt,
}

impl QuadSurd {
    /// `(a + b sqrt(big_d)) / c`.
    pub fn new(big_d: &BigInt, a: &BigInt, b: &BigInt, c: &BigInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        if big_d.is_negative() {
            return Err(Error::InvalidInput("negative radicand".into()));
        }
        let d0 = b * b * big_d;
        let r = d0.sqrt();
        if &r * &r == d0 || b.is_zero() {
            return Err(Error::InvalidInput("surd is rational".into()));
        }
        let (mut p, mut q) = if b.is_negative() { (-a, -c) } else { (a.clone(), c.clone()) };
        let mut d = d0;
        if !(&d - &p * &p).is_multiple_of(&q) {
            let qa = q.abs();
            p *= &qa;
            d *= &q * &q;
            q *= &qa;
        }
        Ok(QuadSurd { p, d, q })
    }

    fn from_i64(big_d: i64, a: i64, b: i64, c: i64) -> Self {
        Self::new(&big_d.into(), &a.into(), &b.into(), &c.into()).expect("valid surd literal")
    }

    /// Integer part, exact.
    pub fn floor(&self) -> BigInt {
        let s = self.d.sqrt();
        if self.q.is_positive() {
            (&self.p + &s).div_floor(&self.q)
        } else {
            // floor((p + sqrt d)/q) with q < 0 equals floor((-p - sqrt d)/(-q))
            // and sqrt d is irrational, so -sqrt d lies in (-s-1, -s).
            (-&self.p - &s - BigInt::one()).div_floor(&(-&self.q))
        }
    }

    /// Complete quotient step: returns `(a, 1/(x - a))`.
    fn step(&self) -> (BigInt, QuadSurd) {
        let a = self.floor();
        let p1 = &a * &self.q - &self.p;
        let q1 = (&self.d - &p1 * &p1) / &self.q;
        (a, QuadSurd { p: p1, d: self.d.clone(), q: q1 })
    }

    pub fn to_f64(&self) -> f64 {
        let k = 128usize;
        let s = (&self.d << (2 * k)).sqrt();
        let num = (&self.p << k) + s;
        let den = &self.q << k;
        ratio_f64(&num, &den)
    }

    /// Sign of `x + y sqrt(d)`.
    fn sign_with(&self, x: &BigInt, y: &BigInt) -> Ordering {
        surd_sign(x, y, &self.d)
    }
}

/// Sign of `x + y sqrt(d)` for `d >= 0` not a perfect square.
fn surd_sign(x: &BigInt, y: &BigInt, d: &BigInt) -> Ordering {
    let zero = BigInt::zero();
    match (x.cmp(&zero), y.cmp(&zero)) {
        (Ordering::Equal, Ordering::Equal) => Ordering::Equal,
        (xs, Ordering::Equal) => xs,
        (Ordering::Equal, ys) => ys,
        (Ordering::Greater, Ordering::Greater) => Ordering::Greater,
        (Ordering::Less, Ordering::Less) => Ordering::Less,
        (Ordering::Greater, Ordering::Less) => (x * x).cmp(&(y * y * d)),
        (Ordering::Less, Ordering::Greater) => (y * y * d).cmp(&(x * x)),
    }
}

/// A frequency in one of the supported exact or interval forms.
#[derive(Debug, Clone, PartialEq)]
pub enum Alpha {
    Surd { surd: QuadSurd, repr: String },
    Rational { p: BigInt, q: BigInt },
    Decimal { lo: BigRational, hi: BigRational, bits: u64, text: String },
}

impl Alpha {
    /// `(sqrt 5 - 1) / 2`.
    pub fn golden() -> Self {
        Alpha::Surd { surd: QuadSurd::from_i64(5, -1, 1, 2), repr: "golden".into() }
    }

    /// `sqrt 2 - 1`.
    pub fn silver() -> Self {
        Alpha::Surd { surd: QuadSurd::from_i64(2, -1, 1, 1), repr: "silver".into() }
    }

    /// `(a + b sqrt D) / c`.
    pub fn surd(big_d: i64, a: i64, b: i64, c: i64) -> Result<Self> {
        let surd = QuadSurd::new(&big_d.into(), &a.into(), &b.into(), &c.into())?;
        Ok(Alpha::Surd { surd, repr: format!("sqrt:{big_d}:{a}:{b}:{c}") })
    }

    pub fn rational(p: i64, q: i64) -> Result<Self> {
        if q <= 0 {
            return Err(Error::InvalidInput("rational needs a positive denominator".into()));
        }
        Ok(Alpha::Rational { p: p.into(), q: q.into() })
    }

    /// A decimal string, read as the interval of reals that round to it.
    pub fn decimal(text: &str) -> Result<Self> {
        let t = text.trim();
        let (int_part, frac_part) = t.split_once('.').unwrap_or((t, ""));
        if int_part.is_empty() && frac_part.is_empty()
            || !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(Error::InvalidInput(format!("not a decimal: {text}")));
        }
        let digits = frac_part.len() as u32;
        let mantissa: BigInt = format!("{int_part}{frac_part}").parse().unwrap_or_default();
        let scale = BigInt::from(10).pow(digits);
        let mid = BigRational::new(mantissa, scale.clone());
        let half = BigRational::new(BigInt::from(5), scale * BigInt::from(10));
        let bits = (digits as f64 * std::f64::consts::LOG2_10).floor() as u64;
        Ok(Alpha::Decimal { lo: &mid - &half, hi: &mid + &half, bits, text: t.to_string() })
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Alpha::Surd { surd, .. } => surd.to_f64(),
            Alpha::Rational { p, q } => ratio_f64(p, q),
            Alpha::Decimal { lo, hi, .. } => {
                let m = (lo + hi) / BigInt::from(2);
                ratio_f64(m.numer(), m.denom())
            }
        }
    }

    pub fn repr(&self) -> String {
        match self {
            Alpha::Surd { repr, .. } => repr.clone(),
            Alpha::Rational { p, q } => format!("{p}/{q}"),
            Alpha::Decimal { text, .. } => text.clone(),
        }
    }
}

/// Expansion of a frequency in `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuedFraction {
    pub alpha_repr: String,
    pub alpha: f64,
    /// `a_1 .. a_N`.
    pub terms: Vec<u64>,
    /// `(p_n, q_n)` for `n = 0 ..= N`.
    pub convergents: Vec<(BigInt, BigInt)>,
    /// `Delta_n = |q_n alpha - p_n|` for `n = 0 .. N`.
    pub deltas: Vec<f64>,
    surd: Option<QuadSurd>,
}

impl ContinuedFraction {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn p(&self, n: usize) -> &BigInt {
        &self.convergents[n].0
    }

    pub fn q(&self, n: usize) -> &BigInt {
        &self.convergents[n].1
    }

    /// `q_n` as an integer, if it fits.
    pub fn q_u64(&self, n: usize) -> Option<u64> {
        self.q(n).to_u64()
    }

    /// Checks the convergent recursion, coprimality, monotonicity and the
    /// two-sided bound on `Delta_n`. Exact when the frequency is a surd.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let cv = &self.convergents;
        if cv.is_empty() || cv[0] != (BigInt::zero(), BigInt::one()) {
            return Err("(p_0, q_0) must be (0, 1)".into());
        }
        for n in 1..cv.len() {
            let a = BigInt::from(self.terms[n - 1]);
            let (pm2, qm2) = if n >= 2 { cv[n - 2].clone() } else { (BigInt::one(), BigInt::zero()) };
            if cv[n].1 != &a * &cv[n - 1].1 + &qm2 || cv[n].0 != &a * &cv[n - 1].0 + &pm2 {
                return Err(format!("recursion fails at n = {n}"));
            }
            if !cv[n].0.gcd(&cv[n].1).is_one() {
                return Err(format!("p_{n}, q_{n} not coprime"));
            }
            if n >= 2 && cv[n].1 <= cv[n - 1].1 {
                return Err(format!("q not increasing at n = {n}"));
            }
        }
        for n in 0..self.deltas.len().min(cv.len() - 1) {
            let qn1 = &cv[n + 1].1;
            let qn = &cv[n].1;
            match &self.surd {
                Some(s) => {
                    let x = qn * &s.p - &cv[n].0 * &s.q;
                    let y = qn.clone();
                    let sg = match s.sign_with(&x, &y) {
                        Ordering::Less => -1,
                        _ => 1,
                    };
                    let qa = s.q.abs();
                    let hi_x = &x * qn1 * sg - &qa;
                    let hi_y = &y * qn1 * sg;
                    if s.sign_with(&hi_x, &hi_y) != Ordering::Less {
                        return Err(format!("Delta_{n} >= 1/q_{}", n + 1));
                    }
                    let m = qn + qn1;
                    let lo_x = &x * &m * sg - &qa;
                    let lo_y = &y * &m * sg;
                    if s.sign_with(&lo_x, &lo_y) != Ordering::Greater {
                        return Err(format!("Delta_{n} <= 1/(q_{n} + q_{})", n + 1));
                    }
                }
                None => {
                    let d = self.deltas[n];
                    let lo = 1.0 / (ratio_f64(qn, &BigInt::one()) + ratio_f64(qn1, &BigInt::one()));
                    let hi = 1.0 / ratio_f64(qn1, &BigInt::one());
                    if !(d > lo * (1.0 - 1e-12) && d < hi * (1.0 + 1e-12)) {
                        return Err(format!("Delta_{n} outside its bounds"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn convergents_of(terms: &[u64]) -> Vec<(BigInt, BigInt)> {
    let mut out = vec![(BigInt::zero(), BigInt::one())];
    let (mut pm2, mut qm2) = (BigInt::one(), BigInt::zero());
    for &a in terms {
        let (pm1, qm1) = out.last().cloned().unwrap();
        let a = BigInt::from(a);
        let p = &a * &pm1 + &pm2;
        let q = &a * &qm1 + &qm2;
        pm2 = pm1;
        qm2 = qm1;
        out.push((p, q));
    }
    out
}

fn surd_delta(s: &QuadSurd, p: &BigInt, q: &BigInt) -> f64 {
    // |x + y sqrt d| / |Q| = |x^2 - y^2 d| / ((|x| + |y| sqrt d) |Q|), since x and y sqrt d
    // have opposite signs whenever the value is small.
    let x = q * &s.p - p * &s.q;
    let y = q.clone();
    let k = 64usize;
    let num = (&x * &x - &y * &y * &s.d).abs() << k;
    let den = ((x.abs() << k) + ((&y * &y * &s.d) << (2 * k)).sqrt()) * s.q.abs();
    ratio_f64(&num, &den)
}

/// Expands `alpha` to `n_terms` partial quotients.
pub fn expand(alpha: &Alpha, n_terms: usize) -> Result<ContinuedFraction> {
    let v = alpha.to_f64();
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::InvalidInput(format!("alpha = {v} is not in (0, 1)")));
    }
    let mut terms = Vec::with_capacity(n_terms);
    let mut surd_state = None;
    match alpha {
        Alpha::Surd { surd, .. } => {
            if !surd.floor().is_zero() {
                return Err(Error::InvalidInput("alpha is not in (0, 1)".into()));
            }
            let mut x = surd.step().1;
            for _ in 0..n_terms {
                let (a, next) = x.step();
                terms.push(a.to_u64().ok_or(Error::PrecisionExhausted { index: terms.len() + 1 })?);
                x = next;
            }
            surd_state = Some(surd.clone());
        }
        Alpha::Rational { p, q } => {
            let (mut num, mut den) = (q.clone(), p.clone());
            for _ in 0..n_terms {
                if den.is_zero() {
                    return Err(Error::Terminated { terms: terms.len() });
                }
                let (a, r) = num.div_mod_floor(&den);
                terms.push(a.to_u64().ok_or(Error::PrecisionExhausted { index: terms.len() + 1 })?);
                num = den;
                den = r;
            }
        }
        Alpha::Decimal { lo, hi, bits, .. } => {
            let (mut xl, mut xh) = (lo.clone(), hi.clone());
            let mut q_prev = BigInt::zero();
            let mut q_cur = BigInt::one();
            for _ in 0..n_terms {
                let index = terms.len() + 1;
                if xl.is_zero() || xh.is_zero() {
                    return Err(Error::PrecisionExhausted { index });
                }
                let (yl, yh) = (xh.recip(), xl.recip());
                let (al, ah) = (yl.floor(), yh.floor());
                if al != ah || yl.is_integer() || yh.is_integer() {
                    return Err(Error::PrecisionExhausted { index });
                }
                let a = al.to_integer();
                let q_next = &a * &q_cur + &q_prev;
                if 4 * q_next.bits() > *bits {
                    return Err(Error::PrecisionExhausted { index });
                }
                terms.push(a.to_u64().ok_or(Error::PrecisionExhausted { index })?);
                xl = yl - &al;
                xh = yh - &ah;
                q_prev = q_cur;
                q_cur = q_next;
            }
        }
    }
    let convergents = convergents_of(&terms);
    let deltas = (0..terms.len())
        .map(|n| {
            let (p, q) = &convergents[n];
            match alpha {
                Alpha::Surd { surd, .. } => surd_delta(surd, p, q),
                Alpha::Rational { p: ap, q: aq } => {
                    let e = q * ap - p * aq;
                    ratio_f64(&e.abs(), aq)
                }
                Alpha::Decimal { lo, hi, .. } => {
                    let m = (lo + hi) / BigInt::from(2);
                    let e = (m * q - BigRational::from(p.clone())).abs();
                    ratio_f64(e.numer(), e.denom())
                }
            }
        })
        .collect();
    Ok(ContinuedFraction { alpha_repr: alpha.repr(), alpha: v, terms, convergents, deltas, surd: surd_state })
}

/// Value of the finite continued fraction `[0; a_1, ..., a_N]`.
pub fn finite_value(terms: &[u64]) -> BigRational {
    let cv = convergents_of(terms);
    let (p, q) = cv.last().unwrap().clone();
    BigRational::new(p, q)
}

pub use crate::util::dist_to_integers;

/// Parity of `p_n + q_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn label(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Indices `n >= 1` sharing the majority parity of `p_n + q_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParitySubsequence {
    pub indices: Vec<usize>,
    pub label: Parity,
}

/// The larger of the two constant-parity index sets; ties go to even.
pub fn parity_subsequence(cf: &ContinuedFraction) -> Result<ParitySubsequence> {
    if cf.len() < 4 {
        return Err(Error::InvalidInput("need at least four convergents".into()));
    }
    let (mut even, mut odd) = (Vec::new(), Vec::new());
    for n in 1..=cf.len() {
        let (p, q) = &cf.convergents[n];
        if (p + q).is_even() {
            even.push(n);
        } else {
            odd.push(n);
        }
    }
    Ok(if even.len() >= odd.len() {
        ParitySubsequence { indices: even, label: Parity::Even }
    } else {
        ParitySubsequence { indices: odd, label: Parity::Odd }
    })
}

/// Output of [`counterexample_alpha`]: the expansion plus the first index of
/// each constructed triple.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub cf: ContinuedFraction,
    pub level_starts: Vec<usize>,
    pub c: f64,
}

/// Default cap on convergent size, in bits.
pub const CONVERGENT_CAP_BITS: u64 = 4096;

/// Number of all-ones tail quotients appended after the constructed prefix.
pub const COUNTEREXAMPLE_TAIL: usize = 6;

fn exceeds_power(qn: &BigInt, qm: &BigInt, c: f64) -> bool {
    if c.fract() == 0.0 && c <= 64.0 {
        *qn > qm.pow(c as u32)
    } else {
        ln_big(qn) > c * ln_big(qm)
    }
}

fn exceeds_multiple(qn: &BigInt, qm: &BigInt, c: f64) -> bool {
    let cr = BigRational::from_float(c).expect("finite C");
    BigRational::from(qn.clone()) > cr * BigRational::from(qm.clone())
}

/// Frequency whose expansion contains `levels` disjoint triples
/// `(n, n+1, n+2)` with `q_n > q_{n-1}^C`, `a_{n+1} = 1` and
/// `q_{n+2} > C q_{n+1}`. Each quotient is the least one satisfying its
/// inequality; the expansion starts from `a_1 = 1` and ends in all ones.
pub fn counterexample_alpha(c: f64, levels: usize) -> Result<Counterexample> {
    counterexample_alpha_capped(c, levels, CONVERGENT_CAP_BITS)
}

pub fn counterexample_alpha_capped(c: f64, levels: usize, cap_bits: u64) -> Result<Counterexample> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::InvalidInput(format!("C = {c} must exceed 1")));
    }
    let mut terms: Vec<u64> = vec![1];
    let mut level_starts = Vec::new();
    let push = |terms: &mut Vec<u64>, a: u64| -> Result<()> {
        terms.push(a);
        let cv = convergents_of(terms);
        if cv.last().unwrap().1.bits() > cap_bits {
            return Err(Error::PrecisionExhausted { index: terms.len() });
        }
        Ok(())
    };
    let least = |terms: &[u64], pred: &dyn Fn(&BigInt, &BigInt) -> bool| -> Result<u64> {
        let cv = convergents_of(terms);
        let n = cv.len();
        let q1 = cv[n - 1].1.clone();
        let q2 = if n >= 2 { cv[n - 2].1.clone() } else { BigInt::zero() };
        // q(a) = a q1 + q2 is increasing in a, so bisect on a.
        let ok = |a: &BigInt| pred(&(a * &q1 + &q2), &q1);
        let mut hi = BigInt::one();
        while !ok(&hi) {
            hi <<= 1;
            if hi.bits() > cap_bits {
                return Err(Error::PrecisionExhausted { index: terms.len() + 1 });
            }
        }
        let mut lo = BigInt::zero();
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1;
            if ok(&mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi.to_u64().ok_or(Error::PrecisionExhausted { index: terms.len() + 1 })
    };
    for _ in 0..levels {
        level_starts.push(terms.len() + 1);
        let a = least(&terms, &|qn, qm| exceeds_power(qn, qm, c))?;
        push(&mut terms, a)?;
        push(&mut terms, 1)?;
        let a = least(&terms, &|qn, qm| exceeds_multiple(qn, qm, c))?;
        push(&mut terms, a)?;
    }
    // alpha = (p_N phi + p_{N-1}) / (q_N phi + q_{N-1}) with phi = (1 + sqrt 5)/2.
    let cv = convergents_of(&terms);
    let nn = cv.len() - 1;
    let (pn, qn) = cv[nn].clone();
    let (pm, qm) = cv[nn - 1].clone();
    let a = &pn + BigInt::from(2) * &pm;
    let b = pn.clone();
    let big_a = &qn + BigInt::from(2) * &qm;
    let big_b = qn.clone();
    let five = BigInt::from(5);
    let num_a = &a * &big_a - &five * &b * &big_b;
    let num_b = &b * &big_a - &a * &big_b;
    let den = &big_a * &big_a - &five * &big_b * &big_b;
    let surd = QuadSurd::new(&five, &num_a, &num_b, &den)?;
    let alpha = Alpha::Surd { surd, repr: format!("counterexample:C={c}:levels={levels}") };
    let cf = expand(&alpha, terms.len() + COUNTEREXAMPLE_TAIL)?;
    debug_assert_eq!(&cf.terms[..terms.len()], &terms[..]);
    Ok(Counterexample { cf, level_starts, c })
}

impl Counterexample {
    /// Checks the three defining inequalities at every constructed level.
    pub fn inequalities_hold(&self) -> bool {
        self.level_starts.iter().all(|&n| {
            let q = |k: usize| self.cf.q(k).clone();
            exceeds_power(&q(n), &q(n - 1), self.c)
                && self.cf.terms[n] == 1
                && exceeds_multiple(&q(n + 2), &q(n + 1), self.c)
        })
    }
}

/// Finite-horizon proxy `max_n ln(q_{n+1}) / q_n` for the exponent
/// `limsup ln(q_{n+1}) / q_n`.
pub fn beta_exponent(cf: &ContinuedFraction) -> Result<f64> {
    if cf.convergents.len() < 3 {
        return Err(Error::InvalidInput("need at least three convergents".into()));
    }
    Ok((0..cf.convergents.len() - 1)
        .map(|n| ln_big(cf.q(n + 1)) / ratio_f64(cf.q(n), &BigInt::one()))
        .fold(0.0, f64::max))
}

/// Finite-horizon check of `|sin(2 pi n alpha)| > kappa / n^r` for
/// `1 <= n <= n_max`. A `true` result says nothing beyond `n_max`.
pub fn diophantine_up_to(alpha: f64, kappa: f64, r: f64, n_max: u64) -> bool {
    (1..=n_max).all(|n| {
        let x = crate::util::frac_orbit(n as f64, alpha, 0.0);
        (2.0 * std::f64::consts::PI * x).sin().abs() > kappa / (n as f64).powf(r)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qs(cf: &ContinuedFraction) -> Vec<u64> {
        cf.convergents.iter().map(|(_, q)| q.to_u64().unwrap()).collect()
    }

    #[test]
    fn golden_six_terms() {
        let cf = expand(&Alpha::golden(), 6).unwrap();
        assert_eq!(cf.terms, vec![1; 6]);
        assert_eq!(&qs(&cf)[..6], &[1, 1, 2, 3, 5, 8]);
        cf.check_invariants().unwrap();
    }

    #[test]
    fn silver_five_terms() {
        let cf = expand(&Alpha::silver(), 5).unwrap();
        assert_eq!(cf.terms, vec![2; 5]);
        assert_eq!(&qs(&cf)[..5], &[1, 2, 5, 12, 29]);
    }

    #[test]
    fn rational_terminates() {
        let e = expand(&Alpha::rational(3, 7).unwrap(), 10).unwrap_err();
        assert_eq!(e, Error::Terminated { terms: 2 });
    }

    #[test]
    fn decimal_stops_when_uncertain() {
        let a = Alpha::decimal("0.6180339887498948482045868343656").unwrap();
        let err = expand(&a, 200).unwrap_err();
        assert!(matches!(err, Error::PrecisionExhausted { .. }));
        let cf = expand(&a, 20).unwrap();
        assert_eq!(cf.terms, vec![1; 20]);
        cf.check_invariants().unwrap();
    }

    #[test]
    fn surd_floor_negative_denominator() {
        // (1 - sqrt 5) / (-2) = golden mean
        let s = QuadSurd::new(&5.into(), &1.into(), &(-1).into(), &(-2).into()).unwrap();
        assert!((s.to_f64() - 0.618_033_988_749_894_9).abs() < 1e-15);
        assert!(s.floor().is_zero());
    }

    #[test]
    fn parity_golden() {
        let cf = expand(&Alpha::golden(), 6).unwrap();
        let ps = parity_subsequence(&cf).unwrap();
        assert_eq!(ps.indices, vec![2, 3, 5, 6]);
        assert_eq!(ps.label, Parity::Odd);
    }

    #[test]
    fn parity_tie_goes_to_even() {
        // p + q parities (0, 0, 1, 1): a size tie
        let cf = ContinuedFraction {
            alpha_repr: "synthetic".into(),
            alpha: 0.5,
            terms: vec![1, 1, 1, 1],
            convergents: vec![
                (0.into(), 1.into()),
                (1.into(), 1.into()),
                (1.into(), 3.into()),
                (2.into(), 3.into()),
                (2.into(), 5.into()),
            ],
            deltas: vec![],
            surd: None,
        };
        let ps = parity_subsequence(&cf).unwrap();
        assert_eq!(ps.label, Parity::Even);
        assert_eq!(ps.indices, vec![1, 2]);
    }

    #[test]
    fn beta_golden() {
        let cf = expand(&Alpha::golden(), 6).unwrap();
        let b = beta_exponent(&cf).unwrap();
        assert!((b - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn counterexample_levels() {
        let ce = counterexample_alpha(2.0, 1).unwrap();
        assert_eq!(ce.level_starts, vec![2]);
        assert_eq!(&ce.cf.terms[..4], &[1, 1, 1, 2]);
        assert!(ce.inequalities_hold());
        ce.cf.check_invariants().unwrap();

        let ce = counterexample_alpha(3.0, 2).unwrap();
        assert_eq!(ce.level_starts.len(), 2);
        assert!(ce.inequalities_hold());
        ce.cf.check_invariants().unwrap();

        let ce = counterexample_alpha(2.0, 0).unwrap();
        assert!(ce.cf.terms.iter().all(|&a| a == 1));
    }

    #[test]
    fn diophantine_golden() {
        let g = Alpha::golden().to_f64();
        assert!(diophantine_up_to(g, 0.1, 1.0, 10_000));
    }
}
