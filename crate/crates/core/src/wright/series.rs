//! Maclaurin series of the Wright-type functions, in double precision with a
//! roundoff estimate and in MPFR with a shared coefficient cache.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, LazyLock, RwLock};

use num_complex::Complex64;
use rug::Float;

use super::WrightFn;
use crate::coeffs::gamma::{gamma, ln_gamma, rgamma_mp, sin_pi};
use crate::error::{Error, Result};
use crate::index::StableIndex;
use crate::mp::MpComplex;

/// Value of a truncated sum with its truncation and roundoff estimates.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesSum<T> {
    pub value: T,
    pub truncation: f64,
    pub roundoff: f64,
}

fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// `Gamma(s) sin(pi s)` or `Gamma(s) cos(pi s)` at `s = (n+1)/(1+alpha)`.
fn trig_gamma(alpha: StableIndex, n: usize, sine: bool) -> f64 {
    let s = (n as f64 + 1.0) * alpha.inv_one_plus();
    let g = gamma(s);
    if sine {
        g * sin_pi(s)
    } else {
        g * cos_pi(s)
    }
}

/// `log2` of an upper bound on `|coefficient of x^n|` in the series of `f`.
pub(crate) fn log2_coeff_bound(alpha: StableIndex, f: WrightFn, n: usize) -> f64 {
    let m = if f.is_derivative() { n + 1 } else { n };
    let s = (m as f64 + 1.0) * alpha.inv_one_plus();
    let ln = ln_gamma(s) - ln_gamma(n as f64 + 1.0)
        + (m as f64 - alpha.alpha()) * alpha.inv_one_plus() * alpha.one_plus().ln()
        - PI.ln();
    ln / std::f64::consts::LN_2
}

/// Double-precision series at complex `z`.
pub(crate) fn series_f64(
    alpha: StableIndex,
    f: WrightFn,
    z: Complex64,
    tol: f64,
    max_terms: usize,
) -> Result<SeriesSum<Complex64>> {
    let q = alpha.one_plus().powf(alpha.inv_one_plus());
    let lead = q.powf(-alpha.alpha()) / PI;
    let sine = f.is_phi();
    let shift = usize::from(f.is_derivative());
    let mut r = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut prev_bound = f64::INFINITY;
    let mut quiet = 0;
    for n in 0..max_terms {
        if n > 0 {
            r *= -z * q / n as f64;
        }
        let g = trig_gamma(alpha, n + shift, sine);
        let s = (n + shift) as f64 * alpha.inv_one_plus() + alpha.inv_one_plus();
        let gmax = gamma(s);
        if !gmax.is_finite() {
            return Err(Error::NonConvergence {
                what: "wright::series",
                detail: format!("gamma overflow at term {n}"),
            });
        }
        let k = if shift == 1 { -q * lead } else { lead };
        let term = r * g * k;
        sum += term;
        abs_sum += term.norm();
        let bound = r.norm() * gmax * k.abs();
        if (bound < prev_bound || bound == 0.0) && bound <= 0.01 * tol {
            quiet += 1;
            if quiet >= 2 {
                return Ok(SeriesSum {
                    value: sum,
                    truncation: 2.0 * bound,
                    roundoff: 16.0 * f64::EPSILON * abs_sum,
                });
            }
        } else {
            quiet = 0;
        }
        prev_bound = bound;
    }
    Err(Error::NonConvergence {
        what: "wright::series",
        detail: format!("more than {max_terms} terms needed at |x| = {}", z.norm()),
    })
}

/// Series coefficients `a_n` of Phi (sine) and Psi (cosine) at a fixed precision.
#[derive(Debug)]
struct MpCoefficients {
    sine: Vec<Float>,
    cosine: Vec<Float>,
}

type CacheKey = (u64, u32);

static MP_CACHE: LazyLock<RwLock<HashMap<CacheKey, Arc<MpCoefficients>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

const CACHE_LIMIT: usize = 48;

fn build_coefficients(alpha: StableIndex, bits: u32, from: &MpCoefficients, count: usize) -> MpCoefficients {
    let a = Float::with_val(bits, alpha.alpha());
    let ap1 = Float::with_val(bits, &a + 1.0);
    let ln_ap1 = Float::with_val(bits, ap1.ln_ref());
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let mut sine = from.sine.clone();
    let mut cosine = from.cosine.clone();
    let start = sine.len();
    let mut fact = Float::with_val(bits, Float::factorial(start.saturating_sub(1) as u32));
    for n in start..count {
        if n > 0 {
            fact *= n as u32;
        }
        let s = Float::with_val(bits, (n as f64) + 1.0) / &ap1;
        let pow = Float::with_val(bits, (Float::with_val(bits, n as f64) - &a) / &ap1 * &ln_ap1).exp();
        let mut k = Float::with_val(bits, &pow / &fact);
        if n % 2 == 1 {
            k = -k;
        }
        // Gamma(s) sin(pi s) = pi / Gamma(1 - s), exact zero at the poles.
        let one_minus = Float::with_val(bits, 1.0 - &s);
        sine.push(Float::with_val(bits, &k * rgamma_mp(&one_minus)));
        let g = s.clone().gamma();
        let c = Float::with_val(bits, &pi * &s).cos();
        cosine.push(Float::with_val(bits, &k * g * c) / &pi);
    }
    MpCoefficients { sine, cosine }
}

/// Precision buckets: multiples of 64 up to 256 bits, eighth-octave steps above.
fn bucket(bits: u32) -> u32 {
    if bits <= 256 {
        return bits.max(1).div_ceil(64) * 64;
    }
    let steps = (8.0 * f64::from(bits).log2()).ceil();
    let b = 2f64.powf(steps / 8.0).ceil() as u32;
    b.div_ceil(64) * 64
}

fn coefficients(alpha: StableIndex, bits: u32, count: usize) -> Arc<MpCoefficients> {
    let bits = bucket(bits);
    let key = (alpha.key(), bits);
    {
        let guard = MP_CACHE.read().expect("coefficient cache poisoned");
        let reusable = guard
            .iter()
            .filter(|((k, b), c)| *k == key.0 && *b >= bits && *b <= 2 * bits && c.sine.len() >= count)
            .min_by_key(|((_, b), _)| *b);
        if let Some((_, c)) = reusable {
            return Arc::clone(c);
        }
    }
    let mut guard = MP_CACHE.write().expect("coefficient cache poisoned");
    let existing = guard.get(&key).cloned();
    if let Some(c) = &existing {
        if c.sine.len() >= count {
            return Arc::clone(c);
        }
    }
    let empty = MpCoefficients { sine: Vec::new(), cosine: Vec::new() };
    let base = existing.as_deref().unwrap_or(&empty);
    // Grow geometrically so repeated small extensions stay cheap.
    let target = count.max(base.sine.len() * 3 / 2).max(32);
    let built = Arc::new(build_coefficients(alpha, bits, base, target));
    if guard.len() >= CACHE_LIMIT {
        guard.clear();
    }
    guard.insert(key, Arc::clone(&built));
    built
}

/// Scalars the MPFR series can be summed over.
pub(crate) trait MpScalar: Clone {
    fn one_like(&self) -> Self;
    fn zero_like(&self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn add_scaled(&mut self, other: &Self, k: &Float);
    fn log2_abs(&self) -> f64;
    fn with_prec(&self, bits: u32) -> Self;
}

impl MpScalar for Float {
    fn one_like(&self) -> Self {
        Float::with_val(self.prec(), 1)
    }
    fn zero_like(&self) -> Self {
        Float::new(self.prec())
    }
    fn times(&self, other: &Self) -> Self {
        Float::with_val(self.prec(), self * other)
    }
    fn add_scaled(&mut self, other: &Self, k: &Float) {
        *self += Float::with_val(self.prec(), other * k);
    }
    fn log2_abs(&self) -> f64 {
        log2_float(self)
    }
    fn with_prec(&self, bits: u32) -> Self {
        Float::with_val(bits, self)
    }
}

impl MpScalar for MpComplex {
    fn one_like(&self) -> Self {
        MpComplex::from_parts(Float::with_val(self.prec(), 1), Float::new(self.prec()))
    }
    fn zero_like(&self) -> Self {
        MpComplex::zero(self.prec())
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn add_scaled(&mut self, other: &Self, k: &Float) {
        let b = self.prec();
        self.re += Float::with_val(b, &other.re * k);
        self.im += Float::with_val(b, &other.im * k);
    }
    fn log2_abs(&self) -> f64 {
        log2_float(&self.abs())
    }
    fn with_prec(&self, bits: u32) -> Self {
        MpComplex::from_parts(Float::with_val(bits, &self.re), Float::with_val(bits, &self.im))
    }
}

pub(crate) fn log2_float(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    match x.to_f64_exp() {
        (m, e) => m.abs().log2() + e as f64,
    }
}

/// The four functions `[Phi, Phi', Psi, Psi']` summed in one pass.
#[derive(Debug, Clone)]
pub(crate) struct Quartet<T> {
    pub phi: T,
    pub phi_prime: T,
    pub psi: T,
    pub psi_prime: T,
}

impl<T> Quartet<T> {
    pub fn get(&self, f: WrightFn) -> &T {
        match f {
            WrightFn::Phi => &self.phi,
            WrightFn::PhiPrime => &self.phi_prime,
            WrightFn::Psi => &self.psi,
            WrightFn::PsiPrime => &self.psi_prime,
        }
    }
}

/// Plan for summing to absolute error `2^log2_abs_err` at `|x| = 2^log2_x`.
fn plan(alpha: StableIndex, log2_x: f64, log2_abs_err: f64) -> (usize, f64) {
    let mut max_log = f64::NEG_INFINITY;
    let mut prev = f64::INFINITY;
    let mut n = 0usize;
    loop {
        let b = log2_coeff_bound(alpha, WrightFn::Phi, n)
            .max(log2_coeff_bound(alpha, WrightFn::PhiPrime, n))
            + n as f64 * log2_x;
        max_log = max_log.max(b);
        if n > 2 && b < prev && b < log2_abs_err - 8.0 {
            return (n + 2, max_log);
        }
        prev = b;
        n += 1;
    }
}

/// MPFR series of all four functions at `x`, with absolute error about `2^log2_abs_err`.
pub(crate) fn quartet_mp_abs<T: MpScalar>(alpha: StableIndex, x: &T, log2_abs_err: f64) -> (Quartet<T>, u32) {
    let log2_x = x.log2_abs().max(-1000.0);
    let (terms, max_log) = plan(alpha, log2_x, log2_abs_err);
    let bits = ((max_log - log2_abs_err).max(0.0) + (terms as f64).log2() + 24.0).ceil() as u32;
    let bits = bits.max(64);
    let coeffs = coefficients(alpha, bits, terms + 1);
    let bits = coeffs.sine[0].prec();
    let x = x.with_prec(bits);
    let mut pow = x.one_like();
    let zero = x.zero_like();
    let mut q = Quartet {
        phi: zero.clone(),
        phi_prime: zero.clone(),
        psi: zero.clone(),
        psi_prime: zero,
    };
    for n in 0..terms {
        q.phi.add_scaled(&pow, &coeffs.sine[n]);
        q.psi.add_scaled(&pow, &coeffs.cosine[n]);
        let m = Float::with_val(bits, n as u32 + 1);
        q.phi_prime.add_scaled(&pow, &Float::with_val(bits, &coeffs.sine[n + 1] * &m));
        q.psi_prime.add_scaled(&pow, &Float::with_val(bits, &coeffs.cosine[n + 1] * &m));
        pow = pow.times(&x);
    }
    (q, bits)
}

/// MPFR series of all four functions with roughly `rel_bits` correct bits in Phi and Phi'.
pub(crate) fn quartet_mp_rel<T: MpScalar>(alpha: StableIndex, x: &T, rel_bits: u32) -> Quartet<T> {
    let log2_x = x.log2_abs().max(-1000.0);
    let (_, max_log) = plan(alpha, log2_x, -(rel_bits as f64));
    let mut target = -max_log.max(0.0) - rel_bits as f64 - 8.0;
    let mut last = None;
    for _ in 0..4 {
        let (q, _) = quartet_mp_abs(alpha, x, target);
        let scale = q.phi.log2_abs().min(q.phi_prime.log2_abs());
        let needed = scale - rel_bits as f64 - 4.0;
        if !scale.is_finite() || needed >= target {
            return q;
        }
        target = needed - 4.0;
        last = Some(q);
    }
    last.expect("at least one pass")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_and_mp_agree_at_moderate_x() {
        let a = StableIndex::new(1.5).unwrap();
        for &x in &[0.0, 0.7, 2.5, -1.5] {
            let (q, _) = quartet_mp_abs(a, &Float::with_val(128, x), -80.0);
            for f in WrightFn::ALL {
                let d = series_f64(a, f, Complex64::new(x, 0.0), 1e-15, 500).unwrap();
                let m = q.get(f).to_f64();
                assert!((d.value.re - m).abs() < 1e-13, "{f:?} x={x}: {} vs {m}", d.value.re);
            }
        }
    }

    #[test]
    fn relative_mode_resolves_small_values() {
        let a = StableIndex::new(2.0).unwrap();
        // Ai(20) = 1.69167286867... e-27
        let q = quartet_mp_rel(a, &Float::with_val(64, 20), 80);
        let v = q.phi.to_f64();
        assert!(((v - 1.691_672_868_670_540_3e-27) / v).abs() < 1e-14, "{v}");
    }

    #[test]
    fn cache_is_reused_and_extended() {
        let a = StableIndex::new(1.37).unwrap();
        let c1 = coefficients(a, 128, 10);
        let c2 = coefficients(a, 128, 10);
        assert!(Arc::ptr_eq(&c1, &c2));
        let c3 = coefficients(a, 128, 200);
        assert!(c3.sine.len() >= 200);
        assert_eq!(c3.sine[5], c1.sine[5]);
    }
}
