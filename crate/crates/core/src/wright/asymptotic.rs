//! Large-x expansions: the exponentially small Phi / Phi' family driven by
//! `c_p`, `d_p`, and the algebraic Psi / Psi' family.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, LazyLock, RwLock};

use rug::ops::Pow;
use rug::Float;

use super::series::Quartet;
use crate::coeffs::extended::ExtendedCoefficients;
use crate::coeffs::gamma::ln_gamma;
use crate::coeffs::table;
use crate::error::{invalid, Result};
use crate::index::StableIndex;

/// Order of the coefficient tables used by the automatic expansions.
pub(crate) const MAX_ORDER: usize = 64;

fn check_x(x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(invalid(format!("asymptotic expansions need x > 0, got {x}")));
    }
    Ok(())
}

fn xi(alpha: StableIndex, x: f64) -> f64 {
    x.powf(1.0 + 1.0 / alpha.alpha())
}

fn phi_prefactor(alpha: StableIndex, x: f64, power: f64) -> f64 {
    let a = alpha.alpha();
    (2.0 * PI * a).powf(-0.5) * x.powf(power / (2.0 * a)) * (-alpha.ratio() * xi(alpha, x)).exp()
}

/// Coefficient of `x^{-n(1+alpha)-1}` in the Psi expansion, without the `1/pi`.
fn psi_coefficient(alpha: StableIndex, n: usize) -> f64 {
    let m = alpha.one_plus() * n as f64;
    (ln_gamma(1.0 + m) - ln_gamma(n as f64 + 1.0) - n as f64 * alpha.one_plus().ln()).exp()
}

/// `N`-term truncation of the Phi expansion.
pub fn phi_asymptotic(alpha: StableIndex, x: f64, terms: usize) -> Result<f64> {
    check_x(x)?;
    let t = table(alpha, terms.max(1))?;
    let e = xi(alpha, x);
    let sum: f64 = (0..terms).map(|p| (-1f64).powi(p as i32) * t.c()[p] * e.powi(-(p as i32))).sum();
    Ok(phi_prefactor(alpha, x, 1.0 - alpha.alpha()) * sum)
}

/// `N`-term truncation of the Phi' expansion.
pub fn phi_prime_asymptotic(alpha: StableIndex, x: f64, terms: usize) -> Result<f64> {
    check_x(x)?;
    let t = table(alpha, terms.max(1))?;
    let e = xi(alpha, x);
    let sum: f64 = (0..terms).map(|p| (-1f64).powi(p as i32 + 1) * t.d()[p] * e.powi(-(p as i32))).sum();
    Ok(phi_prefactor(alpha, x, 3.0 - alpha.alpha()) * sum)
}

/// `N`-term truncation of the Psi expansion.
pub fn psi_asymptotic(alpha: StableIndex, x: f64, terms: usize) -> Result<f64> {
    check_x(x)?;
    let sum: f64 = (0..terms)
        .map(|n| psi_coefficient(alpha, n) * x.powf(-(n as f64) * alpha.one_plus() - 1.0))
        .sum();
    Ok(sum / PI)
}

/// `N`-term truncation of the Psi' expansion.
pub fn psi_prime_asymptotic(alpha: StableIndex, x: f64, terms: usize) -> Result<f64> {
    check_x(x)?;
    let sum: f64 = (0..terms)
        .map(|n| {
            let m = n as f64 * alpha.one_plus();
            psi_coefficient(alpha, n) * (m + 1.0) * x.powf(-m - 2.0)
        })
        .sum();
    Ok(-sum / PI)
}

/// Sum of `terms[..]` stopped before the first term that is larger than its
/// predecessor; returns the partial sum and the first omitted term's size.
fn optimally_truncated(terms: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut last_omitted = f64::INFINITY;
    for t in terms {
        if t.abs() > prev && prev.is_finite() {
            last_omitted = t.abs().min(prev);
            return (sum, last_omitted);
        }
        sum += t;
        prev = t.abs();
        last_omitted = t.abs();
    }
    (sum, last_omitted)
}

/// Phi or Phi' by optimal truncation, with an absolute error estimate.
pub(crate) fn phi_auto(alpha: StableIndex, x: f64, derivative: bool, max_terms: usize) -> Result<(f64, f64)> {
    check_x(x)?;
    let t = table(alpha, max_terms.max(2))?;
    let e = xi(alpha, x);
    let coeffs = if derivative { t.d() } else { t.c() };
    let sign0 = if derivative { -1.0 } else { 1.0 };
    let mut inv = 1.0;
    let terms = coeffs.iter().take(max_terms).enumerate().map(|(p, c)| {
        let v = sign0 * (-1f64).powi(p as i32) * c * inv;
        inv /= e;
        v
    });
    let (sum, omitted) = optimally_truncated(terms);
    let pref = phi_prefactor(alpha, x, if derivative { 3.0 } else { 1.0 } - alpha.alpha());
    // exp of a large argument carries a relative error proportional to it
    let round = (2.0 * e + 32.0) * f64::EPSILON * (pref * sum).abs();
    Ok((pref * sum, (pref * omitted).abs() + round))
}

/// Psi or Psi' by optimal truncation. The error estimate includes the
/// exponentially small remainder the algebraic expansion cannot see.
pub(crate) fn psi_auto(alpha: StableIndex, x: f64, derivative: bool, max_terms: usize) -> Result<(f64, f64)> {
    check_x(x)?;
    let op = alpha.one_plus();
    let terms = (0..max_terms).map(|n| {
        let m = n as f64 * op;
        if derivative {
            -psi_coefficient(alpha, n) * (m + 1.0) * x.powf(-m - 2.0) / PI
        } else {
            psi_coefficient(alpha, n) * x.powf(-m - 1.0) / PI
        }
    });
    let (sum, omitted) = optimally_truncated(terms);
    let remainder = phi_auto(alpha, x, derivative, 2)?.0.abs();
    Ok((sum, omitted + remainder + 4.0 * f64::EPSILON * sum.abs()))
}

static EXT_CACHE: LazyLock<RwLock<HashMap<(u64, u32), Arc<ExtendedCoefficients>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Highest order the MPFR expansions may use.
const MP_MAX_ORDER: usize = 160;

fn extended(alpha: StableIndex, bits: u32, order: usize) -> Arc<ExtendedCoefficients> {
    let bits = bits.div_ceil(64) * 64;
    let order = order.max(MAX_ORDER).div_ceil(32) * 32;
    {
        let guard = EXT_CACHE.read().expect("asymptotic cache poisoned");
        let reusable = guard
            .iter()
            .filter(|((k, b), c)| *k == alpha.key() && *b >= bits && *b <= 2 * bits && c.c().len() > order)
            .min_by_key(|((_, b), _)| *b);
        if let Some((_, c)) = reusable {
            return Arc::clone(c);
        }
    }
    let built = Arc::new(ExtendedCoefficients::build(alpha, order, bits));
    let mut guard = EXT_CACHE.write().expect("asymptotic cache poisoned");
    if guard.len() > 32 {
        guard.clear();
    }
    guard.insert((alpha.key(), bits), Arc::clone(&built));
    built
}

/// log2 of `max(|c_p|, |d_p|)`, extrapolated past the double table from the
/// roughly linear growth of successive ratios.
fn log2_coefficient(t: &[f64], u: &[f64], p: usize) -> f64 {
    let m = |q: usize| t[q].abs().max(u[q].abs()).log2();
    if p <= MAX_ORDER {
        return m(p);
    }
    let slope = (m(MAX_ORDER) - m(MAX_ORDER - 1)).exp2() / MAX_ORDER as f64;
    m(MAX_ORDER) + (MAX_ORDER + 1..=p).map(|q| (slope * q as f64).log2()).sum::<f64>() + 4.0
}

/// Number of terms after which every series in the quartet is below `2^-rel_bits`
/// relative to its own leading term, or `None` if the expansions cannot reach that accuracy.
fn quartet_terms(alpha: StableIndex, x: f64, rel_bits: u32) -> Option<(usize, usize)> {
    let t = table(alpha, MAX_ORDER).ok()?;
    let e = xi(alpha, x);
    let goal = -(rel_bits as f64) - 6.0;
    let lx = x.log2();
    let phi_terms = (1..=MP_MAX_ORDER).find(|&p| log2_coefficient(t.c(), t.d(), p) - p as f64 * e.log2() < goal)?;
    // Psi and Psi' miss an exponentially small piece of the size of Phi and Phi'.
    let a = alpha.alpha();
    let remainder = -alpha.ratio() * e / std::f64::consts::LN_2 + (3.0 - a) / (2.0 * a) * lx + 2.0 * lx + 2.0;
    if remainder >= goal {
        return None;
    }
    let psi_terms = (1..=4 * MAX_ORDER).find(|&n| {
        let m = n as f64 * alpha.one_plus();
        let l = (psi_coefficient(alpha, n) * (m + 1.0)).log2() - m * lx;
        l < goal
    })?;
    Some((phi_terms, psi_terms))
}

/// Quartet by the large-x expansions in MPFR, or `None` when the expansions
/// cannot deliver `rel_bits` at this `x`.
pub(crate) fn quartet_mp(alpha: StableIndex, x: &Float, rel_bits: u32) -> Option<Quartet<Float>> {
    let xf = x.to_f64();
    if !(xf > 1.0) {
        return None;
    }
    let (np, nq) = quartet_terms(alpha, xf, rel_bits)?;
    let bits = rel_bits + 64;
    let ext = extended(alpha, bits, np);
    let bits = ext.bits();
    let a = Float::with_val(bits, alpha.alpha());
    let x = Float::with_val(bits, x);
    let ln_x = Float::with_val(bits, x.ln_ref());
    let expo = Float::with_val(bits, 1.0 + Float::with_val(bits, 1.0 / &a));
    let xi_mp = Float::with_val(bits, &ln_x * &expo).exp();
    let inv_xi = Float::with_val(bits, 1.0 / &xi_mp);
    let mut sc = Float::new(bits);
    let mut sd = Float::new(bits);
    let mut pw = Float::with_val(bits, 1);
    for p in 0..np {
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        sc += Float::with_val(bits, &ext.c()[p] * &pw) * sign;
        sd -= Float::with_val(bits, &ext.d()[p] * &pw) * sign;
        pw *= &inv_xi;
    }
    let two_pi_a = Float::with_val(bits, rug::float::Constant::Pi) * Float::with_val(bits, &a * 2.0);
    let norm = Float::with_val(bits, two_pi_a.recip_sqrt_ref());
    let ratio = Float::with_val(bits, &a / Float::with_val(bits, &a + 1.0));
    let damp = Float::with_val(bits, -(ratio * &xi_mp)).exp();
    let two_a = Float::with_val(bits, &a * 2.0);
    let power = |k: f64| {
        let e = Float::with_val(bits, k - &a) / &two_a;
        Float::with_val(bits, e * &ln_x).exp()
    };
    let pow_phi = power(1.0);
    let pow_dphi = power(3.0);
    let base = Float::with_val(bits, &norm * &damp);
    let phi = Float::with_val(bits, &base * &pow_phi) * sc;
    let phi_prime = Float::with_val(bits, &base * &pow_dphi) * sd;

    let op = Float::with_val(bits, &a + 1.0);
    let ln_op = Float::with_val(bits, op.ln_ref());
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let mut psi = Float::new(bits);
    let mut psi_prime = Float::new(bits);
    for n in 0..nq {
        let m = Float::with_val(bits, &op * n as u32);
        let g = Float::with_val(bits, &m + 1.0).ln_gamma();
        let lf = Float::with_val(bits, n as f64 + 1.0).ln_gamma();
        let lc = g - lf - Float::with_val(bits, &ln_op * n as u32);
        let lt = Float::with_val(bits, &lc - Float::with_val(bits, &m + 1.0) * &ln_x).exp();
        psi_prime -= Float::with_val(bits, &lt * Float::with_val(bits, &m + 1.0)) / &x;
        psi += lt;
    }
    Some(Quartet {
        phi,
        phi_prime,
        psi: psi / &pi,
        psi_prime: psi_prime / &pi,
    })
}

/// `Phi'/Phi` from the ratio of the two expansions, without forming the
/// exponential factor, so it stays finite where Phi underflows.
pub(crate) fn log_derivative(alpha: StableIndex, x: f64, max_terms: usize) -> Result<(f64, f64)> {
    check_x(x)?;
    let t = table(alpha, max_terms.max(2))?;
    let e = xi(alpha, x);
    let mut terms_c = Vec::with_capacity(max_terms);
    let mut terms_d = Vec::with_capacity(max_terms);
    let mut inv = 1.0;
    for p in 0..max_terms {
        let s = if p % 2 == 0 { 1.0 } else { -1.0 };
        terms_c.push(s * t.c()[p] * inv);
        terms_d.push(s * t.d()[p] * inv);
        inv /= e;
    }
    let (sc, ec) = optimally_truncated(terms_c.iter().copied());
    let (sd, ed) = optimally_truncated(terms_d.iter().copied());
    let scale = x.powf(1.0 / alpha.alpha());
    let ratio = -scale * sd / sc;
    let err = ratio.abs() * (ec / sc.abs() + ed / sd.abs() + 8.0 * f64::EPSILON);
    Ok((ratio, err))
}

/// Phi by the optimally truncated expansion, with the exponential factor formed in MPFR.
pub(crate) fn phi_mp_scaled(alpha: StableIndex, x: f64) -> Result<Float> {
    check_x(x)?;
    let t = table(alpha, 40)?;
    let e = xi(alpha, x);
    let mut inv = 1.0;
    let terms = t.c().iter().take(40).enumerate().map(|(p, c)| {
        let v = (-1f64).powi(p as i32) * c * inv;
        inv /= e;
        v
    });
    let (sum, _) = optimally_truncated(terms);
    let a = alpha.alpha();
    let log_pref = -0.5 * (2.0 * PI * a).ln() + (1.0 - a) / (2.0 * a) * x.ln();
    let big = Float::with_val(128, -alpha.ratio()) * Float::with_val(128, x).pow(1.0 + 1.0 / a);
    Ok(Float::with_val(64, (big + log_pref).exp() * sum))
}
