//! Coefficient families driving the large-x expansions and the moment recurrences.
//!
//! Internally the Bell-type triangle is stored scaled, `b[n][k] = B_{n,k} / n!`,
//! which keeps every entry below `(1/4)^k / k!` and avoids the factorial overflow
//! of the raw values. Unscaled values are reconstructed on demand.

pub mod exact;
pub mod extended;
pub mod gamma;

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use crate::error::{invalid, Error, Result};
use crate::index::StableIndex;

pub use gamma::{gamma, gamma_sign, ln_gamma, pochhammer, rgamma};

/// Working precision for the moment recurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// 64-bit floats; fails with `PrecisionLoss` when the recurrence cancels badly.
    Double,
    /// MPFR floats with the given mantissa width.
    Extended(u32),
    /// Double up to order 15, 256-bit beyond, and whenever double precision cancels.
    Auto,
}

/// Minimum mantissa width used by the extended recurrences.
pub const EXTENDED_BITS: u32 = 256;
const AUTO_DOUBLE_MAX_ORDER: usize = 15;
// Half of the 53-bit mantissa.
const DOUBLE_LOSS_LIMIT: f64 = 26.5;

/// Immutable table of `B_{n,k}`, `c_p`, `d_p`, `Omega_n` and `Delta_n` for one alpha.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    alpha: StableIndex,
    b_scaled: Vec<Vec<f64>>,
    c: Vec<f64>,
    d: Vec<f64>,
    omega: Vec<f64>,
    delta: Vec<f64>,
    precision_bits: u32,
}

impl CoefficientTable {
    /// Builds all families up to `order`: `c_p`, `d_p` for `p <= order`, `B_{n,k}` for
    /// `n <= 2 order`, and `Omega_n`, `Delta_n` for `1 <= n <= order`.
    pub fn build(alpha: StableIndex, order: usize, precision: Precision) -> Result<Self> {
        let order = order.max(1);
        let b_scaled = scaled_bell_triangle(alpha.alpha(), 2 * order);
        let c = c_from_triangle(alpha.alpha(), &b_scaled, order);
        let d = d_from_c(alpha.alpha(), &c);
        let (omega, delta, precision_bits) = match precision {
            Precision::Double => (
                omega_double(alpha.alpha(), &c, order)?,
                delta_double(alpha.alpha(), order)?,
                53,
            ),
            Precision::Extended(bits) => extended_recurrences(alpha, order, bits.max(64)),
            Precision::Auto => {
                let doubles = if order <= AUTO_DOUBLE_MAX_ORDER {
                    omega_double(alpha.alpha(), &c, order)
                        .and_then(|o| delta_double(alpha.alpha(), order).map(|d| (o, d)))
                        .ok()
                } else {
                    None
                };
                match doubles {
                    Some((o, d)) => (o, d, 53),
                    None => extended_recurrences(alpha, order, EXTENDED_BITS),
                }
            }
        };
        Ok(CoefficientTable {
            alpha,
            b_scaled,
            c,
            d,
            omega,
            delta,
            precision_bits,
        })
    }

    pub fn alpha(&self) -> StableIndex {
        self.alpha
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// `B_{n,k}`; may overflow to infinity for `n > 170`.
    pub fn bell(&self, n: usize, k: usize) -> Result<f64> {
        check_nk(n, k)?;
        let row = self
            .b_scaled
            .get(n)
            .ok_or_else(|| invalid(format!("table holds B_(n,k) only up to n = {}", self.b_scaled.len() - 1)))?;
        let fact: f64 = (1..=n).map(|i| i as f64).product();
        Ok(row[k] * fact)
    }

    /// `B_{n,k} / n!`
    pub fn bell_scaled(&self, n: usize, k: usize) -> Result<f64> {
        check_nk(n, k)?;
        self.b_scaled
            .get(n)
            .map(|row| row[k])
            .ok_or_else(|| invalid("n beyond table"))
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    /// `Omega_1, ..., Omega_order` (index 0 holds `Omega_1`).
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// `Delta_1, ..., Delta_order` (index 0 holds `Delta_1`).
    pub fn delta(&self) -> &[f64] {
        &self.delta
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 1 || k < 1 || k > n {
        return Err(invalid(format!("B_(n,k) needs 1 <= k <= n, got n={n}, k={k}")));
    }
    Ok(())
}

/// `b[n][k] = B_{n,k}/n!` for `1 <= k <= n <= n_max` (row and column 0 unused).
pub(crate) fn scaled_bell_triangle(alpha: f64, n_max: usize) -> Vec<Vec<f64>> {
    let mut b = vec![Vec::new(); n_max + 1];
    for (n, row) in b.iter_mut().enumerate() {
        *row = vec![0.0; n + 1];
    }
    // b_{n,1} = (2-alpha)_{n-1} / (n+2)!
    let mut poch = 1.0;
    let mut fact = 6.0; // (n+2)! at n = 1
    for n in 1..=n_max {
        b[n][1] = poch / fact;
        poch *= 2.0 - alpha + (n as f64 - 1.0);
        fact *= n as f64 + 3.0;
    }
    for n in 2..=n_max {
        for k in 1..n {
            let mut s = 0.0;
            for l in k..n {
                s += b[n - l][1] * b[l][k];
            }
            b[n][k + 1] = s / (k as f64 + 1.0);
        }
    }
    b
}

pub(crate) fn c_from_triangle(alpha: f64, b: &[Vec<f64>], order: usize) -> Vec<f64> {
    let mut c = vec![1.0; order + 1];
    let ln_two_am1 = (2.0 * (alpha - 1.0)).ln();
    let ln_pref_unit = (2.0 / alpha).ln();
    let ln_sqrt_pi = 0.5 * std::f64::consts::PI.ln();
    for p in 1..=order {
        let mut s = 0.0;
        for k in 1..=2 * p {
            let bk = b[2 * p][k];
            if bk > 0.0 {
                let ln_term = bk.ln() + ln_gamma(p as f64 + k as f64 + 0.5) + k as f64 * ln_two_am1;
                s += (ln_term + p as f64 * ln_pref_unit - ln_sqrt_pi).exp();
            }
        }
        c[p] = s;
    }
    c
}

pub(crate) fn d_from_c(alpha: f64, c: &[f64]) -> Vec<f64> {
    let mut d = vec![1.0; c.len()];
    for p in 1..c.len() {
        d[p] = c[p] - c[p - 1] * d_factor(alpha, p);
    }
    d
}

/// `((2p-1)(alpha+1) - 2) / (2 alpha)`
#[inline]
pub(crate) fn d_factor(alpha: f64, p: usize) -> f64 {
    ((2.0 * p as f64 - 1.0) * (alpha + 1.0) - 2.0) / (2.0 * alpha)
}

fn loss_bits(scale: f64, value: f64) -> f64 {
    if value == 0.0 {
        f64::INFINITY
    } else {
        (scale / value.abs()).log2().max(0.0)
    }
}

fn omega_double(alpha: f64, c: &[f64], order: usize) -> Result<Vec<f64>> {
    let mut omega: Vec<f64> = Vec::with_capacity(order);
    for n in 1..=order {
        let lead = c[n - 1] * d_factor(alpha, n);
        let mut scale = lead.abs();
        let mut sum = 0.0;
        for k in 1..n {
            let t = omega[k - 1] * c[n - k];
            scale = scale.max(t.abs());
            sum += t;
        }
        let value = lead - sum;
        let lost = loss_bits(scale, value);
        if lost > DOUBLE_LOSS_LIMIT {
            return Err(Error::PrecisionLoss {
                what: "coeffs::omega",
                lost_bits: lost,
                available_bits: 53,
            });
        }
        omega.push(value);
    }
    Ok(omega)
}

fn delta_double(alpha: f64, order: usize) -> Result<Vec<f64>> {
    let a = alpha / (alpha + 1.0);
    let ga = gamma(a);
    let rg_am1 = rgamma((alpha - 1.0) / (alpha + 1.0));
    let pref = (1.0 + 1.0 / alpha) * gamma(-1.0 / alpha);
    let mut delta: Vec<f64> = Vec::with_capacity(order);
    for n in 1..=order {
        let nf = n as f64;
        let rhs = pref
            * (ga * rgamma((alpha - 1.0 - nf) / (alpha + 1.0))
                - ga * ga * rg_am1 * rgamma((alpha - nf) / (alpha + 1.0)));
        let mut scale = rhs.abs();
        let mut sum = 0.0;
        let mut binom = 1.0;
        for k in 1..n {
            binom *= (n - k + 1) as f64 / k as f64;
            let t = binom * delta[n - k - 1] * ga * rgamma((alpha - k as f64) / (alpha + 1.0));
            scale = scale.max(t.abs());
            sum += t;
        }
        let value = rhs - sum;
        let lost = loss_bits(scale, value);
        if lost > DOUBLE_LOSS_LIMIT {
            return Err(Error::PrecisionLoss {
                what: "coeffs::delta",
                lost_bits: lost,
                available_bits: 53,
            });
        }
        delta.push(value);
    }
    Ok(delta)
}

fn extended_recurrences(alpha: StableIndex, order: usize, bits: u32) -> (Vec<f64>, Vec<f64>, u32) {
    let ext = extended::ExtendedCoefficients::build(alpha, order, bits);
    let omega = ext.omega(order).iter().map(|x| x.to_f64()).collect();
    let delta = ext.delta(order).iter().map(|x| x.to_f64()).collect();
    (omega, delta, bits)
}

static TABLES: LazyLock<RwLock<HashMap<u64, Arc<CoefficientTable>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Shared memoized table for `alpha` holding at least `order` entries.
pub fn table(alpha: StableIndex, order: usize) -> Result<Arc<CoefficientTable>> {
    let order = order.max(16);
    if let Some(t) = TABLES.read().expect("table cache poisoned").get(&alpha.key()) {
        if t.order() >= order {
            return Ok(Arc::clone(t));
        }
    }
    let built = Arc::new(CoefficientTable::build(alpha, order.next_power_of_two(), Precision::Auto)?);
    let mut guard = TABLES.write().expect("table cache poisoned");
    let entry = guard.entry(alpha.key()).or_insert_with(|| Arc::clone(&built));
    if entry.order() < built.order() {
        *entry = Arc::clone(&built);
    }
    Ok(Arc::clone(entry))
}

/// `B_{n,k}` from the partial Bell recurrence on `B_{n,1} = (2-alpha)_{n-1}/((n+1)(n+2))`.
pub fn bell_b(alpha: StableIndex, n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    table(alpha, n.div_ceil(2))?.bell(n, k)
}

/// Coefficient `c_p` of the large-x expansion of `Phi_alpha`.
pub fn c_p(alpha: StableIndex, p: usize) -> Result<f64> {
    Ok(table(alpha, p)?.c()[p])
}

/// Coefficient `d_p` of the large-x expansion of `Phi'_alpha`.
pub fn d_p(alpha: StableIndex, p: usize) -> Result<f64> {
    Ok(table(alpha, p)?.d()[p])
}

fn require_order(n: usize) -> Result<()> {
    if n < 1 {
        return Err(invalid("order must be at least 1"));
    }
    Ok(())
}

/// `Omega_n` from the moment recurrence.
pub fn omega_n(alpha: StableIndex, n: usize, precision: Precision) -> Result<f64> {
    require_order(n)?;
    match precision {
        Precision::Auto => Ok(table(alpha, n)?.omega()[n - 1]),
        _ => Ok(CoefficientTable::build(alpha, n, precision)?.omega()[n - 1]),
    }
}

/// Positive integer moment `E[A_ex^n]` of the excursion area.
pub fn moment_ex(alpha: StableIndex, n: usize, precision: Precision) -> Result<f64> {
    let om = omega_n(alpha, n, precision)?;
    Ok(moment_from_omega(alpha, n, om))
}

pub(crate) fn moment_from_omega(alpha: StableIndex, n: usize, omega: f64) -> f64 {
    let a = alpha.alpha();
    let lg = ln_gamma(n as f64 + 1.0) - ln_gamma((n as f64 - 1.0) * (a + 1.0) / a + 1.0);
    a * gamma(1.0 - 1.0 / a) * omega * lg.exp()
}

/// `Delta_n` from the negative-moment recurrence.
pub fn delta_n(alpha: StableIndex, n: usize, precision: Precision) -> Result<f64> {
    require_order(n)?;
    match precision {
        Precision::Auto => Ok(table(alpha, n)?.delta()[n - 1]),
        _ => Ok(CoefficientTable::build(alpha, n, precision)?.delta()[n - 1]),
    }
}

/// Fractional moment `E[A_ex^{(1 - alpha n)/(alpha + 1)}]`.
pub fn neg_moment_ex(alpha: StableIndex, n: usize, precision: Precision) -> Result<f64> {
    let dn = delta_n(alpha, n, precision)?;
    let a = alpha.alpha();
    let nf = n as f64;
    Ok(dn * (1.0 + a).powf((nf + 1.0) / (1.0 + a)) / gamma((a * nf - 1.0) / (a + 1.0)))
}

/// Exponent of the fractional moment returned by [`neg_moment_ex`].
pub fn neg_moment_exponent(alpha: StableIndex, n: usize) -> f64 {
    let a = alpha.alpha();
    (1.0 - a * n as f64) / (a + 1.0)
}

/// `(c_n)^{1/n} / n` for `n = 1..=n_max` (element `i` is order `i + 1`).
pub fn growth_check_c(alpha: StableIndex, n_max: usize) -> Result<Vec<f64>> {
    if n_max < 5 {
        return Err(invalid("growth check needs n_max >= 5"));
    }
    let t = table(alpha, n_max)?;
    Ok((1..=n_max)
        .map(|n| t.c()[n].powf(1.0 / n as f64) / n as f64)
        .collect())
}
