//! Closed-form transforms of first-passage areas and of the excursion,
//! meander and conditioned areas, their means and tail constants.

use std::f64::consts::PI;

use rug::Float;

use crate::coeffs::gamma::{gamma, ln_gamma, rgamma};
use crate::error::{invalid, Error, Result};
use crate::index::StableIndex;
use crate::quad::integrate;
use crate::wright::{self, EvalConfig, WrightFn};

/// One evaluation of the joint transform of `(T_0, int_0^{T_0} L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformPoint {
    pub lambda: f64,
    pub mu: f64,
    pub z: f64,
    pub value: f64,
}

/// `P(A > x) ~ prefactor * x^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailAsymptotic {
    pub exponent: f64,
    pub prefactor: f64,
}

/// Above this value of `lambda^(1+1/alpha)` the local quantities come from the
/// expansions alone, in double precision.
const EXPANSION_ONLY: f64 = 60.0;

/// `Phi'/Phi`, `Psi` and `Psi'` at one point.
#[derive(Debug, Clone, Copy)]
struct Local {
    log_derivative: f64,
    psi: f64,
    psi_prime: f64,
}

fn local(alpha: StableIndex, x: f64) -> Result<Local> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(invalid(format!("lambda must be finite and nonnegative, got {x}")));
    }
    let cfg = EvalConfig::default();
    if x > 0.0 && x.powf(1.0 + 1.0 / alpha.alpha()) >= EXPANSION_ONLY {
        let ld = wright::phi_log_derivative(alpha, x, &cfg)?;
        let psi = wright::evaluate_route(WrightFn::Psi, alpha, x, wright::Route::Asymptotic, &cfg)?;
        let dpsi = wright::evaluate_route(WrightFn::PsiPrime, alpha, x, wright::Route::Asymptotic, &cfg)?;
        return Ok(Local {
            log_derivative: ld.value,
            psi: psi.value,
            psi_prime: dpsi.value,
        });
    }
    let [phi, dphi, psi, dpsi] = wright::quartet_f64(alpha, x)?;
    if phi == 0.0 {
        return Err(Error::PoleError("phi"));
    }
    Ok(Local {
        log_derivative: dphi / phi,
        psi,
        psi_prime: dpsi,
    })
}

fn phi_value(alpha: StableIndex, x: f64) -> Result<Float> {
    wright::phi_value_mp(alpha, x)
}

/// `E_z[exp(-lambda T_0 - mu int_0^{T_0} L)]`.
pub fn joint_laplace_t0_area(alpha: StableIndex, z: f64, lambda: f64, mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(invalid(format!("mu must be positive, got {mu}")));
    }
    if !(z >= 0.0 && lambda >= 0.0 && z.is_finite() && lambda.is_finite()) {
        return Err(invalid("z and lambda must be finite and nonnegative"));
    }
    let s = mu.powf(alpha.inv_one_plus());
    let num = phi_value(alpha, s * (z + lambda / mu))?;
    let den = phi_value(alpha, lambda * mu.powf(-alpha.ratio()))?;
    if den.is_zero() {
        return Err(Error::PoleError("phi"));
    }
    Ok(Float::with_val(64, num / den).to_f64())
}

impl TransformPoint {
    pub fn joint(alpha: StableIndex, z: f64, lambda: f64, mu: f64) -> Result<Self> {
        Ok(TransformPoint {
            lambda,
            mu,
            z,
            value: joint_laplace_t0_area(alpha, z, lambda, mu)?,
        })
    }
}

/// `E_1[(int_0^{T_0} L)^nu]` for `nu < 1/(1+alpha)`.
pub fn mellin_area_t0(alpha: StableIndex, nu: f64) -> Result<f64> {
    if !(nu < alpha.inv_one_plus()) || !nu.is_finite() {
        return Err(invalid(format!("nu must be below 1/(1+alpha) = {}", alpha.inv_one_plus())));
    }
    let a = alpha.ratio();
    let op = alpha.one_plus();
    let ln = nu * op.ln() + ln_gamma(a) + ln_gamma(1.0 - op * nu) - ln_gamma(a - nu) - ln_gamma(1.0 - nu);
    Ok(ln.exp())
}

/// Density of `T_0` under `P_z`.
pub fn hitting_density(alpha: StableIndex, z: f64, t: f64) -> Result<f64> {
    if !(z > 0.0 && t > 0.0 && z.is_finite() && t.is_finite()) {
        return Err(invalid("hitting_density needs z > 0 and t > 0"));
    }
    let y = z * t.powf(-1.0 / alpha.alpha());
    Ok(scaled_hitting_density(alpha, y)? / t)
}

/// `t * density` as a function of `y = z t^{-1/alpha}`.
fn scaled_hitting_density(alpha: StableIndex, y: f64) -> Result<f64> {
    let inv = 1.0 / alpha.alpha();
    let mut r = 1.0;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut prev = f64::INFINITY;
    for n in 1..4000usize {
        r *= -y / n as f64;
        let g = gamma(1.0 + n as f64 * inv);
        if !g.is_finite() {
            break;
        }
        let bound = r.abs() * g;
        let term = -r * (n as f64 * PI * inv).sin() * g;
        sum += term;
        abs_sum += term.abs();
        if bound < prev && bound < 1e-18 * sum.abs().max(1e-300) {
            if 1e-15 * abs_sum <= 1e-12 * sum.abs() {
                return Ok((sum / PI).max(0.0));
            }
            break;
        }
        prev = bound;
    }
    scaled_hitting_density_mp(alpha, y)
}

fn scaled_hitting_density_mp(alpha: StableIndex, y: f64) -> Result<f64> {
    let inv = 1.0 / alpha.alpha();
    // log2 of the largest term, to size the mantissa.
    let mut max_log = 0.0f64;
    let mut n_stop = 0;
    let mut prev = f64::INFINITY;
    for n in 1..200_000usize {
        let l = (n as f64 * y.ln() + ln_gamma(1.0 + n as f64 * inv) - ln_gamma(n as f64 + 1.0)) / std::f64::consts::LN_2;
        max_log = max_log.max(l);
        if l < prev && l < -2.0 * max_log - 120.0 {
            n_stop = n;
            break;
        }
        prev = l;
    }
    if n_stop == 0 {
        return Err(Error::NonConvergence {
            what: "transforms::hitting_density",
            detail: format!("series at y = {y} does not settle"),
        });
    }
    let bits = (2.0 * max_log + 140.0).ceil() as u32;
    if bits > 200_000 {
        return Err(Error::NonConvergence {
            what: "transforms::hitting_density",
            detail: format!("scaled argument {y} needs {bits} bits"),
        });
    }
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let a = Float::with_val(bits, alpha.alpha());
    let yy = Float::with_val(bits, y);
    let mut r = Float::with_val(bits, 1);
    let mut sum = Float::new(bits);
    for n in 1..=n_stop {
        r *= &yy;
        r /= n as u32;
        let s = Float::with_val(bits, n as u32) / &a;
        let g = Float::with_val(bits, &s + 1.0).gamma();
        let sn = Float::with_val(bits, &s * &pi).sin();
        let term = Float::with_val(bits, &r * &g) * sn;
        if n % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok((sum / pi).to_f64().max(0.0))
}

/// `alpha Gamma(1-1/alpha) (Phi'(0)/Phi(0) - Phi'(lambda)/Phi(lambda))`.
pub fn theorem1_rhs(alpha: StableIndex, lambda: f64) -> Result<f64> {
    alpha.require_valid_lambda(lambda)?;
    let a = alpha.alpha();
    let at0 = local(alpha, 0.0)?.log_derivative;
    let here = local(alpha, lambda)?.log_derivative;
    Ok(a * gamma(1.0 - 1.0 / a) * (at0 - here))
}

/// `Gamma(-1/alpha) (Phi'/Phi + lambda^(1/alpha))`.
pub fn theorem1_alt_rhs(alpha: StableIndex, lambda: f64) -> Result<f64> {
    alpha.require_valid_lambda(lambda)?;
    let a = alpha.alpha();
    let l = local(alpha, lambda)?;
    Ok(gamma(-1.0 / a) * (l.log_derivative + lambda.powf(1.0 / a)))
}

/// `pi (Psi' Phi - Phi' Psi) / Phi`.
pub fn h_alpha(alpha: StableIndex, lambda: f64) -> Result<f64> {
    alpha.require_valid_lambda(lambda)?;
    let l = local(alpha, lambda)?;
    Ok(PI * (l.psi_prime - l.log_derivative * l.psi))
}

/// Partial sums (1 to 3 terms) of the large-lambda expansion of `H_alpha`.
pub fn h_alpha_asymptotic(alpha: StableIndex, lambda: f64, terms: usize) -> Result<f64> {
    if !(lambda > 0.0) || !(1..=3).contains(&terms) {
        return Err(invalid("h_alpha_asymptotic needs lambda > 0 and 1..=3 terms"));
    }
    let a = alpha.alpha();
    let parts = [
        lambda.powf(1.0 / a - 1.0),
        -(a + 1.0) / (2.0 * a) * lambda.powi(-2),
        gamma(1.0 + a) * lambda.powf(-2.0 - a + 1.0 / a),
    ];
    Ok(parts[..terms].iter().sum())
}

/// `Gamma(1-1/alpha) H_alpha(lambda)`.
pub fn theorem2_rhs(alpha: StableIndex, lambda: f64) -> Result<f64> {
    Ok(gamma(1.0 - 1.0 / alpha.alpha()) * h_alpha(alpha, lambda)?)
}

/// `-lambda H_alpha(lambda) - Phi'(lambda)/Phi(lambda)`.
pub fn theorem3_rhs(alpha: StableIndex, lambda: f64) -> Result<f64> {
    alpha.require_valid_lambda(lambda)?;
    let l = local(alpha, lambda)?;
    let h = PI * (l.psi_prime - l.log_derivative * l.psi);
    Ok(-lambda * h - l.log_derivative)
}

pub fn mean_ex(alpha: StableIndex) -> f64 {
    let a = alpha.alpha();
    (a - 1.0) / 2.0 * gamma(1.0 - 1.0 / a)
}

pub fn second_moment_ex(alpha: StableIndex) -> f64 {
    let a = alpha.alpha();
    gamma(1.0 - 1.0 / a) * (a - 1.0) * (2.0 * a + 1.0) / (12.0 * gamma(1.0 + 1.0 / a))
}

pub fn mean_meander(alpha: StableIndex) -> f64 {
    let a = alpha.alpha();
    gamma(1.0 - 1.0 / a) * (a + 1.0) / (2.0 * a)
}

pub fn tail_meander(alpha: StableIndex) -> Result<TailAsymptotic> {
    alpha.require_strict()?;
    let a = alpha.alpha();
    let prefactor = (a - 1.0) * gamma(1.0 + a) * gamma(1.0 - 1.0 / a) * rgamma(2.0 - a) * rgamma(2.0 + a - 1.0 / a);
    Ok(TailAsymptotic { exponent: -a, prefactor })
}

pub fn tail_conditioned(alpha: StableIndex) -> Result<TailAsymptotic> {
    alpha.require_strict()?;
    let a = alpha.alpha();
    let prefactor = gamma(1.0 + a) * rgamma(1.0 + a - 1.0 / a) * rgamma(2.0 - a);
    Ok(TailAsymptotic { exponent: 1.0 - a, prefactor })
}

/// Exponent `p(nu) = (1 - alpha + alpha nu)/(1 + alpha)` of the meander moment recovered by [`mellin_meander`].
pub fn mellin_meander_exponent(alpha: StableIndex, nu: f64) -> f64 {
    let a = alpha.alpha();
    (1.0 - a + a * nu) / (1.0 + a)
}

/// `E[A_me^p(nu)]` from the Mellin transform of `H_alpha`, for `0 < nu < 1 - 1/alpha`.
pub fn mellin_meander(alpha: StableIndex, nu: f64) -> Result<f64> {
    let a = alpha.alpha();
    let gap = 1.0 - nu - 1.0 / a;
    if !(nu > 0.0 && gap > 0.0) {
        return Err(invalid(format!("nu must lie in (0, {})", 1.0 - 1.0 / a)));
    }
    let integral = mellin_h_integral(alpha, nu)?;
    let g = (a - 1.0 - a * nu) / (a + 1.0);
    Ok(gamma(1.0 - 1.0 / a) * integral * (1.0 + a) / (a * gamma(nu) * gamma(g)))
}

/// `int_0^inf lambda^(nu-1) H_alpha(lambda) d lambda`, split at 1.
pub fn mellin_h_integral(alpha: StableIndex, nu: f64) -> Result<f64> {
    let a = alpha.alpha();
    let gap = 1.0 - nu - 1.0 / a;
    let fail = |e: Error| Error::QuadratureFailure(format!("Mellin integral of H at nu = {nu}: {e}"));
    let mut err: Option<Error> = None;
    // lambda = u^(1/nu) on (0, 1]
    let lower = integrate(
        |u| {
            if u <= 0.0 {
                return h_alpha(alpha, 0.0).unwrap_or(f64::NAN) / nu;
            }
            match h_alpha(alpha, u.powf(1.0 / nu)) {
                Ok(h) => h / nu,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        1e-10,
        1e-10,
        400,
    )
    .map_err(fail)?;
    // lambda = u^(-1/gap) on [1, inf)
    let upper = integrate(
        |u| {
            if u <= 0.0 {
                return 1.0 / gap;
            }
            let lam = u.powf(-1.0 / gap);
            if !lam.is_finite() {
                return 1.0 / gap;
            }
            match h_alpha(alpha, lam) {
                Ok(h) => lam.powf(nu - 1.0) * h * u.powf(-1.0 / gap - 1.0) / gap,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        1e-10,
        1e-10,
        400,
    )
    .map_err(fail)?;
    if let Some(e) = err {
        return Err(fail(e));
    }
    Ok(lower.value + upper.value)
}

impl StableIndex {
    fn require_valid_lambda(&self, lambda: f64) -> Result<()> {
        if lambda >= 0.0 && lambda.is_finite() {
            Ok(())
        } else {
            Err(invalid(format!("lambda must be finite and nonnegative, got {lambda}")))
        }
    }
}

#[cfg(test)]
mod tests;
