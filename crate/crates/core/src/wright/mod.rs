//! The M-Wright function `Phi_alpha`, its cosine counterpart `Psi_alpha`,
//! their derivatives, and the complex transform `F_alpha`.

mod asymptotic;
mod integral;
pub(crate) mod series;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rug::Float;

use crate::coeffs::gamma::gamma;
use crate::error::{invalid, Error, Result};
use crate::index::StableIndex;
use crate::mp::MpComplex;
use crate::quad::integrate_panels;

pub use asymptotic::{phi_asymptotic, phi_prime_asymptotic, psi_asymptotic, psi_prime_asymptotic};
pub use integral::{airy_prime_reference, airy_reference, airy_tail_integral};
pub(crate) use series::Quartet;

/// Which of the four real functions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WrightFn {
    Phi,
    PhiPrime,
    Psi,
    PsiPrime,
}

impl WrightFn {
    pub const ALL: [WrightFn; 4] = [WrightFn::Phi, WrightFn::PhiPrime, WrightFn::Psi, WrightFn::PsiPrime];

    pub fn is_derivative(self) -> bool {
        matches!(self, WrightFn::PhiPrime | WrightFn::PsiPrime)
    }

    pub fn is_phi(self) -> bool {
        matches!(self, WrightFn::Phi | WrightFn::PhiPrime)
    }

    pub fn name(self) -> &'static str {
        match self {
            WrightFn::Phi => "phi",
            WrightFn::PhiPrime => "phi_prime",
            WrightFn::Psi => "psi",
            WrightFn::PsiPrime => "psi_prime",
        }
    }
}

impl std::str::FromStr for WrightFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(WrightFn::Phi),
            "phi_prime" | "dphi" => Ok(WrightFn::PhiPrime),
            "psi" => Ok(WrightFn::Psi),
            "psi_prime" | "dpsi" => Ok(WrightFn::PsiPrime),
            other => Err(invalid(format!("unknown function {other:?}; expected phi, phi_prime, psi or psi_prime"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Series,
    Quadrature,
    Asymptotic,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Series => "series",
            Route::Quadrature => "quadrature",
            Route::Asymptotic => "asymptotic",
        })
    }
}

/// A value with an absolute error estimate and the route that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult<T = f64> {
    pub value: T,
    pub abs_error_estimate: f64,
    pub route: Route,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub target_abs_tol: f64,
    pub max_series_terms: usize,
    /// Budget of Gauss-Kronrod segments for the quadrature route.
    pub quadrature_nodes: usize,
    /// Threshold on `x^(1+1/alpha)` above which the large-x expansions are tried first.
    pub asymptotic_switchover: f64,
    pub asymptotic_max_terms: usize,
    /// Ceiling on the mantissa used when the double series cancels.
    pub max_extended_bits: u32,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            target_abs_tol: 1e-12,
            max_series_terms: 4000,
            quadrature_nodes: 50_000,
            asymptotic_switchover: 25.0,
            asymptotic_max_terms: 40,
            max_extended_bits: 16_384,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_tol > 0.0 && self.target_abs_tol.is_finite()) {
            return Err(invalid("target_abs_tol must be positive"));
        }
        if !(self.asymptotic_switchover > 0.0) {
            return Err(invalid("asymptotic_switchover must be positive"));
        }
        if self.max_series_terms == 0 || self.quadrature_nodes == 0 || self.asymptotic_max_terms == 0 {
            return Err(invalid("term and node budgets must be positive"));
        }
        if self.asymptotic_max_terms > asymptotic::MAX_ORDER {
            return Err(invalid(format!("asymptotic_max_terms is capped at {}", asymptotic::MAX_ORDER)));
        }
        Ok(())
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.target_abs_tol = tol;
        self
    }
}

fn check_x(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("argument must be finite, got {x}")))
    }
}

fn series_route(f: WrightFn, alpha: StableIndex, z: Complex64, cfg: &EvalConfig) -> Result<EvalResult<Complex64>> {
    let tol = cfg.target_abs_tol;
    match series::series_f64(alpha, f, z, tol, cfg.max_series_terms) {
        Ok(s) if s.truncation + s.roundoff <= tol => {
            return Ok(EvalResult {
                value: s.value,
                abs_error_estimate: s.truncation + s.roundoff,
                route: Route::Series,
            })
        }
        Ok(_) => {}
        Err(Error::NonConvergence { detail, .. }) if !detail.contains("gamma overflow") => {
            return Err(Error::NonConvergence { what: "wright::series", detail })
        }
        Err(_) => {}
    }
    // Cancellation: redo in MPFR.
    let log2_tol = tol.log2() - 2.0;
    let (q, bits) = if z.im == 0.0 {
        let (q, bits) = series::quartet_mp_abs(alpha, &Float::with_val(64, z.re), log2_tol);
        let v = q.get(f).to_f64();
        (Complex64::new(v, 0.0), bits)
    } else {
        let zz = MpComplex::from_c64(64, z);
        let (q, bits) = series::quartet_mp_abs(alpha, &zz, log2_tol);
        (q.get(f).to_c64(), bits)
    };
    if bits > cfg.max_extended_bits {
        return Err(Error::PrecisionLoss {
            what: "wright::series",
            lost_bits: bits as f64,
            available_bits: cfg.max_extended_bits,
        });
    }
    Ok(EvalResult {
        value: q,
        abs_error_estimate: tol * 0.25,
        route: Route::Series,
    })
}

fn real(r: EvalResult<Complex64>) -> EvalResult {
    EvalResult {
        value: r.value.re,
        abs_error_estimate: r.abs_error_estimate,
        route: r.route,
    }
}

/// Evaluates `f` along a forced route.
pub fn evaluate_route(f: WrightFn, alpha: StableIndex, x: f64, route: Route, cfg: &EvalConfig) -> Result<EvalResult> {
    cfg.validate()?;
    check_x(x)?;
    let tol = cfg.target_abs_tol;
    match route {
        Route::Series => series_route(f, alpha, Complex64::new(x, 0.0), cfg).map(real),
        Route::Quadrature => {
            let damping = (PI * alpha.alpha() / 2.0).sin();
            let q = if f.is_phi() && damping >= integral::MIN_DAMPING {
                integral::damped_cosine(alpha, x, f.is_derivative(), tol, cfg.quadrature_nodes)?
            } else {
                integral::ray(alpha, x, f, tol, cfg.quadrature_nodes)?
            };
            Ok(EvalResult {
                value: q.value,
                abs_error_estimate: q.error,
                route: Route::Quadrature,
            })
        }
        Route::Asymptotic => {
            let (value, err) = if f.is_phi() {
                asymptotic::phi_auto(alpha, x, f.is_derivative(), cfg.asymptotic_max_terms)?
            } else {
                asymptotic::psi_auto(alpha, x, f.is_derivative(), cfg.asymptotic_max_terms)?
            };
            Ok(EvalResult {
                value,
                abs_error_estimate: err,
                route: Route::Asymptotic,
            })
        }
    }
}

/// Evaluates `f` with automatic route selection.
pub fn evaluate(f: WrightFn, alpha: StableIndex, x: f64, cfg: &EvalConfig) -> Result<EvalResult> {
    cfg.validate()?;
    check_x(x)?;
    if x > 0.0 && x.powf(1.0 + 1.0 / alpha.alpha()) >= cfg.asymptotic_switchover {
        let r = evaluate_route(f, alpha, x, Route::Asymptotic, cfg)?;
        if r.abs_error_estimate <= cfg.target_abs_tol {
            return Ok(r);
        }
    }
    match evaluate_route(f, alpha, x, Route::Series, cfg) {
        Ok(r) => Ok(r),
        Err(series_err) => evaluate_route(f, alpha, x, Route::Quadrature, cfg).map_err(|_| series_err),
    }
}

pub fn phi(alpha: StableIndex, x: f64, cfg: &EvalConfig) -> Result<EvalResult> {
    evaluate(WrightFn::Phi, alpha, x, cfg)
}

pub fn psi(alpha: StableIndex, x: f64, cfg: &EvalConfig) -> Result<EvalResult> {
    evaluate(WrightFn::Psi, alpha, x, cfg)
}

pub fn phi_prime(alpha: StableIndex, x: f64, cfg: &EvalConfig) -> Result<EvalResult> {
    evaluate(WrightFn::PhiPrime, alpha, x, cfg)
}

pub fn psi_prime(alpha: StableIndex, x: f64, cfg: &EvalConfig) -> Result<EvalResult> {
    evaluate(WrightFn::PsiPrime, alpha, x, cfg)
}

/// `f` at complex argument by the (entire) series.
pub fn evaluate_complex(f: WrightFn, alpha: StableIndex, z: Complex64, cfg: &EvalConfig) -> Result<EvalResult<Complex64>> {
    cfg.validate()?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(invalid("argument must be finite"));
    }
    series_route(f, alpha, z, cfg)
}

/// `f` at real `x` with about `rel_bits` correct bits, by the MPFR series.
pub fn evaluate_extended(f: WrightFn, alpha: StableIndex, x: f64, rel_bits: u32) -> Result<f64> {
    check_x(x)?;
    let q = series::quartet_mp_rel(alpha, &Float::with_val(64, x), rel_bits);
    Ok(q.get(f).to_f64())
}

/// All four functions at a real MPFR argument, to about `rel_bits` relative
/// bits in Phi and Phi'. Large arguments use the expansions when they suffice.
pub(crate) fn quartet_mp(alpha: StableIndex, x: &Float, rel_bits: u32) -> Quartet<Float> {
    if let Some(q) = asymptotic::quartet_mp(alpha, x, rel_bits) {
        return q;
    }
    series::quartet_mp_rel(alpha, x, rel_bits)
}

/// All four functions at a complex MPFR argument by the series.
pub(crate) fn quartet_mp_complex(alpha: StableIndex, z: &MpComplex, rel_bits: u32) -> Quartet<MpComplex> {
    series::quartet_mp_rel(alpha, z, rel_bits)
}

/// `Phi'/Phi` at `x >= 0`, accurate in relative terms even where Phi underflows.
pub fn phi_log_derivative(alpha: StableIndex, x: f64, cfg: &EvalConfig) -> Result<EvalResult> {
    cfg.validate()?;
    check_x(x)?;
    if x > 0.0 && x.powf(1.0 + 1.0 / alpha.alpha()) >= cfg.asymptotic_switchover {
        let (v, e) = asymptotic::log_derivative(alpha, x, cfg.asymptotic_max_terms)?;
        if e <= cfg.target_abs_tol * v.abs().max(1.0) {
            return Ok(EvalResult {
                value: v,
                abs_error_estimate: e,
                route: Route::Asymptotic,
            });
        }
    }
    let q = quartet_mp(alpha, &Float::with_val(64, x), 64);
    let v = q.phi_prime.to_f64() / q.phi.to_f64();
    if !v.is_finite() {
        return Err(Error::PoleError("phi"));
    }
    Ok(EvalResult {
        value: v,
        abs_error_estimate: 1e-15 * v.abs(),
        route: Route::Series,
    })
}

/// The four functions at `x` as doubles, each with about 60 correct bits
/// relative to the size of Phi and Phi'.
pub fn quartet_f64(alpha: StableIndex, x: f64) -> Result<[f64; 4]> {
    check_x(x)?;
    let q = quartet_mp(alpha, &Float::with_val(64, x), 64);
    Ok([q.phi.to_f64(), q.phi_prime.to_f64(), q.psi.to_f64(), q.psi_prime.to_f64()])
}

/// Phi at `x >= 0` in MPFR with about 60 relative bits; stays finite where
/// the double underflows.
pub(crate) fn phi_value_mp(alpha: StableIndex, x: f64) -> Result<Float> {
    check_x(x)?;
    if x > 0.0 && x.powf(1.0 + 1.0 / alpha.alpha()) >= 60.0 {
        return asymptotic::phi_mp_scaled(alpha, x);
    }
    Ok(quartet_mp(alpha, &Float::with_val(64, x), 64).phi)
}

/// `i^theta = exp(i pi theta / 2)` on the principal branch.
pub fn i_pow(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI * theta / 2.0)
}

fn f_alpha_series(alpha: StableIndex, lambda: Complex64, tol: f64, max_terms: usize) -> Result<(Complex64, f64, f64)> {
    let a = alpha.alpha();
    let op = alpha.one_plus();
    let mut r = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut quiet = 0;
    for n in 0..max_terms {
        if n > 0 {
            r *= -lambda / n as f64;
        }
        let s = (n as f64 + 1.0) / op;
        let g = gamma(s);
        if !g.is_finite() {
            break;
        }
        let mag = g * op.powf(s) / op;
        let term = r * mag * Complex64::from_polar(1.0, PI * (2.0 - a) * s / 2.0);
        sum += term;
        abs_sum += term.norm();
        let bound = r.norm() * mag;
        if (bound < prev || bound == 0.0) && bound <= 0.01 * tol {
            quiet += 1;
            if quiet >= 2 {
                return Ok((sum, 2.0 * bound, 16.0 * f64::EPSILON * abs_sum));
            }
        } else {
            quiet = 0;
        }
        prev = bound;
    }
    Err(Error::NonConvergence {
        what: "wright::f_alpha",
        detail: format!("series did not settle at |lambda| = {}", lambda.norm()),
    })
}

fn f_alpha_quadrature(alpha: StableIndex, lambda: Complex64, tol: f64, max_segments: usize) -> Result<(Complex64, f64)> {
    let a = alpha.alpha();
    let op = alpha.one_plus();
    let rot = Complex64::from_polar(1.0, PI * a / 2.0);
    let log_mag = |t: f64| -lambda.re * t + rot.re * t.powf(op) / op;
    let mut t_max = 1.0;
    while !(log_mag(t_max) + t_max.ln().max(0.0) < (tol * 1e-3).ln() && log_mag(1.1 * t_max) < log_mag(t_max)) {
        t_max *= 1.25;
        if t_max > 1e6 {
            return Err(Error::NonConvergence {
                what: "wright::f_alpha",
                detail: "integrand does not decay".into(),
            });
        }
    }
    let freq = lambda.im.abs() + rot.im.abs() * t_max.powf(a) + 1.0;
    let width = (PI / (4.0 * freq)).min(t_max / 8.0);
    let integrand = |t: f64| (-lambda * t + rot * t.powf(op) / op).exp();
    let re = integrate_panels(|t| integrand(t).re, 0.0, t_max, width, tol * 0.5, max_segments)?;
    let im = integrate_panels(|t| integrand(t).im, 0.0, t_max, width, tol * 0.5, max_segments)?;
    Ok((Complex64::new(re.value, im.value), re.error + im.error))
}

/// `F_alpha(lambda)`, the Laplace transform in time of the characteristic function of the running area.
pub fn f_alpha(alpha: StableIndex, lambda: Complex64, cfg: &EvalConfig) -> Result<EvalResult<Complex64>> {
    cfg.validate()?;
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(invalid("lambda must be finite"));
    }
    let tol = cfg.target_abs_tol;
    if let Ok((v, trunc, round)) = f_alpha_series(alpha, lambda, tol, cfg.max_series_terms) {
        if trunc + round <= tol {
            return Ok(EvalResult {
                value: v,
                abs_error_estimate: trunc + round,
                route: Route::Series,
            });
        }
    }
    let (v, err) = f_alpha_quadrature(alpha, lambda, tol, cfg.quadrature_nodes)?;
    Ok(EvalResult {
        value: v,
        abs_error_estimate: err,
        route: Route::Quadrature,
    })
}

/// `F_alpha` by direct quadrature of its defining integral.
pub fn f_alpha_by_quadrature(alpha: StableIndex, lambda: Complex64, cfg: &EvalConfig) -> Result<EvalResult<Complex64>> {
    cfg.validate()?;
    let (v, err) = f_alpha_quadrature(alpha, lambda, cfg.target_abs_tol, cfg.quadrature_nodes)?;
    Ok(EvalResult {
        value: v,
        abs_error_estimate: err,
        route: Route::Quadrature,
    })
}
